//! Unit-capacity max-flow kernel and the path-packing operations built on it.

use std::collections::VecDeque;

use crate::error::{input, Result};
use crate::graph::{norm, Edge, Multigraph, VSet};

pub const INF: i64 = i64::MAX / 4;

#[derive(Clone, Debug)]
struct Arc {
    to: usize,
    cap: i64,
    cost: i64,
    flow: i64,
}

#[derive(Clone, Debug, Default)]
struct Net {
    arcs: Vec<Arc>,
    out: Vec<Vec<usize>>,
}

impl Net {
    fn new(n: usize) -> Self {
        Net { arcs: Vec::new(), out: vec![Vec::new(); n] }
    }

    fn add(&mut self, from: usize, to: usize, cap: i64, cost: i64) -> usize {
        let id = self.arcs.len();
        self.arcs.push(Arc { to, cap, cost, flow: 0 });
        self.arcs.push(Arc { to: from, cap: 0, cost: -cost, flow: 0 });
        self.out[from].push(id);
        self.out[to].push(id + 1);
        id
    }

    fn residual(&self, a: usize) -> i64 {
        self.arcs[a].cap - self.arcs[a].flow
    }

    fn push(&mut self, a: usize, f: i64) {
        self.arcs[a].flow += f;
        self.arcs[a ^ 1].flow -= f;
    }

    /// Augments one unit at a time along shortest (by cost, then hops) paths.
    fn run(&mut self, s: usize, t: usize, limit: i64, costed: bool) -> i64 {
        let n = self.out.len();
        let mut total = 0;
        while total < limit {
            let mut via = vec![usize::MAX; n];
            let found = if costed {
                let mut dist = vec![INF; n];
                let mut inq = vec![false; n];
                let mut q = VecDeque::new();
                dist[s] = 0;
                q.push_back(s);
                while let Some(u) = q.pop_front() {
                    inq[u] = false;
                    for &a in &self.out[u] {
                        if self.residual(a) > 0 {
                            let w = self.arcs[a].to;
                            let nd = dist[u] + self.arcs[a].cost;
                            if nd < dist[w] {
                                dist[w] = nd;
                                via[w] = a;
                                if !inq[w] {
                                    inq[w] = true;
                                    q.push_back(w);
                                }
                            }
                        }
                    }
                }
                dist[t] < INF
            } else {
                let mut q = VecDeque::from([s]);
                let mut seen = vec![false; n];
                seen[s] = true;
                while let Some(u) = q.pop_front() {
                    if u == t {
                        break;
                    }
                    for &a in &self.out[u] {
                        let w = self.arcs[a].to;
                        if !seen[w] && self.residual(a) > 0 {
                            seen[w] = true;
                            via[w] = a;
                            q.push_back(w);
                        }
                    }
                }
                seen[t]
            };
            if !found {
                break;
            }
            let mut v = t;
            while v != s {
                let a = via[v];
                self.push(a, 1);
                v = self.arcs[a ^ 1].to;
            }
            total += 1;
        }
        total
    }

    fn reachable(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.out.len()];
        seen[s] = true;
        let mut st = vec![s];
        while let Some(u) = st.pop() {
            for &a in &self.out[u] {
                let w = self.arcs[a].to;
                if !seen[w] && self.residual(a) > 0 {
                    seen[w] = true;
                    st.push(w);
                }
            }
        }
        seen
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Vertex,
    Edge,
}

/// Paths sharing endpoints only as declared by `mode`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathSystem {
    pub mode: Mode,
    pub paths: Vec<Vec<usize>>,
}

impl PathSystem {
    /// Checks that every path is a path of `g` and the disjointness holds
    /// (internal vertices for vertex mode, edges for edge mode).
    pub fn validate(&self, g: &Multigraph) -> bool {
        let mut used_edges: std::collections::HashMap<Edge, usize> = Default::default();
        let mut seen_inner = vec![0usize; g.n()];
        for p in &self.paths {
            if p.is_empty() {
                return false;
            }
            let set: VSet = p.iter().copied().collect();
            if set.len() != p.len() {
                return false;
            }
            for w in p.windows(2) {
                if !g.has_edge(w[0], w[1]) {
                    return false;
                }
                *used_edges.entry(norm((w[0], w[1]))).or_default() += 1;
            }
            for &v in &p[1..p.len().saturating_sub(1)] {
                seen_inner[v] += 1;
            }
        }
        match self.mode {
            Mode::Vertex => {
                let ends: VSet = self.paths.iter().flat_map(|p| [p[0], *p.last().unwrap()]).collect();
                seen_inner.iter().enumerate().all(|(v, &c)| c == 0 || (c == 1 && !ends.contains(&v)))
                    && used_edges.iter().all(|(&(a, b), &c)| c <= g.multiplicity(a, b))
            }
            Mode::Edge => used_edges.iter().all(|(&(a, b), &c)| c <= g.multiplicity(a, b)),
        }
    }
}

/// A cut separating two terminals: vertices and/or direct edges.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Cut {
    pub vertices: Vec<usize>,
    pub edges: Vec<Edge>,
}

impl Cut {
    pub fn size(&self) -> usize {
        self.vertices.len() + self.edges.len()
    }
}

/// Options for set-to-set packings.
#[derive(Clone, Debug)]
pub struct Packing<'a> {
    pub mode: Mode,
    /// Start vertices; each may start `source_cap` paths.
    pub sources: &'a [usize],
    pub source_cap: i64,
    /// End vertices; paths stop at the first sink they reach.
    pub sinks: &'a [usize],
    /// Paths each sink may absorb.
    pub sink_cap: i64,
    /// Vertices no path may use.
    pub blocked: &'a [bool],
    pub limit: usize,
    /// Prefer short paths (successive shortest paths).
    pub short: bool,
}

pub struct PackingResult {
    pub paths: PathSystem,
    /// Minimum cut on the source side, valid when the packing is maximum.
    pub cut: Cut,
}

/// Maximum packing of paths from `sources` to `sinks`.
///
/// Vertex mode: paths are vertex-disjoint apart from shared sources (when
/// `source_cap > 1`). Edge mode: paths are edge-disjoint. Sources are never
/// passed through; a vertex that is both source and sink yields a
/// single-vertex path.
pub fn pack(g: &Multigraph, opt: &Packing) -> PackingResult {
    let n = g.n();
    let is_blocked = |v: usize| opt.blocked.get(v).copied().unwrap_or(false);
    let mut is_src = vec![false; n];
    let mut is_sink = vec![false; n];
    for &s in opt.sources {
        is_src[s] = true;
    }
    for &t in opt.sinks {
        is_sink[t] = true;
    }
    let mut trivial = Vec::new();
    for &s in opt.sources {
        if is_sink[s] && !is_blocked(s) && trivial.len() < opt.limit {
            trivial.push(vec![s]);
        }
    }
    let remaining = opt.limit.saturating_sub(trivial.len());
    let both = |v: usize| is_src[v] && is_sink[v];
    let cost = if opt.short { 1 } else { 0 };
    let (inn, out): (Vec<usize>, Vec<usize>) = match opt.mode {
        Mode::Vertex => ((0..n).map(|v| 2 * v).collect(), (0..n).map(|v| 2 * v + 1).collect()),
        Mode::Edge => ((0..n).collect(), (0..n).collect()),
    };
    let nodes = match opt.mode {
        Mode::Vertex => 2 * n,
        Mode::Edge => n,
    };
    let (s, t) = (nodes, nodes + 1);
    let mut net = Net::new(nodes + 2);
    let mut vertex_arc = vec![usize::MAX; n];
    let mut edge_arcs: Vec<(usize, Edge)> = Vec::new();
    for v in 0..n {
        if is_blocked(v) || both(v) {
            continue;
        }
        if is_src[v] {
            net.add(s, out[v], opt.source_cap, 0);
        } else if is_sink[v] {
            net.add(inn[v], t, opt.sink_cap, 0);
        } else if opt.mode == Mode::Vertex {
            vertex_arc[v] = net.add(inn[v], out[v], 1, 0);
        }
    }
    for (x, y) in g.edges() {
        if is_blocked(x) || is_blocked(y) || both(x) || both(y) {
            continue;
        }
        for (a, b) in [(x, y), (y, x)] {
            // sources have no entry, sinks have no exit
            if is_sink[a] || is_src[b] {
                continue;
            }
            let id = net.add(out[a], inn[b], 1, cost);
            edge_arcs.push((id, (a, b)));
        }
    }
    let flow = net.run(s, t, remaining.min(INF as usize) as i64, opt.short);
    // cancel opposite unit flows on the same undirected edge (edge mode)
    if opt.mode == Mode::Edge {
        let mut by_edge: std::collections::HashMap<Edge, Vec<(usize, bool)>> = Default::default();
        for &(id, (a, b)) in &edge_arcs {
            by_edge.entry(norm((a, b))).or_default().push((id, a < b));
        }
        for arcs in by_edge.values() {
            let fwd: Vec<usize> =
                arcs.iter().filter(|x| x.1 && net.arcs[x.0].flow > 0).map(|x| x.0).collect();
            let bwd: Vec<usize> =
                arcs.iter().filter(|x| !x.1 && net.arcs[x.0].flow > 0).map(|x| x.0).collect();
            for (&f, &b) in fwd.iter().zip(bwd.iter()) {
                net.push(f, -1);
                net.push(b, -1);
            }
        }
    }
    // decompose
    let mut next: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for &(id, (a, b)) in &edge_arcs {
        if net.arcs[id].flow > 0 {
            next[a].push((b, id));
        }
    }
    let mut paths = trivial;
    for &src in opt.sources {
        if is_blocked(src) || both(src) {
            continue;
        }
        loop {
            if next[src].is_empty() {
                break;
            }
            let mut walk = vec![src];
            let mut cur = src;
            let mut guard = 0;
            while !is_sink[cur] {
                let Some((w, _)) = next[cur].pop() else { break };
                walk.push(w);
                cur = w;
                guard += 1;
                if guard > 4 * g.m() + 4 {
                    break;
                }
            }
            if is_sink[cur] {
                paths.push(shortcut(walk));
            }
        }
    }
    debug_assert!(paths.len() >= flow as usize);
    paths.sort();
    let cut = {
        let reach = net.reachable(s);
        let mut vertices = Vec::new();
        let mut edges = Vec::new();
        for v in 0..n {
            if vertex_arc[v] != usize::MAX && reach[inn[v]] && !reach[out[v]] {
                vertices.push(v);
            }
            if is_sink[v] && opt.sink_cap < INF && !is_blocked(v) && !both(v) && reach[inn[v]] {
                vertices.push(v);
            }
            if is_src[v] && opt.source_cap < INF && !is_blocked(v) && !both(v) && !reach[out[v]] {
                vertices.push(v);
            }
        }
        for &(id, (a, b)) in &edge_arcs {
            if reach[out[a]] && !reach[inn[b]] && net.arcs[id].cap > 0 {
                let crosses_vertex = opt.mode == Mode::Vertex
                    && (vertices.contains(&a) || vertices.contains(&b));
                if !crosses_vertex {
                    edges.push(norm((a, b)));
                }
            }
        }
        vertices.sort_unstable();
        vertices.dedup();
        edges.sort_unstable();
        Cut { vertices, edges }
    };
    PackingResult { paths: PathSystem { mode: opt.mode, paths }, cut }
}

/// Removes loops from a walk, keeping it a path with the same ends.
fn shortcut(walk: Vec<usize>) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::with_capacity(walk.len());
    let mut pos: std::collections::HashMap<usize, usize> = Default::default();
    for v in walk {
        if let Some(&p) = pos.get(&v) {
            for w in out.drain(p + 1..) {
                pos.remove(&w);
            }
        } else {
            pos.insert(v, out.len());
            out.push(v);
        }
    }
    out
}

/// Maximum number of internally disjoint (vertex mode) or edge-disjoint
/// (edge mode) u-v paths, with a realizing path system.
pub fn menger(g: &Multigraph, u: usize, v: usize, mode: Mode) -> Result<(usize, PathSystem)> {
    let (k, ps, _) = menger_bounded(g, u, v, mode, usize::MAX)?;
    Ok((k, ps))
}

/// As `menger`, stopping once `limit` paths are found; also returns the cut
/// (meaningful when fewer than `limit` paths exist).
pub fn menger_bounded(
    g: &Multigraph,
    u: usize,
    v: usize,
    mode: Mode,
    limit: usize,
) -> Result<(usize, PathSystem, Cut)> {
    if u == v {
        return input("menger needs distinct terminals");
    }
    if u >= g.n() || v >= g.n() {
        return input("terminal out of range");
    }
    let r = pack(
        g,
        &Packing {
            mode,
            sources: &[u],
            source_cap: INF,
            sinks: &[v],
            sink_cap: INF,
            blocked: &[],
            limit,
            short: false,
        },
    );
    Ok((r.paths.paths.len(), r.paths, r.cut))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SetConnectivity {
    Connected,
    Violated { pair: (usize, usize), found: usize, cut: Cut },
}

/// Whether every pair of `s` is joined by `k` internally disjoint paths.
pub fn is_set_k_connected(g: &Multigraph, s: &VSet, k: usize) -> Result<SetConnectivity> {
    is_set_k_connected_mode(g, s, k, Mode::Vertex)
}

pub fn is_set_k_connected_mode(g: &Multigraph, s: &VSet, k: usize, mode: Mode) -> Result<SetConnectivity> {
    if k < 1 {
        return input("k must be at least 1");
    }
    if s.len() < 2 {
        return input("set needs at least two vertices");
    }
    g.check_set(s)?;
    let vs: Vec<usize> = s.iter().copied().collect();
    for i in 0..vs.len() {
        for j in i + 1..vs.len() {
            let (found, _, cut) = menger_bounded(g, vs[i], vs[j], mode, k)?;
            if found < k {
                return Ok(SetConnectivity::Violated { pair: (vs[i], vs[j]), found, cut });
            }
        }
    }
    Ok(SetConnectivity::Connected)
}

/// Three (or `k`) paths from `v` to the set `target`, sharing only `v`, with
/// distinct ends and no inner vertex in `target`. Short paths preferred.
pub fn fan(g: &Multigraph, v: usize, target: &VSet, k: usize, blocked: &[bool]) -> Option<Vec<Vec<usize>>> {
    let sinks: Vec<usize> = target.iter().copied().filter(|&t| t != v).collect();
    let r = pack(
        g,
        &Packing {
            mode: Mode::Vertex,
            sources: &[v],
            source_cap: INF,
            sinks: &sinks,
            sink_cap: 1,
            blocked,
            limit: k,
            short: true,
        },
    );
    if r.paths.paths.len() < k {
        return None;
    }
    let mut ps = r.paths.paths;
    ps.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Some(ps)
}
