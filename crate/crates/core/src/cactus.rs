//! Cacti and semi-cacti: validators, block-chain and cycle-rooted cacti of
//! 2-connected subcubic graphs, and round-based spanning cacti.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{assertion, input, Error, Result};
use crate::flow::{pack, Mode, Packing};
use crate::graph::{bfs_dist, components_masked, norm, shortest_path, Edge, Multigraph, VSet};
use crate::infinite::{mask, Truncation};
use crate::search::{cycle_through, CycleSearch};
use crate::structure::{blocks, is_two_connected};

/// Recursion guard for the cactus constructions.
pub const MAX_STEPS: usize = 1_000_000;

const CYCLE_BUDGET: usize = 400_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexKind {
    C,
    D,
}

/// First violated clause of a (semi-)cactus definition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub clause: String,
    pub witness: Vec<usize>,
}

fn violation<T>(clause: &str, witness: Vec<usize>) -> std::result::Result<T, Violation> {
    Err(Violation { clause: clause.to_string(), witness })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cactus {
    pub vertices: VSet,
    pub edges: Vec<Edge>,
    /// Canonically oriented: least vertex first, then its lesser cycle neighbour.
    pub cycles: Vec<Vec<usize>>,
    /// Maximal paths of non-cycle edges, from the lesser end.
    pub paths: Vec<Vec<usize>>,
    pub kind: BTreeMap<usize, VertexKind>,
    pub even: bool,
}

impl Cactus {
    pub fn cycle_of(&self, v: usize) -> Option<usize> {
        self.cycles.iter().position(|c| c.contains(&v))
    }

    pub fn is_d_vertex(&self, v: usize) -> bool {
        self.kind.get(&v) == Some(&VertexKind::D)
    }

    pub fn graph(&self, g: &Multigraph) -> Multigraph {
        g.with_edges(&self.edges)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemiCactus {
    pub vertices: VSet,
    pub edges: Vec<Edge>,
    /// Cycle blocks as oriented vertex sequences, bridges as vertex pairs.
    pub blocks: Vec<Vec<usize>>,
    pub kind: BTreeMap<usize, VertexKind>,
    pub even: bool,
}

impl SemiCactus {
    pub fn cycles(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.blocks.iter().filter(|b| b.len() > 2 || (b.len() == 2 && self.is_digon(b)))
    }

    fn is_digon(&self, b: &[usize]) -> bool {
        self.edges.iter().filter(|&&e| e == norm((b[0], b[1]))).count() >= 2
    }
}

/// Least vertex first, then towards its lesser neighbour on the cycle.
pub fn orient_cycle(cycle: &[usize]) -> Vec<usize> {
    if cycle.len() < 3 {
        let mut c = cycle.to_vec();
        c.sort_unstable();
        return c;
    }
    let i = (0..cycle.len()).min_by_key(|&i| cycle[i]).unwrap();
    let n = cycle.len();
    let fwd = cycle[(i + 1) % n];
    let bwd = cycle[(i + n - 1) % n];
    if fwd <= bwd {
        (0..n).map(|k| cycle[(i + k) % n]).collect()
    } else {
        (0..n).map(|k| cycle[(i + n - k) % n]).collect()
    }
}

pub fn cycle_edges(cycle: &[usize]) -> Vec<Edge> {
    let n = cycle.len();
    (0..n).map(|i| norm((cycle[i], cycle[(i + 1) % n]))).collect()
}

/// Vertex order of a block whose edges form one cycle.
pub(crate) fn trace_cycle(edges: &[Edge]) -> Vec<usize> {
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(a, b) in edges {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    let start = *adj.keys().next().unwrap();
    if edges.len() == 2 {
        return orient_cycle(&[edges[0].0, edges[0].1]);
    }
    let mut out = vec![start];
    let mut prev = usize::MAX;
    let mut cur = start;
    loop {
        let next = *adj[&cur].iter().find(|&&w| w != prev).unwrap();
        if next == start {
            break;
        }
        out.push(next);
        prev = cur;
        cur = next;
    }
    orient_cycle(&out)
}

/// Local graph on `vertices` with `edges` (host indices); returns the graph
/// and the local-to-host map.
fn local(g: &Multigraph, vertices: &VSet, edges: &[Edge]) -> std::result::Result<(Multigraph, Vec<usize>), Violation> {
    let old: Vec<usize> = vertices.iter().copied().collect();
    let mut new_of = BTreeMap::new();
    for (i, &o) in old.iter().enumerate() {
        if o >= g.n() {
            return violation("vertex out of range", vec![o]);
        }
        new_of.insert(o, i);
    }
    let mut avail: BTreeMap<Edge, usize> = BTreeMap::new();
    for e in g.edges() {
        *avail.entry(e).or_default() += 1;
    }
    let mut es = Vec::new();
    for &e in edges {
        let e = norm(e);
        match avail.get_mut(&e) {
            Some(c) if *c > 0 => *c -= 1,
            _ => return violation("edge not in host", vec![e.0, e.1]),
        }
        match (new_of.get(&e.0), new_of.get(&e.1)) {
            (Some(&a), Some(&b)) => es.push((a, b)),
            _ => return violation("edge endpoint outside vertex set", vec![e.0, e.1]),
        }
    }
    let names = old.iter().map(|&o| g.name(o).to_string()).collect();
    Ok((Multigraph::from_sorted(names, &es), old))
}

fn check_connected(h: &Multigraph, map: &[usize]) -> std::result::Result<(), Violation> {
    if h.n() == 0 {
        return violation("empty", vec![]);
    }
    let comps = components_masked(h, &vec![false; h.n()]);
    if comps.len() > 1 {
        return violation("not connected", comps[1].iter().map(|&v| map[v]).collect());
    }
    Ok(())
}

/// Checks the cactus clauses for the subgraph (`vertices`, `edges`) of `g`.
pub fn validate_cactus_on(g: &Multigraph, vertices: &VSet, edges: &[Edge]) -> std::result::Result<Cactus, Violation> {
    let (h, map) = local(g, vertices, edges)?;
    check_connected(&h, &map)?;
    let bd = blocks(&h);
    let mut cycles = Vec::new();
    let mut on_cycle = vec![usize::MAX; h.n()];
    for b in &bd.blocks {
        if b.is_bridge() {
            continue;
        }
        if !b.is_cycle() {
            return violation("block is neither a cycle nor an edge", b.vertices.iter().map(|&v| map[v]).collect());
        }
        let idx = cycles.len();
        for &v in &b.vertices {
            if on_cycle[v] != usize::MAX {
                return violation("cycles share a vertex", vec![map[v]]);
            }
            on_cycle[v] = idx;
        }
        cycles.push(trace_cycle(&b.edges));
    }
    if let Some(v) = (0..h.n()).find(|&v| h.degree(v) > 3) {
        return violation("not subcubic", vec![map[v]]);
    }
    let mut path_adj: Vec<Vec<usize>> = vec![Vec::new(); h.n()];
    for b in bd.blocks.iter().filter(|b| b.is_bridge()) {
        let (a, c) = b.edges[0];
        path_adj[a].push(c);
        path_adj[c].push(a);
    }
    if let Some(v) = (0..h.n()).find(|&v| path_adj[v].len() > 2) {
        return violation("paths share a vertex", vec![map[v]]);
    }
    // contracting the cycles must leave a tree
    let next = cycles.len() + on_cycle.iter().filter(|&&c| c == usize::MAX).count();
    let tree_edges = bd.blocks.iter().filter(|b| b.is_bridge()).count();
    if tree_edges + 1 != next {
        return violation("cycle contraction is not a tree", vec![]);
    }
    let mut paths = Vec::new();
    let mut seen = vec![false; h.n()];
    for s in 0..h.n() {
        if seen[s] || path_adj[s].len() != 1 {
            continue;
        }
        let mut p = vec![s];
        seen[s] = true;
        let mut cur = s;
        while let Some(&w) = path_adj[cur].iter().find(|&&w| !seen[w]) {
            seen[w] = true;
            p.push(w);
            cur = w;
        }
        if p[0] > *p.last().unwrap() {
            p.reverse();
        }
        paths.push(p.into_iter().map(|v| map[v]).collect());
    }
    paths.sort();
    let kind = (0..h.n())
        .map(|v| (map[v], if bd.cut_vertices.contains(&v) { VertexKind::C } else { VertexKind::D }))
        .collect();
    let mut cycles: Vec<Vec<usize>> = cycles.into_iter().map(|c| orient_cycle(&c.iter().map(|&v| map[v]).collect::<Vec<_>>())).collect();
    cycles.sort();
    let even = cycles.iter().all(|c| c.len() % 2 == 0);
    let mut es: Vec<Edge> = edges.iter().map(|&e| norm(e)).collect();
    es.sort_unstable();
    Ok(Cactus { vertices: vertices.clone(), edges: es, cycles, paths, kind, even })
}

/// The whole graph `g` as a cactus.
pub fn validate_cactus(g: &Multigraph) -> std::result::Result<Cactus, Violation> {
    validate_cactus_on(g, &(0..g.n()).collect(), &g.edges())
}

pub fn validate_semicactus_on(
    g: &Multigraph,
    vertices: &VSet,
    edges: &[Edge],
) -> std::result::Result<SemiCactus, Violation> {
    let (h, map) = local(g, vertices, edges)?;
    check_connected(&h, &map)?;
    if let Some(v) = (0..h.n()).find(|&v| h.degree(v) > 4) {
        return violation("max degree above 4", vec![map[v]]);
    }
    let bd = blocks(&h);
    let mut count = vec![0usize; h.n()];
    let mut out = Vec::new();
    for b in &bd.blocks {
        let seq = if b.is_bridge() {
            vec![b.edges[0].0, b.edges[0].1]
        } else if b.is_cycle() {
            trace_cycle(&b.edges)
        } else {
            return violation("block is neither a cycle nor an edge", b.vertices.iter().map(|&v| map[v]).collect());
        };
        for &v in &b.vertices {
            count[v] += 1;
            if count[v] > 2 {
                return violation("vertex in more than two blocks", vec![map[v]]);
            }
        }
        out.push(seq);
    }
    let mut blocks_out: Vec<Vec<usize>> = out
        .into_iter()
        .map(|s| {
            let s: Vec<usize> = s.iter().map(|&v| map[v]).collect();
            orient_cycle(&s)
        })
        .collect();
    blocks_out.sort();
    let kind = (0..h.n())
        .map(|v| (map[v], if bd.cut_vertices.contains(&v) { VertexKind::C } else { VertexKind::D }))
        .collect();
    let mut es: Vec<Edge> = edges.iter().map(|&e| norm(e)).collect();
    es.sort_unstable();
    let even = bd.blocks.iter().filter(|b| !b.is_bridge()).all(|b| b.vertices.len() % 2 == 0);
    Ok(SemiCactus { vertices: vertices.clone(), edges: es, blocks: blocks_out, kind, even })
}

pub fn validate_semicactus(g: &Multigraph) -> std::result::Result<SemiCactus, Violation> {
    validate_semicactus_on(g, &(0..g.n()).collect(), &g.edges())
}

/// A graph whose block tree is a path, with `u`,`v` inner vertices of the
/// two end-blocks (or any vertices when it is non-separable).
#[derive(Clone, Debug)]
pub struct BlockChain<'a> {
    pub graph: &'a Multigraph,
    pub u: usize,
    pub v: usize,
    /// Blocks as vertex lists from the `u` end to the `v` end.
    pub path: Vec<Vec<usize>>,
}

impl<'a> BlockChain<'a> {
    pub fn new(g: &'a Multigraph, u: usize, v: usize) -> Result<Self> {
        if u >= g.n() || v >= g.n() {
            return input("terminal out of range");
        }
        if components_masked(g, &vec![false; g.n()]).len() != 1 {
            return input("block-chain must be connected");
        }
        let bd = blocks(g);
        if bd.cut_vertices.is_empty() {
            let path = if bd.blocks.is_empty() { vec![vec![u]] } else { vec![bd.blocks[0].vertices.clone()] };
            return Ok(BlockChain { graph: g, u, v, path });
        }
        let cuts_of = |b: usize| bd.block_tree.iter().filter(|&&(bi, _)| bi == b).map(|&(_, c)| c).collect::<Vec<_>>();
        for &c in &bd.cut_vertices {
            if bd.block_tree.iter().filter(|&&(_, cv)| cv == c).count() != 2 {
                return input(format!("{} lies in more than two blocks", g.name(c)));
            }
        }
        let inner = |b: usize, w: usize| bd.blocks[b].vertices.binary_search(&w).is_ok() && !bd.cut_vertices.contains(&w);
        let ends: Vec<usize> = (0..bd.blocks.len()).filter(|&b| cuts_of(b).len() == 1).collect();
        if ends.len() != 2 || (0..bd.blocks.len()).any(|b| cuts_of(b).len() > 2) {
            return input("block tree is not a path");
        }
        let start = match ends.iter().find(|&&b| inner(b, u)) {
            Some(&b) => b,
            None => return input(format!("{} is not an inner vertex of an end-block", g.name(u))),
        };
        let finish = if ends[0] == start { ends[1] } else { ends[0] };
        if !inner(finish, v) {
            return input(format!("{} is not an inner vertex of the other end-block", g.name(v)));
        }
        let mut path = vec![bd.blocks[start].vertices.clone()];
        let mut cur = start;
        let mut via = usize::MAX;
        while cur != finish {
            let c = cuts_of(cur).into_iter().find(|&c| c != via).unwrap();
            let nb = bd.block_tree.iter().find(|&&(b, cv)| cv == c && b != cur).unwrap().0;
            path.push(bd.blocks[nb].vertices.clone());
            via = c;
            cur = nb;
        }
        Ok(BlockChain { graph: g, u, v, path })
    }
}

/// A cactus together with the cycles that capture each leftover component.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CactusBuild {
    pub cactus: Cactus,
    /// For each component of `g - F`, the index of a cycle of the cactus
    /// witnessing the required property.
    pub leftover: Vec<(Vec<usize>, usize)>,
}

struct Steps(usize);

impl Steps {
    fn tick(&mut self) -> Result<()> {
        self.0 += 1;
        if self.0 > MAX_STEPS {
            return assertion("cactus recursion exceeded its step guard");
        }
        Ok(())
    }
}

type Piece = (VSet, Vec<Edge>);

fn lift(map: &[usize], p: Piece) -> Piece {
    (p.0.iter().map(|&v| map[v]).collect(), p.1.iter().map(|&(a, b)| norm((map[a], map[b]))).collect())
}

fn join(parts: Vec<Piece>, extra: &[Edge]) -> Piece {
    let mut vs = VSet::new();
    let mut es = Vec::new();
    for (v, e) in parts {
        vs.extend(v);
        es.extend(e);
    }
    for &(a, b) in extra {
        vs.insert(a);
        vs.insert(b);
        es.push(norm((a, b)));
    }
    es.sort_unstable();
    es.dedup();
    (vs, es)
}

fn cycle_piece(c: &[usize]) -> Piece {
    (c.iter().copied().collect(), cycle_edges(c))
}

fn pos(map: &[usize], host: usize) -> usize {
    map.binary_search(&host).expect("vertex in subgraph")
}

/// Shortest cycle through `a` and `b` (min-cost pair of disjoint paths).
pub fn cycle_via(g: &Multigraph, a: usize, b: usize, blocked: &[bool]) -> Option<Vec<usize>> {
    if a == b {
        return shortest_cycle_at(g, a, blocked);
    }
    let r = pack(
        g,
        &Packing {
            mode: Mode::Vertex,
            sources: &[a],
            source_cap: 2,
            sinks: &[b],
            sink_cap: 2,
            blocked,
            limit: 2,
            short: true,
        },
    );
    if r.paths.paths.len() < 2 {
        return None;
    }
    let mut ps = r.paths.paths;
    ps.sort();
    let mut c = ps[0].clone();
    c.extend(ps[1][1..ps[1].len() - 1].iter().rev());
    if c.len() < 3 && g.multiplicity(a, b) < 2 {
        return None;
    }
    Some(orient_cycle(&c))
}

/// Shortest cycle through `v`, ties broken by the neighbour pair.
pub fn shortest_cycle_at(g: &Multigraph, v: usize, blocked: &[bool]) -> Option<Vec<usize>> {
    let nb: Vec<usize> = g.distinct_neighbors(v).into_iter().filter(|&w| !blocked.get(w).copied().unwrap_or(false)).collect();
    let mut best: Option<Vec<usize>> = None;
    let mut blk: Vec<bool> = (0..g.n()).map(|w| blocked.get(w).copied().unwrap_or(false)).collect();
    blk[v] = true;
    for (i, &p) in nb.iter().enumerate() {
        for &q in &nb[i + 1..] {
            if let Some(path) = shortest_path(g, p, q, &blk) {
                let mut c = vec![v];
                c.extend(path);
                if best.as_ref().is_none_or(|b| c.len() < b.len()) {
                    best = Some(c);
                }
            }
        }
    }
    best.map(|c| orient_cycle(&c))
}

/// Path from `u` to `v` through `x`.
fn path_through(g: &Multigraph, u: usize, v: usize, x: usize) -> Option<Vec<usize>> {
    let none = vec![false; g.n()];
    if x == u || x == v {
        return shortest_path(g, u, v, &none);
    }
    let r = pack(
        g,
        &Packing { mode: Mode::Vertex, sources: &[x], source_cap: 2, sinks: &[u, v], sink_cap: 1, blocked: &none, limit: 2, short: true },
    );
    let ps = r.paths.paths;
    let to_u = ps.iter().find(|p| *p.last().unwrap() == u)?;
    let to_v = ps.iter().find(|p| *p.last().unwrap() == v)?;
    let mut p: Vec<usize> = to_u.iter().rev().copied().collect();
    p.extend(&to_v[1..]);
    Some(p)
}

fn found(s: CycleSearch) -> Result<Option<Vec<usize>>> {
    match s {
        CycleSearch::Found(c) => Ok(Some(c)),
        CycleSearch::NotFound => Ok(None),
        CycleSearch::BudgetExceeded => Err(Error::Unsupported("cycle search budget exceeded".into())),
    }
}

fn bc(g: &Multigraph, u: usize, v: usize, x: usize, steps: &mut Steps) -> Result<Piece> {
    steps.tick()?;
    if g.n() == 1 {
        return Ok(([0].into(), vec![]));
    }
    if g.n() == 2 {
        return Ok(([0, 1].into(), vec![(0, 1)]));
    }
    let chain = BlockChain::new(g, u, v).map_err(|e| Error::Assertion(format!("not a block-chain: {e}")))?;
    if chain.path.len() > 1 {
        // peel the end-block whose interior misses x
        let first = &chain.path[0];
        let last = chain.path.last().unwrap();
        let bd = blocks(g);
        let x_inner = |b: &Vec<usize>| b.binary_search(&x).is_ok() && !bd.cut_vertices.contains(&x);
        let (blk, t, other) = if x_inner(first) { (last, v, u) } else { (first, u, v) };
        let cut = *blk.iter().find(|w| bd.cut_vertices.contains(w)).unwrap();
        let c = if blk.len() == 2 {
            ([t, cut].into(), vec![norm((t, cut))])
        } else {
            let allow: Vec<bool> = (0..g.n()).map(|w| blk.binary_search(&w).is_ok()).collect();
            let blocked: Vec<bool> = allow.iter().map(|a| !a).collect();
            match cycle_via(g, t, cut, &blocked) {
                Some(c) => cycle_piece(&c),
                None => return assertion("end-block has no cycle through its terminal and cut vertex"),
            }
        };
        let keep: VSet = (0..g.n()).filter(|w| *w == cut || blk.binary_search(w).is_err()).collect();
        let (sub, map) = g.induced(&keep);
        let (a, b) = if t == u { (pos(&map, cut), pos(&map, other)) } else { (pos(&map, other), pos(&map, cut)) };
        let rest = bc(&sub, a, b, pos(&map, x), steps)?;
        return Ok(join(vec![c, lift(&map, rest)], &[]));
    }
    // non-separable
    let all = vec![true; g.n()];
    let must = [u, v, x];
    if let Some(c) = found(cycle_through(g, &must, &all, false, g.n(), CYCLE_BUDGET)).unwrap_or(None) {
        return Ok(cycle_piece(&orient_cycle(&c)));
    }
    let p = match path_through(g, u, v, x) {
        Some(p) => p,
        None => return assertion("no path through x in a block-chain"),
    };
    // quick detour closing P into a cycle
    let inner: Vec<bool> = (0..g.n()).map(|w| p[1..p.len() - 1].contains(&w)).collect();
    if u != v {
        if g.has_edge(u, v) && p.len() > 2 {
            return Ok(cycle_piece(&orient_cycle(&p)));
        }
        if let Some(q) = shortest_path(g, u, v, &inner) {
            if q.len() > 2 {
                let mut c = p.clone();
                c.extend(q[1..q.len() - 1].iter().rev());
                return Ok(cycle_piece(&orient_cycle(&c)));
            }
        }
    }
    let k = p.iter().position(|&w| w == x).unwrap();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for i in 0..k {
        for j in k + 1..p.len() {
            pairs.push((i, j));
        }
    }
    pairs.sort_by_key(|&(i, j)| (j - i, i));
    for (i, j) in pairs {
        let (a, b) = (p[i], p[j]);
        let mut blocked = vec![false; g.n()];
        blocked[a] = true;
        blocked[b] = true;
        let comps = components_masked(g, &blocked);
        let side = comps.iter().find(|c| c.binary_search(&x).is_ok()).unwrap();
        if side.binary_search(&u).is_ok() || side.binary_search(&v).is_ok() {
            continue;
        }
        let na = g.neighbors(a).iter().filter(|w| side.binary_search(w).is_ok()).count();
        let nb = g.neighbors(b).iter().filter(|w| side.binary_search(w).is_ok()).count();
        if na != 1 || nb != 1 {
            continue;
        }
        let allowed: Vec<bool> = (0..g.n()).map(|w| side.binary_search(&w).is_err()).collect();
        let c = match found(cycle_through(g, &[u, v, a, b], &allowed, false, g.n(), CYCLE_BUDGET))? {
            Some(c) => orient_cycle(&c),
            None => continue,
        };
        let (a2, b2) = (p[i + 1], p[j - 1]);
        let keep: VSet = side.iter().copied().collect();
        let (sub, map) = g.induced(&keep);
        let rest = bc(&sub, pos(&map, a2), pos(&map, b2), pos(&map, x), steps)?;
        return Ok(join(vec![cycle_piece(&c), lift(&map, rest)], &[(a, a2)]));
    }
    assertion("no separating pair on the path through x")
}

struct Contracted {
    /// Parts of `g - C0`: a 2-connected block or a single vertex.
    parts: Vec<Vec<usize>>,
    is_block: Vec<bool>,
    /// Tree edges as (neighbour part, edge from this part to it).
    tree: Vec<Vec<(usize, Edge)>>,
    /// Edges into the root cycle as (cycle vertex, part vertex).
    anchor: Vec<Vec<Edge>>,
}

fn contract_rest(g: &Multigraph, on_c0: &[bool]) -> Contracted {
    let keep: VSet = (0..g.n()).filter(|&v| !on_c0[v]).collect();
    let (d, map) = g.induced(&keep);
    let bd = blocks(&d);
    let mut part_of = vec![usize::MAX; g.n()];
    let mut parts: Vec<Vec<usize>> = Vec::new();
    let mut is_block = Vec::new();
    for b in bd.blocks.iter().filter(|b| !b.is_bridge()) {
        for &v in &b.vertices {
            part_of[map[v]] = parts.len();
        }
        parts.push(b.vertices.iter().map(|&v| map[v]).collect());
        is_block.push(true);
    }
    for &v in &map {
        if part_of[v] == usize::MAX {
            part_of[v] = parts.len();
            parts.push(vec![v]);
            is_block.push(false);
        }
    }
    let mut order: Vec<usize> = (0..parts.len()).collect();
    order.sort_by_key(|&i| parts[i][0]);
    let mut rank = vec![0; parts.len()];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }
    let parts_sorted: Vec<Vec<usize>> = order.iter().map(|&i| parts[i].clone()).collect();
    let is_block: Vec<bool> = order.iter().map(|&i| is_block[i]).collect();
    for v in 0..g.n() {
        if part_of[v] != usize::MAX {
            part_of[v] = rank[part_of[v]];
        }
    }
    let mut tree = vec![Vec::new(); parts_sorted.len()];
    let mut anchor = vec![Vec::new(); parts_sorted.len()];
    for (a, b) in g.edges() {
        match (on_c0[a], on_c0[b]) {
            (true, true) => {}
            (true, false) => anchor[part_of[b]].push((a, b)),
            (false, true) => anchor[part_of[a]].push((b, a)),
            (false, false) => {
                let (pa, pb) = (part_of[a], part_of[b]);
                if pa != pb {
                    tree[pa].push((pb, (a, b)));
                    tree[pb].push((pa, (b, a)));
                }
            }
        }
    }
    for a in &mut anchor {
        a.sort_unstable();
    }
    Contracted { parts: parts_sorted, is_block, tree, anchor }
}

/// Walks from leaf `l` through parts of tree-degree 2 with no root-cycle
/// edge. Returns the chain and the edge leaving it.
fn walk_chain(ct: &Contracted, l: usize) -> (Vec<usize>, Edge) {
    let mut chain = vec![l];
    let (mut cur, mut e) = ct.tree[l][0];
    let mut prev = l;
    while ct.tree[cur].len() == 2 && ct.anchor[cur].is_empty() {
        chain.push(cur);
        let &(nx, ne) = ct.tree[cur].iter().find(|(p, _)| *p != prev).unwrap();
        prev = cur;
        cur = nx;
        e = ne;
    }
    (chain, e)
}

fn sub_piece<F>(g: &Multigraph, keep: &VSet, f: F) -> Result<Piece>
where
    F: FnOnce(&Multigraph, &dyn Fn(usize) -> usize) -> Result<Piece>,
{
    let (sub, map) = g.induced(keep);
    let at = |h: usize| pos(&map, h);
    let p = f(&sub, &at)?;
    Ok(lift(&map, p))
}

fn cr(g: &Multigraph, c0: &[usize], x: usize, steps: &mut Steps) -> Result<Piece> {
    steps.tick()?;
    let on_c0 = mask(g.n(), &c0.iter().copied().collect());
    let base = cycle_piece(c0);
    let comps = components_masked(g, &on_c0);
    if comps.is_empty() {
        return Ok(base);
    }
    if comps.len() > 1 {
        let mut parts = vec![base];
        for d in &comps {
            let mut keep: VSet = d.iter().copied().collect();
            keep.extend(c0.iter().copied());
            let xi = if keep.contains(&x) { x } else { d[0] };
            parts.push(sub_piece(g, &keep, |s, at| {
                let c: Vec<usize> = c0.iter().map(|&v| at(v)).collect();
                cr(s, &c, at(xi), steps)
            })?);
        }
        return Ok(join(parts, &[]));
    }
    let d = &comps[0];
    let dset: VSet = d.iter().copied().collect();
    let anchors: Vec<Edge> = {
        let mut a: Vec<Edge> = Vec::new();
        for &c in c0 {
            for &w in g.neighbors(c) {
                if dset.contains(&w) {
                    a.push((c, w));
                }
            }
        }
        a.sort_unstable();
        a
    };
    if d.len() == 1 {
        return Ok(join(vec![base], &[anchors[0]]));
    }
    let xd = |dflt: usize| if dset.contains(&x) { x } else { dflt };
    if anchors.len() == 2 {
        let (uu, vv) = (anchors[0], anchors[1]);
        let xp = xd(uu.1);
        let f = sub_piece(g, &dset, |s, at| bc(s, at(uu.1), at(vv.1), at(xp), steps))?;
        return Ok(join(vec![base, f], &[uu]));
    }
    if anchors.len() < 2 {
        return assertion("root cycle has fewer than two edges to the rest; host not 2-connected");
    }
    let ct = contract_rest(g, &on_c0);
    let np = ct.parts.len();
    if np == 1 {
        // the rest is a single 2-connected block
        let (u, up) = anchors[0];
        let xp = xd(up);
        let f = sub_piece(g, &dset, |s, at| {
            let c = match shortest_cycle_at(s, at(up), &[]) {
                Some(c) => c,
                None => return assertion("block without a cycle"),
            };
            cr(s, &c, at(xp), steps)
        })?;
        return Ok(join(vec![base, f], &[(u, up)]));
    }
    let deg = |p: usize| ct.tree[p].len() + ct.anchor[p].len();
    let leaves: Vec<usize> = (0..np).filter(|&p| ct.tree[p].len() == 1).collect();
    let part_of = |w: usize| ct.parts.iter().position(|p| p.contains(&w)).unwrap();
    let proper = leaves.iter().copied().find(|&l| ct.anchor[l].len() == 1 && deg(part_of(walk_chain(&ct, l).1 .1)) >= 3);
    let (l, chain, exit) = match proper {
        Some(l) => {
            let (chain, e) = walk_chain(&ct, l);
            (l, chain, e)
        }
        None => {
            let l = leaves[0];
            let (chain, e) = walk_chain(&ct, l);
            (l, chain, e)
        }
    };
    let (u, up) = ct.anchor[l][0];
    let used: VSet = chain.iter().flat_map(|&p| ct.parts[p].iter().copied()).collect();
    let mut pieces = Vec::new();
    let mut extra = vec![(u, up)];
    if proper.is_some() || !ct.is_block[l] {
        // block-chain through the whole chain
        let xp = if used.contains(&x) { x } else { up };
        let vp = exit.0;
        pieces.push(sub_piece(g, &used, |s, at| bc(s, at(up), at(vp), at(xp), steps))?);
    } else {
        // leaf block with several root-cycle edges: root a cycle inside it
        let lb: VSet = ct.parts[l].iter().copied().collect();
        let b = ct.tree[l][0].1 .0;
        let xb = if lb.contains(&x) { x } else { up };
        pieces.push(sub_piece(g, &lb, |s, at| {
            let c = match cycle_via(s, at(up), at(b), &[]) {
                Some(c) => c,
                None => return assertion("leaf block without a cycle through its exits"),
            };
            cr(s, &c, at(xb), steps)
        })?);
        if chain.len() > 1 {
            let rest: VSet = chain[1..].iter().flat_map(|&p| ct.parts[p].iter().copied()).collect();
            let e = ct.tree[l][0].1 .1;
            let xr = if rest.contains(&x) { x } else { e };
            let vp = exit.0;
            pieces.push(sub_piece(g, &rest, |s, at| bc(s, at(e), at(vp), at(xr), steps))?);
            extra.push((b, e));
        }
    }
    let keep: VSet = (0..g.n()).filter(|v| !used.contains(v)).collect();
    let x2 = if keep.contains(&x) { x } else { c0[0] };
    pieces.push(sub_piece(g, &keep, |s, at| {
        let c: Vec<usize> = c0.iter().map(|&v| at(v)).collect();
        cr(s, &c, at(x2), steps)
    })?);
    Ok(join(pieces, &extra))
}

fn check_subcubic(g: &Multigraph) -> Result<()> {
    if let Some(v) = (0..g.n()).find(|&v| g.degree(v) > 3) {
        return input(format!("{} has degree {} > 3", g.name(v), g.degree(v)));
    }
    Ok(())
}

fn to_cactus(g: &Multigraph, p: &Piece) -> Result<Cactus> {
    validate_cactus_on(g, &p.0, &p.1).map_err(|v| {
        Error::Assertion(format!("construction produced a non-cactus: {} at {:?}", v.clause, g.set_names(&v.witness.iter().copied().collect())))
    })
}

/// Components of `g - V(F)`.
fn leftover(g: &Multigraph, f: &VSet) -> Vec<Vec<usize>> {
    components_masked(g, &mask(g.n(), f))
}

/// Finite cactus of the block-chain `g` containing `u`,`v`,`x`, with `u`,`v`
/// d-vertices and every leftover component's neighbourhood on one cycle.
pub fn block_chain_cactus(g: &Multigraph, u: usize, v: usize, x: usize) -> Result<CactusBuild> {
    check_subcubic(g)?;
    BlockChain::new(g, u, v)?;
    if x >= g.n() {
        return input("x out of range");
    }
    let p = bc(g, u, v, x, &mut Steps(0))?;
    let cactus = to_cactus(g, &p)?;
    for w in [u, v, x] {
        if !cactus.vertices.contains(&w) {
            return assertion(format!("{} missing from the cactus", g.name(w)));
        }
    }
    if cactus.vertices.len() > 1 && (!cactus.is_d_vertex(u) || !cactus.is_d_vertex(v)) {
        return assertion("terminal is a c-vertex of the cactus");
    }
    let mut out = Vec::new();
    for h in leftover(g, &cactus.vertices) {
        let hs: VSet = h.iter().copied().collect();
        let nb = crate::graph::neighborhood(g, &hs);
        match cactus.cycles.iter().position(|c| nb.iter().all(|w| c.contains(w))) {
            Some(i) => out.push((h, i)),
            None => return assertion("leftover component not captured by a cycle"),
        }
    }
    Ok(CactusBuild { cactus, leftover: out })
}

/// Whether `g[h ∪ c]` is 2-connected.
pub fn joins_two_connected(g: &Multigraph, h: &[usize], c: &[usize]) -> bool {
    let keep: VSet = h.iter().chain(c.iter()).copied().collect();
    is_two_connected(&g.induced(&keep).0)
}

fn check_cycle(g: &Multigraph, c: &[usize]) -> Result<()> {
    let distinct: VSet = c.iter().copied().collect();
    if c.len() < 3 || distinct.len() != c.len() || cycle_edges(c).iter().any(|&(a, b)| !g.has_edge(a, b)) {
        return input("root is not a cycle of the graph");
    }
    Ok(())
}

/// Finite cactus of the 2-connected subcubic `g` containing the cycle `c0`
/// and `x`; every leftover component joins some other cycle of the cactus
/// into a 2-connected graph.
pub fn cycle_rooted_cactus(g: &Multigraph, c0: &[usize], x: usize) -> Result<CactusBuild> {
    check_subcubic(g)?;
    if !is_two_connected(g) {
        return input("graph is not 2-connected");
    }
    check_cycle(g, c0)?;
    if x >= g.n() {
        return input("x out of range");
    }
    let p = cr(g, c0, x, &mut Steps(0))?;
    let cactus = to_cactus(g, &p)?;
    let root = orient_cycle(c0);
    if !cactus.cycles.contains(&root) || !cactus.vertices.contains(&x) {
        return assertion("cactus misses the root cycle or x");
    }
    let mut out = Vec::new();
    for h in leftover(g, &cactus.vertices) {
        match cactus.cycles.iter().position(|c| *c != root && joins_two_connected(g, &h, c)) {
            Some(i) => out.push((h, i)),
            None => return assertion("leftover component has no 2-connected partner cycle"),
        }
    }
    Ok(CactusBuild { cactus, leftover: out })
}

/// A leftover component of a round with the cycle that captures it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attachment {
    pub component: Vec<usize>,
    pub cycle: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CactusRound {
    pub f: Cactus,
    /// The enumerated vertex this round must contain.
    pub x: usize,
    pub attachments: Vec<Attachment>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CactusEvidence {
    pub round: usize,
    pub is_cactus: bool,
    pub contains_previous: bool,
    pub x_included: bool,
    /// Each attachment cycle is new in this round and joins its component 2-connectedly.
    pub components_two_connected: bool,
    /// Edges of the next round into a component start on its cycle.
    pub crossing_edges_on_cycle: bool,
    /// Neighbourhood of each component in the final subgraph lies in one
    /// component of this round minus the previous one.
    pub neighborhood_in_new_part: bool,
}

impl CactusEvidence {
    pub fn passed(&self) -> bool {
        self.is_cactus
            && self.contains_previous
            && self.x_included
            && self.components_two_connected
            && self.crossing_edges_on_cycle
            && self.neighborhood_in_new_part
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CactusRun {
    pub rounds: Vec<CactusRound>,
    pub evidence: Vec<CactusEvidence>,
    pub spanning: bool,
}

impl CactusRun {
    pub fn last(&self) -> &Cactus {
        &self.rounds.last().unwrap().f
    }
}

fn bfs_order(g: &Multigraph, root: usize) -> Vec<usize> {
    let d = bfs_dist(g, root);
    let mut vs: Vec<usize> = (0..g.n()).filter(|&v| d[v] != usize::MAX).collect();
    vs.sort_by_key(|&v| (d[v], v));
    vs
}

/// Increasing cacti F1 ≤ F2 ≤ … of the finite 2-connected subcubic `g`,
/// starting from a shortest cycle through `root`, for at most `max_rounds`
/// rounds or until spanning.
pub fn spanning_cactus_rounds(g: &Multigraph, root: usize, max_rounds: usize) -> Result<CactusRun> {
    check_subcubic(g)?;
    if !is_two_connected(g) {
        return input("graph is not 2-connected");
    }
    if max_rounds == 0 {
        return input("at least one round required");
    }
    let order = bfs_order(g, root);
    let c1 = shortest_cycle_at(g, root, &[]).ok_or_else(|| Error::Input("no cycle through the root".into()))?;
    let p1 = cycle_piece(&c1);
    let f1 = to_cactus(g, &p1)?;
    let attachments = leftover(g, &f1.vertices).into_iter().map(|h| Attachment { component: h, cycle: c1.clone() }).collect();
    let mut rounds = vec![CactusRound { f: f1, x: root, attachments }];
    let mut steps = Steps(0);
    while rounds.len() < max_rounds {
        let prev = rounds.last().unwrap();
        let Some(&x) = order.iter().find(|v| !prev.f.vertices.contains(v)) else {
            break;
        };
        let mut pieces = vec![(prev.f.vertices.clone(), prev.f.edges.clone())];
        let mut attachments = Vec::new();
        for att in &prev.attachments {
            let mut keep: VSet = att.component.iter().copied().collect();
            keep.extend(att.cycle.iter().copied());
            let (sub, map) = g.induced(&keep);
            let at = |h: usize| pos(&map, h);
            let c: Vec<usize> = att.cycle.iter().map(|&v| at(v)).collect();
            let xl = if att.component.contains(&x) {
                x
            } else {
                // a component vertex next to the cycle
                *att.component.iter().find(|&&w| g.neighbors(w).iter().any(|z| att.cycle.contains(z))).unwrap()
            };
            let built = cr(&sub, &c, at(xl), &mut steps)?;
            let (vs, es) = lift(&map, built);
            let fl = to_cactus(g, &(vs.clone(), es.clone()))?;
            let root_c = orient_cycle(&att.cycle);
            let mut blocked = vec![true; g.n()];
            for &w in &att.component {
                blocked[w] = vs.contains(&w);
            }
            for h in components_masked(g, &blocked) {
                match fl.cycles.iter().find(|c| **c != root_c && joins_two_connected(g, &h, c)) {
                    Some(c) => attachments.push(Attachment { component: h, cycle: c.clone() }),
                    None => return assertion("round left a component without a partner cycle"),
                }
            }
            pieces.push((vs, es));
        }
        let p = join(pieces, &[]);
        let f = to_cactus(g, &p)?;
        attachments.sort_by(|a, b| a.component.cmp(&b.component));
        rounds.push(CactusRound { f, x, attachments });
    }
    let spanning = rounds.last().unwrap().f.vertices.len() == g.n();
    let evidence = cactus_evidence(g, &rounds);
    Ok(CactusRun { rounds, evidence, spanning })
}

/// Re-checks every round from the edge sets alone.
pub fn cactus_evidence(g: &Multigraph, rounds: &[CactusRound]) -> Vec<CactusEvidence> {
    let last = &rounds.last().unwrap().f;
    let last_g = g.with_edges(&last.edges);
    rounds
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let prev: Option<&Cactus> = if i == 0 { None } else { Some(&rounds[i - 1].f) };
            let prev_vs: VSet = prev.map(|p| p.vertices.clone()).unwrap_or_default();
            let is_cactus = validate_cactus_on(g, &r.f.vertices, &r.f.edges).is_ok();
            let contains_previous = prev.is_none_or(|p| {
                let mine: BTreeSet<Edge> = r.f.edges.iter().copied().collect();
                p.edges.iter().all(|e| mine.contains(e))
            });
            let x_included = r.f.vertices.contains(&r.x);
            let comps = leftover(g, &r.f.vertices);
            let components_two_connected = comps.len() == r.attachments.len()
                && r.attachments.iter().all(|a| {
                    comps.contains(&a.component)
                        && r.f.cycles.contains(&orient_cycle(&a.cycle))
                        && (i == 0 || a.cycle.iter().all(|v| !prev_vs.contains(v)))
                        && joins_two_connected(g, &a.component, &a.cycle)
                });
            let crossing_edges_on_cycle = match rounds.get(i + 1) {
                None => true,
                Some(next) => r.attachments.iter().all(|a| {
                    next.f.edges.iter().all(|&(p, q)| {
                        let (inside, out) = if a.component.binary_search(&q).is_ok() { (p, q) } else { (q, p) };
                        !(r.f.vertices.contains(&inside) && a.component.binary_search(&out).is_ok()) || a.cycle.contains(&inside)
                    })
                }),
            };
            // components of F_i - F_{i-1}
            let mut blocked = vec![true; g.n()];
            for &v in &r.f.vertices {
                blocked[v] = prev_vs.contains(&v);
            }
            let fi = g.with_edges(&r.f.edges);
            let parts = components_masked(&fi, &blocked);
            let neighborhood_in_new_part = r.attachments.iter().all(|a| {
                let hs: VSet = a.component.iter().copied().collect();
                let nf: VSet = a
                    .component
                    .iter()
                    .flat_map(|&v| last_g.neighbors(v).iter().copied())
                    .filter(|w| !hs.contains(w) && r.f.vertices.contains(w))
                    .collect();
                nf.is_empty() || parts.iter().any(|p| nf.iter().all(|w| p.binary_search(w).is_ok()))
            });
            CactusEvidence {
                round: i + 1,
                is_cactus,
                contains_previous,
                x_included,
                components_two_connected,
                crossing_edges_on_cycle,
                neighborhood_in_new_part,
            }
        })
        .collect()
}

/// Spanning-so-far cactus rounds on a truncation: the rounds run inside the
/// block of the core that contains the root.
pub fn spanning_cactus_rounds_on(t: &Truncation, rounds: usize) -> Result<CactusRun> {
    let bd = blocks(&t.core);
    let blk = bd
        .blocks
        .iter()
        .find(|b| !b.is_bridge() && b.vertices.binary_search(&t.root).is_ok())
        .ok_or_else(|| Error::Input(format!("{} lies in no 2-connected block; host is not 2-connected", t.spec)))?;
    let keep: VSet = blk.vertices.iter().copied().collect();
    let (sub, map) = t.core.induced(&keep);
    let run = spanning_cactus_rounds(&sub, pos(&map, t.root), rounds)?;
    let lift_set = |s: &VSet| -> VSet { s.iter().map(|&v| map[v]).collect() };
    let lift_seq = |s: &[usize]| -> Vec<usize> { s.iter().map(|&v| map[v]).collect() };
    let mut out = Vec::new();
    for r in run.rounds {
        let vs = lift_set(&r.f.vertices);
        let es: Vec<Edge> = r.f.edges.iter().map(|&(a, b)| norm((map[a], map[b]))).collect();
        let f = to_cactus(&t.core, &(vs, es))?;
        out.push(CactusRound {
            f,
            x: map[r.x],
            attachments: r
                .attachments
                .iter()
                .map(|a| Attachment { component: lift_seq(&a.component), cycle: lift_seq(&a.cycle) })
                .collect(),
        });
    }
    Ok(CactusRun { rounds: out, evidence: run.evidence, spanning: false })
}
