#![allow(dead_code)]

use prismcirc::graph::{Edge, Multigraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn graph(n: usize, edges: &[(usize, usize)]) -> Multigraph {
    let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let es: Vec<(String, String)> = edges.iter().map(|&(a, b)| (a.to_string(), b.to_string())).collect();
    Multigraph::new(&names, &es).unwrap()
}

/// Index of the vertex named `i`.
pub fn v(g: &Multigraph, i: usize) -> usize {
    g.id(&i.to_string()).unwrap()
}

pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Multigraph {
    let mut es = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p) {
                es.push((a, b));
            }
        }
    }
    graph(n, &es)
}

pub fn random_connected(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Multigraph {
    let mut es: Vec<(usize, usize)> = (1..n).map(|i| (rng.gen_range(0..i), i)).collect();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p) && !es.contains(&(a, b)) {
                es.push((a, b));
            }
        }
    }
    graph(n, &es)
}

pub fn random_tree(rng: &mut ChaCha8Rng, n: usize) -> Multigraph {
    let es: Vec<(usize, usize)> = (1..n).map(|i| (rng.gen_range(0..i), i)).collect();
    graph(n, &es)
}

/// Connectivity of `g` restricted to vertices with `alive`, ignoring `skip` edges.
pub fn connected_between(g: &Multigraph, a: usize, b: usize, alive: &[bool], skip: &[Edge]) -> bool {
    let mut seen = vec![false; g.n()];
    let mut st = vec![a];
    seen[a] = true;
    while let Some(x) = st.pop() {
        if x == b {
            return true;
        }
        for &y in g.neighbors(x) {
            let e = if x < y { (x, y) } else { (y, x) };
            if alive[y] && !seen[y] && !skip.contains(&e) {
                seen[y] = true;
                st.push(y);
            }
        }
    }
    false
}

/// Exhaustive local vertex connectivity: multiplicity of the direct edge plus
/// the least number of other vertices whose removal separates `a` from `b`.
pub fn brute_local_connectivity(g: &Multigraph, a: usize, b: usize) -> usize {
    let direct = g.multiplicity(a, b);
    let skip = if direct > 0 { vec![if a < b { (a, b) } else { (b, a) }] } else { vec![] };
    let others: Vec<usize> = (0..g.n()).filter(|&x| x != a && x != b).collect();
    for k in 0..=others.len() {
        let mut found = false;
        for_each_subset(&others, k, &mut |sub| {
            if found {
                return;
            }
            let mut alive = vec![true; g.n()];
            for &x in sub {
                alive[x] = false;
            }
            if !connected_between(g, a, b, &alive, &skip) {
                found = true;
            }
        });
        if found {
            return direct + k;
        }
    }
    direct + others.len()
}

pub fn for_each_subset(items: &[usize], k: usize, f: &mut dyn FnMut(&[usize])) {
    fn rec(items: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..items.len() {
            if items.len() - i < k - cur.len() {
                break;
            }
            cur.push(items[i]);
            rec(items, k, i + 1, cur, f);
            cur.pop();
        }
    }
    rec(items, k, 0, &mut Vec::new(), f);
}

/// Exhaustive local edge connectivity.
pub fn brute_edge_connectivity(g: &Multigraph, a: usize, b: usize) -> usize {
    let edges = g.edges();
    let idx: Vec<usize> = (0..edges.len()).collect();
    let alive = vec![true; g.n()];
    for k in 0..=edges.len() {
        let mut found = false;
        for_each_subset(&idx, k, &mut |sub| {
            if found {
                return;
            }
            let mut rest = g.edges();
            let mut removed: Vec<usize> = sub.to_vec();
            removed.sort_unstable_by(|x, y| y.cmp(x));
            for r in removed {
                rest.remove(r);
            }
            let h = g.with_edges(&rest);
            if !connected_between(&h, a, b, &alive, &[]) {
                found = true;
            }
        });
        if found {
            return k;
        }
    }
    edges.len()
}

/// Edge-disjoint path count by plain DFS augmentation on a capacity map;
/// independent of the library's flow kernel.
pub fn oracle_edge_flow(g: &Multigraph, s: usize, t: usize, removed: &[bool]) -> usize {
    use std::collections::HashMap;
    let mut cap: HashMap<(usize, usize), i64> = HashMap::new();
    for (a, b) in g.edges() {
        if removed[a] || removed[b] {
            continue;
        }
        *cap.entry((a, b)).or_default() += 1;
        *cap.entry((b, a)).or_default() += 1;
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); g.n()];
    for &(a, b) in cap.keys() {
        adj[a].push(b);
    }
    fn dfs(x: usize, t: usize, seen: &mut [bool], adj: &[Vec<usize>], cap: &mut HashMap<(usize, usize), i64>) -> bool {
        if x == t {
            return true;
        }
        seen[x] = true;
        for &y in &adj[x] {
            if !seen[y] && cap[&(x, y)] > 0 && dfs(y, t, seen, adj, cap) {
                *cap.get_mut(&(x, y)).unwrap() -= 1;
                *cap.get_mut(&(y, x)).unwrap() += 1;
                return true;
            }
        }
        false
    }
    let mut flow = 0;
    loop {
        let mut seen = vec![false; g.n()];
        if !dfs(s, t, &mut seen, &adj, &mut cap) {
            return flow;
        }
        flow += 1;
    }
}

/// Bipartite, connected and free of cut vertices, checked from scratch.
pub fn oracle_two_connected_bipartite(g: &Multigraph, edges: &[Edge]) -> bool {
    let vs: std::collections::BTreeSet<usize> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
    if vs.len() < 2 {
        return false;
    }
    let h = g.with_edges(edges);
    let mut color = vec![u8::MAX; g.n()];
    let first = *vs.iter().next().unwrap();
    color[first] = 0;
    let mut st = vec![first];
    while let Some(x) = st.pop() {
        for &y in h.neighbors(x) {
            if color[y] == u8::MAX {
                color[y] = 1 - color[x];
                st.push(y);
            } else if color[y] == color[x] {
                return false;
            }
        }
    }
    if vs.iter().any(|&v| color[v] == u8::MAX) {
        return false;
    }
    if vs.len() == 2 {
        return edges.len() >= 2;
    }
    for &cut in &vs {
        let mut alive = vec![false; g.n()];
        for &v in &vs {
            alive[v] = v != cut;
        }
        let rest: Vec<usize> = vs.iter().copied().filter(|&v| v != cut).collect();
        if rest.iter().any(|&v| !connected_between(&h, rest[0], v, &alive, &[])) {
            return false;
        }
    }
    true
}

/// Connected on the given vertices, at least 3 of them, and no single vertex
/// removal disconnects; checked by plain search.
pub fn oracle_two_connected(g: &Multigraph, vs: &[usize]) -> bool {
    let set: std::collections::BTreeSet<usize> = vs.iter().copied().collect();
    if set.len() < 3 {
        return false;
    }
    let h = g.induced(&set).0;
    let all: Vec<usize> = (0..h.n()).collect();
    for cut in std::iter::once(usize::MAX).chain(all.iter().copied()) {
        let alive: Vec<bool> = (0..h.n()).map(|v| v != cut).collect();
        let rest: Vec<usize> = all.iter().copied().filter(|&v| v != cut).collect();
        if rest.iter().any(|&v| !connected_between(&h, rest[0], v, &alive, &[])) {
            return false;
        }
    }
    true
}

/// Cactus check without block decomposition: connected and subcubic, the
/// edges lying on cycles form vertex-disjoint simple cycles, and vertices
/// off those cycles have degree at most 2.
pub fn oracle_is_cactus(g: &Multigraph, vs: &[usize], edges: &[Edge]) -> bool {
    let h = g.with_edges(edges);
    let alive: Vec<bool> = (0..g.n()).map(|v| vs.contains(&v)).collect();
    if vs.iter().any(|&v| !connected_between(&h, vs[0], v, &alive, &[])) {
        return false;
    }
    if vs.iter().any(|&v| h.degree(v) > 3) || edges.iter().any(|&(a, b)| !vs.contains(&a) || !vs.contains(&b)) {
        return false;
    }
    let on_cycle: Vec<Edge> = edges
        .iter()
        .copied()
        .filter(|&(a, b)| {
            let mut rest = edges.to_vec();
            let i = rest.iter().position(|&e| e == (a, b)).unwrap();
            rest.remove(i);
            connected_between(&g.with_edges(&rest), a, b, &alive, &[])
        })
        .collect();
    let c = g.with_edges(&on_cycle);
    for &v in vs {
        let d = c.degree(v);
        if d != 0 && d != 2 {
            return false;
        }
        if d == 0 && h.degree(v) > 2 {
            return false;
        }
    }
    true
}

/// A cactus on `0..n` built from units: cycles (as vertex sequences) and
/// single vertices, joined by bridges.
#[derive(Clone, Debug)]
pub struct TestCactus {
    pub n: usize,
    pub cycles: Vec<Vec<usize>>,
    pub bridges: Vec<(usize, usize)>,
}

impl TestCactus {
    pub fn unit_cycle(len: usize) -> Self {
        TestCactus { n: len, cycles: vec![(0..len).collect()], bridges: Vec::new() }
    }

    pub fn unit_vertex() -> Self {
        TestCactus { n: 1, cycles: Vec::new(), bridges: Vec::new() }
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut es = self.bridges.clone();
        for c in &self.cycles {
            for i in 0..c.len() {
                es.push((c[i], c[(i + 1) % c.len()]));
            }
        }
        es
    }

    pub fn graph(&self) -> Multigraph {
        graph(self.n, &self.edges())
    }

    fn cycle_of(&self, v: usize) -> Option<usize> {
        self.cycles.iter().position(|c| c.contains(&v))
    }

    fn bridge_degree(&self, v: usize) -> usize {
        self.bridges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    /// Whether a new bridge may start at `v`.
    pub fn open(&self, v: usize) -> bool {
        let limit = if self.cycle_of(v).is_some() { 1 } else { 2 };
        self.bridge_degree(v) < limit
    }

    /// Attaches a new vertex (`len == 1`) or a new cycle of length `len` by a
    /// bridge from `v`.
    pub fn attach(&self, v: usize, len: usize) -> Self {
        let mut c = self.clone();
        let base = c.n;
        c.n += len;
        if len > 1 {
            c.cycles.push((base..base + len).collect());
        }
        c.bridges.push((v, base));
        c
    }

    fn enc(&self, v: usize, from: Option<(bool, usize, usize)>) -> String {
        let mut kids: Vec<String> = Vec::new();
        if let Some(ci) = self.cycle_of(v) {
            if from != Some((true, ci, 0)) {
                let c = &self.cycles[ci];
                let i = c.iter().position(|&x| x == v).unwrap();
                let k = c.len();
                let dir = |step: usize| -> String {
                    let parts: Vec<String> =
                        (1..k).map(|j| self.enc(c[(i + j * step) % k], Some((true, ci, 0)))).collect();
                    format!("C[{}]", parts.join(","))
                };
                kids.push(dir(1).min(dir(k - 1)));
            }
        }
        for &(a, b) in &self.bridges {
            let w = if a == v { b } else if b == v { a } else { continue };
            if from == Some((false, v.min(w), v.max(w))) {
                continue;
            }
            kids.push(format!("B{}", self.enc(w, Some((false, v.min(w), v.max(w))))));
        }
        kids.sort();
        format!("({})", kids.concat())
    }

    /// Canonical code: least rooted encoding over all roots.
    pub fn code(&self) -> String {
        (0..self.n).map(|r| self.enc(r, None)).min().unwrap()
    }
}

/// Every even cactus with 2 to `max_n` vertices, one per isomorphism class.
pub fn even_cacti_up_to(max_n: usize) -> Vec<TestCactus> {
    use std::collections::HashSet;
    let mut seen: HashSet<String> = HashSet::new();
    let mut by_size: Vec<Vec<TestCactus>> = vec![Vec::new(); max_n + 1];
    let mut add = |c: TestCactus, by_size: &mut Vec<Vec<TestCactus>>| {
        if seen.insert(c.code()) {
            let n = c.n;
            by_size[n].push(c);
        }
    };
    add(TestCactus::unit_vertex(), &mut by_size);
    for len in (4..=max_n).step_by(2) {
        add(TestCactus::unit_cycle(len), &mut by_size);
    }
    for n in 1..max_n {
        let here = by_size[n].clone();
        for c in &here {
            for v in 0..c.n {
                if !c.open(v) {
                    continue;
                }
                add(c.attach(v, 1), &mut by_size);
                let mut len = 4;
                while n + len <= max_n {
                    add(c.attach(v, len), &mut by_size);
                    len += 2;
                }
            }
        }
    }
    by_size.into_iter().skip(2).flatten().collect()
}

/// A random even cactus grown to about `target` vertices.
pub fn random_even_cactus(rng: &mut ChaCha8Rng, target: usize) -> TestCactus {
    let mut c = if rng.gen_bool(0.5) { TestCactus::unit_cycle(2 * rng.gen_range(2..4)) } else { TestCactus::unit_vertex() };
    while c.n < target {
        let open: Vec<usize> = (0..c.n).filter(|&v| c.open(v)).collect();
        if open.is_empty() {
            break;
        }
        let v = open[rng.gen_range(0..open.len())];
        let len = if rng.gen_bool(0.4) { 1 } else { 2 * rng.gen_range(2..5) };
        c = c.attach(v, len);
    }
    if c.n < 2 {
        c = c.attach(0, 1);
    }
    c
}

/// Whether `cycle` (prism ids `a|s`) visits every vertex of `base □ K2` once
/// with consecutive vertices adjacent.
pub fn oracle_prism_ham(base: &Multigraph, cycle: &[String]) -> bool {
    use std::collections::HashSet;
    let split = |s: &str| -> Option<(String, String)> {
        let (a, b) = s.rsplit_once('|')?;
        Some((a.to_string(), b.to_string()))
    };
    if cycle.len() != 2 * base.n() || cycle.len() < 3 {
        return false;
    }
    let mut seen = HashSet::new();
    for c in cycle {
        match split(c) {
            Some((a, s)) if base.index(&a).is_some() && (s == "0" || s == "1") => {
                if !seen.insert(c.clone()) {
                    return false;
                }
            }
            _ => return false,
        }
    }
    let base_edges: HashSet<(String, String)> =
        base.edge_names().into_iter().flat_map(|(a, b)| [(a.clone(), b.clone()), (b, a)]).collect();
    (0..cycle.len()).all(|i| {
        let (a, s) = split(&cycle[i]).unwrap();
        let (b, t) = split(&cycle[(i + 1) % cycle.len()]).unwrap();
        (a == b && s != t) || (s == t && base_edges.contains(&(a, b)))
    })
}

fn rooted_code(adj: &[Vec<usize>], v: usize, p: usize) -> String {
    let mut kids: Vec<String> = adj[v].iter().filter(|&&w| w != p).map(|&w| rooted_code(adj, w, v)).collect();
    kids.sort();
    format!("({})", kids.concat())
}

/// Canonical code of a tree given by parent-free edge list on `0..n`.
pub fn tree_code(n: usize, edges: &[(usize, usize)]) -> String {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    (0..n).map(|r| rooted_code(&adj, r, usize::MAX)).min().unwrap()
}

/// All unlabeled trees on `1..=max_n` vertices, as edge lists.
pub fn trees_up_to(max_n: usize) -> Vec<Vec<(usize, usize)>> {
    let mut level: Vec<Vec<(usize, usize)>> = vec![vec![]];
    let mut out = level.clone();
    for n in 1..max_n {
        let mut seen = std::collections::BTreeSet::new();
        let mut next = Vec::new();
        for t in &level {
            for v in 0..n {
                let mut e = t.clone();
                e.push((v, n));
                if seen.insert(tree_code(n + 1, &e)) {
                    next.push(e);
                }
            }
        }
        out.extend(next.iter().cloned());
        level = next;
    }
    out
}
