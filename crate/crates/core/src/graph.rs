//! Finite multigraphs over opaque string ids.
//!
//! Vertices are stored in canonical id order (shorter ids first, then
//! bytewise), so vertex index order and canonical order coincide and every
//! "least id first" tie-break is a comparison of indices.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::error::{input, Error, Result};

pub type VSet = BTreeSet<usize>;
pub type Edge = (usize, usize);

/// Total order on vertex ids: length first, then bytes.
pub fn canonical_cmp(a: &str, b: &str) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

pub fn norm(e: Edge) -> Edge {
    if e.0 <= e.1 {
        e
    } else {
        (e.1, e.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Multigraph {
    names: Vec<String>,
    adj: Vec<Vec<usize>>,
}

impl Multigraph {
    /// Builds a graph from ids; repeated edges are parallel edges.
    pub fn new<S: AsRef<str>>(vertices: &[S], edges: &[(S, S)]) -> Result<Self> {
        let mut names: Vec<String> = vertices.iter().map(|s| s.as_ref().to_string()).collect();
        names.sort_by(|a, b| canonical_cmp(a, b));
        let before = names.len();
        names.dedup();
        if names.len() != before {
            return input("duplicate vertex id");
        }
        let index: HashMap<&str, usize> =
            names.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let mut es = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            let (a, b) = (a.as_ref(), b.as_ref());
            let ia = *index.get(a).ok_or_else(|| Error::Input(format!("unknown vertex {a}")))?;
            let ib = *index.get(b).ok_or_else(|| Error::Input(format!("unknown vertex {b}")))?;
            if ia == ib {
                return input(format!("self-loop at {a}"));
            }
            es.push((ia, ib));
        }
        Ok(Self::from_sorted(names, &es))
    }

    /// Builds a graph whose vertex set is the set of edge endpoints.
    pub fn from_edge_list<S: AsRef<str>>(edges: &[(S, S)]) -> Result<Self> {
        let mut vs: BTreeSet<String> = BTreeSet::new();
        for (a, b) in edges {
            vs.insert(a.as_ref().to_string());
            vs.insert(b.as_ref().to_string());
        }
        let vs: Vec<String> = vs.into_iter().collect();
        let es: Vec<(String, String)> = edges
            .iter()
            .map(|(a, b)| (a.as_ref().to_string(), b.as_ref().to_string()))
            .collect();
        Self::new(&vs, &es)
    }

    /// `names` must already be canonically sorted and unique.
    pub(crate) fn from_sorted(names: Vec<String>, edges: &[Edge]) -> Self {
        debug_assert!(names.windows(2).all(|w| canonical_cmp(&w[0], &w[1]) == Ordering::Less));
        let mut adj = vec![Vec::new(); names.len()];
        for &(a, b) in edges {
            debug_assert!(a != b);
            adj[a].push(b);
            adj[b].push(a);
        }
        for l in &mut adj {
            l.sort_unstable();
        }
        Multigraph { names, adj }
    }

    /// Builds from arbitrary (unsorted) names and index edges into that list.
    pub(crate) fn from_unsorted(names: Vec<String>, edges: &[Edge]) -> Result<Self> {
        let mut order: Vec<usize> = (0..names.len()).collect();
        order.sort_by(|&a, &b| canonical_cmp(&names[a], &names[b]));
        let mut pos = vec![0; names.len()];
        for (p, &o) in order.iter().enumerate() {
            pos[o] = p;
        }
        let sorted: Vec<String> = order.iter().map(|&o| names[o].clone()).collect();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return input("duplicate vertex id");
        }
        let es: Vec<Edge> = edges.iter().map(|&(a, b)| (pos[a], pos[b])).collect();
        if es.iter().any(|&(a, b)| a == b) {
            return input("self-loop");
        }
        Ok(Self::from_sorted(sorted, &es))
    }

    /// Same vertex set, different edges.
    pub fn with_edges(&self, edges: &[Edge]) -> Self {
        Self::from_sorted(self.names.clone(), edges)
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn m(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index(&self, id: &str) -> Option<usize> {
        self.names.binary_search_by(|p| canonical_cmp(p, id)).ok()
    }

    pub fn id(&self, id: &str) -> Result<usize> {
        self.index(id).ok_or_else(|| Error::Input(format!("unknown vertex {id}")))
    }

    pub fn ids<S: AsRef<str>>(&self, ids: &[S]) -> Result<VSet> {
        ids.iter().map(|s| self.id(s.as_ref())).collect()
    }

    pub fn set_names(&self, s: &VSet) -> Vec<String> {
        s.iter().map(|&v| self.names[v].clone()).collect()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    /// Distinct neighbours in index order.
    pub fn distinct_neighbors(&self, v: usize) -> Vec<usize> {
        let mut out = self.adj[v].clone();
        out.dedup();
        out
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn multiplicity(&self, u: usize, v: usize) -> usize {
        self.adj[u].iter().filter(|&&w| w == v).count()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn is_simple(&self) -> bool {
        self.adj.iter().all(|l| l.windows(2).all(|w| w[0] != w[1]))
    }

    /// Edge multiset as normalized pairs `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::with_capacity(self.m());
        for (u, l) in self.adj.iter().enumerate() {
            for &v in l {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn edge_names(&self) -> Vec<(String, String)> {
        self.edges()
            .into_iter()
            .map(|(a, b)| (self.names[a].clone(), self.names[b].clone()))
            .collect()
    }

    pub fn check_set(&self, s: &VSet) -> Result<()> {
        match s.iter().next_back() {
            Some(&v) if v >= self.n() => input(format!("vertex index {v} out of range")),
            _ => Ok(()),
        }
    }

    /// Induced subgraph; returns the graph and the new-to-old index map.
    pub fn induced(&self, keep: &VSet) -> (Multigraph, Vec<usize>) {
        let old: Vec<usize> = keep.iter().copied().collect();
        let mut new_of = vec![usize::MAX; self.n()];
        for (i, &o) in old.iter().enumerate() {
            new_of[o] = i;
        }
        let mut es = Vec::new();
        for &u in &old {
            for &v in &self.adj[u] {
                if u < v && new_of[v] != usize::MAX {
                    es.push((new_of[u], new_of[v]));
                }
            }
        }
        let names = old.iter().map(|&o| self.names[o].clone()).collect();
        (Multigraph::from_sorted(names, &es), old)
    }

    /// Subgraph on the endpoints of `edges` (which index into `self`).
    pub fn edge_induced(&self, edges: &[Edge]) -> (Multigraph, Vec<usize>) {
        let keep: VSet = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
        let old: Vec<usize> = keep.iter().copied().collect();
        let mut new_of = vec![usize::MAX; self.n()];
        for (i, &o) in old.iter().enumerate() {
            new_of[o] = i;
        }
        let es: Vec<Edge> = edges.iter().map(|&(a, b)| (new_of[a], new_of[b])).collect();
        let names = old.iter().map(|&o| self.names[o].clone()).collect();
        (Multigraph::from_sorted(names, &es), old)
    }

    /// Looks up every vertex of `self` in `host` by id.
    pub fn embed_in(&self, host: &Multigraph) -> Result<Vec<usize>> {
        self.names.iter().map(|s| host.id(s)).collect()
    }
}

/// Breadth-first distances from `src` (usize::MAX when unreachable).
pub fn bfs_dist(g: &Multigraph, src: usize) -> Vec<usize> {
    bfs_dist_multi(g, &[src], &[])
}

pub fn bfs_dist_multi(g: &Multigraph, srcs: &[usize], blocked: &[bool]) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.n()];
    let mut q = VecDeque::new();
    for &s in srcs {
        if dist[s] == usize::MAX {
            dist[s] = 0;
            q.push_back(s);
        }
    }
    while let Some(u) = q.pop_front() {
        for &w in g.neighbors(u) {
            if dist[w] == usize::MAX && !blocked.get(w).copied().unwrap_or(false) {
                dist[w] = dist[u] + 1;
                q.push_back(w);
            }
        }
    }
    dist
}

/// Shortest path from `s` to `t` avoiding blocked vertices, least ids first.
pub fn shortest_path(g: &Multigraph, s: usize, t: usize, blocked: &[bool]) -> Option<Vec<usize>> {
    let mut prev = vec![usize::MAX; g.n()];
    let mut seen = vec![false; g.n()];
    let mut q = VecDeque::new();
    seen[s] = true;
    q.push_back(s);
    while let Some(u) = q.pop_front() {
        if u == t {
            let mut path = vec![t];
            let mut c = t;
            while c != s {
                c = prev[c];
                path.push(c);
            }
            path.reverse();
            return Some(path);
        }
        for &w in g.neighbors(u) {
            if !seen[w] && (w == t || !blocked.get(w).copied().unwrap_or(false)) {
                seen[w] = true;
                prev[w] = u;
                q.push_back(w);
            }
        }
    }
    None
}

/// Connected components of `g - removed`, each sorted, ordered by least vertex.
pub fn components(g: &Multigraph, removed: &VSet) -> Result<Vec<Vec<usize>>> {
    g.check_set(removed)?;
    let mut blocked = vec![false; g.n()];
    for &r in removed {
        blocked[r] = true;
    }
    Ok(components_masked(g, &blocked))
}

/// Components of the unblocked vertices, each sorted, ordered by least vertex.
pub fn components_masked(g: &Multigraph, blocked: &[bool]) -> Vec<Vec<usize>> {
    let mut comp = vec![usize::MAX; g.n()];
    let mut out = Vec::new();
    for s in 0..g.n() {
        if blocked[s] || comp[s] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut part = vec![s];
        comp[s] = id;
        let mut i = 0;
        while i < part.len() {
            let u = part[i];
            i += 1;
            for &w in g.neighbors(u) {
                if !blocked[w] && comp[w] == usize::MAX {
                    comp[w] = id;
                    part.push(w);
                }
            }
        }
        part.sort_unstable();
        out.push(part);
    }
    out
}

pub fn is_connected(g: &Multigraph) -> bool {
    g.n() <= 1 || components_masked(g, &vec![false; g.n()]).len() == 1
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Zones {
    /// Neighbours of S outside S.
    pub n: VSet,
    /// Vertices of S with a neighbour outside S.
    pub z: VSet,
    /// S minus Z.
    pub i: VSet,
}

pub fn zones(g: &Multigraph, s: &VSet) -> Result<Zones> {
    g.check_set(s)?;
    let mut n = VSet::new();
    let mut z = VSet::new();
    for &v in s {
        for &w in g.neighbors(v) {
            if !s.contains(&w) {
                n.insert(w);
                z.insert(v);
            }
        }
    }
    let i = s.difference(&z).copied().collect();
    Ok(Zones { n, z, i })
}

/// Vertices outside `s` adjacent to `s`.
pub fn neighborhood(g: &Multigraph, s: &VSet) -> VSet {
    let mut n = VSet::new();
    for &v in s {
        for &w in g.neighbors(v) {
            if !s.contains(&w) {
                n.insert(w);
            }
        }
    }
    n
}

/// Quotient multigraph; each class is named after its least member.
/// Returns the quotient and the vertex-to-class map (classes in input order).
pub fn quotient(g: &Multigraph, partition: &[Vec<usize>]) -> Result<(Multigraph, Vec<usize>)> {
    let mut class = vec![usize::MAX; g.n()];
    for (i, part) in partition.iter().enumerate() {
        if part.is_empty() {
            return input("empty class in partition");
        }
        for &v in part {
            if v >= g.n() {
                return input(format!("vertex index {v} out of range"));
            }
            if class[v] != usize::MAX {
                return input(format!("vertex {} in two classes", g.name(v)));
            }
            class[v] = i;
        }
    }
    if let Some(v) = class.iter().position(|&c| c == usize::MAX) {
        return input(format!("vertex {} not covered by partition", g.name(v)));
    }
    let names: Vec<String> = partition
        .iter()
        .map(|p| g.name(*p.iter().min().unwrap()).to_string())
        .collect();
    let mut es = Vec::new();
    for (u, v) in g.edges() {
        if class[u] != class[v] {
            es.push((class[u], class[v]));
        }
    }
    let q = Multigraph::from_unsorted(names, &es)?;
    // map class index (input order) to quotient vertex index
    let mut out = vec![0; g.n()];
    for (v, &c) in class.iter().enumerate() {
        let rep = partition[c].iter().min().unwrap();
        out[v] = q.index(g.name(*rep)).unwrap();
    }
    Ok((q, out))
}

#[derive(Clone, Debug)]
pub struct Cleaved {
    pub graph: Multigraph,
    /// The added edge, as indices into `graph`.
    pub e: Edge,
    pub first: String,
    pub second: String,
}

/// Replaces `v` by two adjacent vertices; the neighbours listed in `side`
/// (a sub-multiset of v's neighbours) go to the first one.
pub fn cleave(g: &Multigraph, v: usize, side: &[usize]) -> Result<Cleaved> {
    if v >= g.n() {
        return input("vertex out of range");
    }
    let mut rest: Vec<usize> = g.neighbors(v).to_vec();
    for &s in side {
        match rest.iter().position(|&r| r == s) {
            Some(p) => {
                rest.remove(p);
            }
            None => return input(format!("{} is not an unused neighbour of {}", g.name(s), g.name(v))),
        }
    }
    if side.is_empty() || rest.is_empty() {
        return input("cleave needs two nonempty sides");
    }
    let first = format!("{}:1", g.name(v));
    let second = format!("{}:2", g.name(v));
    if g.index(&first).is_some() || g.index(&second).is_some() {
        return input("cleave id collision");
    }
    let mut names: Vec<String> = g.names().to_vec();
    names[v] = first.clone();
    let b = names.len();
    names.push(second.clone());
    let mut es = Vec::new();
    for (x, y) in g.edges() {
        if x != v && y != v {
            es.push((x, y));
        }
    }
    for &s in side {
        es.push((v, s));
    }
    for &r in &rest {
        es.push((b, r));
    }
    es.push((v, b));
    let graph = Multigraph::from_unsorted(names, &es)?;
    let e = (graph.id(&first)?, graph.id(&second)?);
    Ok(Cleaved { graph, e: norm(e), first, second })
}

/// Contracts the edge between `a` and `b` into a vertex named `name`.
pub fn contract(g: &Multigraph, a: usize, b: usize, name: &str) -> Result<Multigraph> {
    if a == b || !g.has_edge(a, b) {
        return input("contract needs an edge");
    }
    let (a, b) = norm((a, b));
    if let Some(i) = g.index(name) {
        if i != a && i != b {
            return input("contract id collision");
        }
    }
    let mut names = Vec::with_capacity(g.n() - 1);
    let mut map = vec![0; g.n()];
    for v in 0..g.n() {
        if v == b {
            continue;
        }
        map[v] = names.len();
        names.push(if v == a { name.to_string() } else { g.name(v).to_string() });
    }
    map[b] = map[a];
    let mut es = Vec::new();
    let mut dropped = false;
    for (x, y) in g.edges() {
        if (x, y) == (a, b) && !dropped {
            dropped = true;
            continue;
        }
        let (p, q) = (map[x], map[y]);
        if p == q {
            return input("contraction would create a loop");
        }
        es.push((p, q));
    }
    Multigraph::from_unsorted(names, &es)
}

pub fn product_id(a: &str, b: &str) -> String {
    format!("{a}|{b}")
}

/// Id of a prism vertex (`side` is 0 or 1).
pub fn prism_id(a: &str, side: u8) -> String {
    product_id(a, if side == 0 { "0" } else { "1" })
}

/// Splits a prism id back into the base id and side.
pub fn split_prism_id(id: &str) -> Option<(&str, u8)> {
    let (base, s) = id.rsplit_once('|')?;
    match s {
        "0" => Some((base, 0)),
        "1" => Some((base, 1)),
        _ => None,
    }
}

pub fn cartesian_product(g: &Multigraph, d: &Multigraph) -> Result<Multigraph> {
    if d.n() == 0 {
        return input("second factor is empty");
    }
    let nd = d.n();
    let mut names = Vec::with_capacity(g.n() * nd);
    for a in g.names() {
        for b in d.names() {
            names.push(product_id(a, b));
        }
    }
    let mut es = Vec::new();
    for (x, y) in g.edges() {
        for j in 0..nd {
            es.push((x * nd + j, y * nd + j));
        }
    }
    for i in 0..g.n() {
        for (p, q) in d.edges() {
            es.push((i * nd + p, i * nd + q));
        }
    }
    Multigraph::from_unsorted(names, &es)
}

pub fn k2() -> Multigraph {
    Multigraph::from_sorted(vec!["0".into(), "1".into()], &[(0, 1)])
}

/// `g □ K2`; vertex `(v, s)` is found with `prism_index`.
pub fn prism(g: &Multigraph) -> Multigraph {
    cartesian_product(g, &k2()).expect("K2 is nonempty")
}

pub fn prism_index(p: &Multigraph, base: &Multigraph, v: usize, side: u8) -> usize {
    p.index(&prism_id(base.name(v), side)).expect("prism vertex")
}

#[derive(Clone, Debug)]
pub struct LineGraph {
    pub graph: Multigraph,
    /// Line-graph vertex index -> edge of the base graph.
    pub edge_of: Vec<Edge>,
}

impl LineGraph {
    pub fn vertex_of(&self, e: Edge) -> Option<usize> {
        let e = norm(e);
        self.edge_of.iter().position(|&f| f == e)
    }
}

pub fn line_vertex_id(g: &Multigraph, e: Edge) -> String {
    let (a, b) = norm(e);
    format!("{}~{}", g.name(a), g.name(b))
}

pub fn line_graph(g: &Multigraph) -> Result<LineGraph> {
    if !g.is_simple() {
        return Err(Error::Unsupported("line graph of a multigraph".into()));
    }
    let edges = g.edges();
    let names: Vec<String> = edges.iter().map(|&e| line_vertex_id(g, e)).collect();
    let mut at: Vec<Vec<usize>> = vec![Vec::new(); g.n()];
    for (i, &(a, b)) in edges.iter().enumerate() {
        at[a].push(i);
        at[b].push(i);
    }
    let mut es = Vec::new();
    for l in &at {
        for i in 0..l.len() {
            for j in i + 1..l.len() {
                es.push((l[i], l[j]));
            }
        }
    }
    let graph = Multigraph::from_unsorted(names, &es)?;
    let mut edge_of = vec![(0, 0); edges.len()];
    for &e in &edges {
        edge_of[graph.index(&line_vertex_id(g, e)).unwrap()] = e;
    }
    Ok(LineGraph { graph, edge_of })
}

/// Simple graph joining vertices at distance at most `k`.
pub fn power(g: &Multigraph, k: usize) -> Result<Multigraph> {
    if k < 1 {
        return input("power needs k >= 1");
    }
    let mut es = Vec::new();
    for s in 0..g.n() {
        let mut dist: BTreeMap<usize, usize> = BTreeMap::new();
        dist.insert(s, 0);
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            let d = dist[&u];
            if d == k {
                continue;
            }
            for &w in g.neighbors(u) {
                if let std::collections::btree_map::Entry::Vacant(e) = dist.entry(w) {
                    e.insert(d + 1);
                    q.push_back(w);
                }
            }
        }
        for &t in dist.keys() {
            if t > s {
                es.push((s, t));
            }
        }
    }
    Ok(g.with_edges(&es))
}

pub fn degree_in(edges: &[Edge], v: usize) -> usize {
    edges.iter().filter(|&&(a, b)| a == v || b == v).count()
}

/// Vertex set touched by an edge list.
pub fn edge_vertices(edges: &[Edge]) -> VSet {
    edges.iter().flat_map(|&(a, b)| [a, b]).collect()
}
