//! Growing 2-connected bipartite subgraphs inside subcubic graphs, and the
//! round construction of a faithful spanning bipartite subgraph of a cubic
//! 3-connected graph.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{assertion, input, Error, Result};
use crate::flow::{fan, is_set_k_connected, pack, Mode, Packing, SetConnectivity, INF};
use crate::graph::{components_masked, norm, shortest_path, Edge, Multigraph, VSet};
use crate::infinite::{ball, mask, GeneratorGraph, Truncation};
use crate::search::{cycle_through, find_theta, CycleSearch, Theta};
use crate::structure::{bipartition, blocks, Bipartition};

/// Edge multiset check: every edge of `sub` is available in `g`.
pub(crate) fn edges_within(g: &Multigraph, sub: &[Edge]) -> bool {
    let mut count: HashMap<Edge, usize> = HashMap::new();
    for &e in sub {
        let e = norm(e);
        let c = count.entry(e).or_default();
        *c += 1;
        if e.0 >= g.n() || e.1 >= g.n() || *c > g.multiplicity(e.0, e.1) {
            return false;
        }
    }
    true
}

/// Whether `sub` is a sub-multiset of `sup`.
pub(crate) fn edge_subset(sub: &[Edge], sup: &[Edge]) -> bool {
    let mut count: HashMap<Edge, i64> = HashMap::new();
    for &e in sup {
        *count.entry(norm(e)).or_default() += 1;
    }
    sub.iter().all(|&e| {
        let c = count.entry(norm(e)).or_default();
        *c -= 1;
        *c >= 0
    })
}

fn endpoints(edges: &[Edge]) -> VSet {
    edges.iter().flat_map(|&(a, b)| [a, b]).collect()
}

fn sorted_edges(mut edges: Vec<Edge>) -> Vec<Edge> {
    for e in &mut edges {
        *e = norm(*e);
    }
    edges.sort_unstable();
    edges
}

/// A finite 2-connected bipartite subgraph with a proper 2-colouring.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BipartiteCertificate {
    pub vertices: VSet,
    pub edges: Vec<Edge>,
    pub coloring: BTreeMap<usize, u8>,
}

impl BipartiteCertificate {
    /// Colours the edge set and validates it.
    pub fn new(g: &Multigraph, edges: Vec<Edge>) -> Result<Self> {
        let edges = sorted_edges(edges);
        let vertices = endpoints(&edges);
        let coloring = match bipartition(&g.with_edges(&edges)) {
            Bipartition::Coloring(c) => vertices.iter().map(|&v| (v, c[v])).collect(),
            Bipartition::OddCycle(c) => {
                return input(format!("odd cycle through {}", g.name(c[0])));
            }
        };
        let cert = BipartiteCertificate { vertices, edges, coloring };
        cert.validate(g)?;
        Ok(cert)
    }

    /// The even cycle given as a closed vertex sequence.
    pub fn from_cycle(g: &Multigraph, cycle: &[usize]) -> Result<Self> {
        if cycle.len() < 2 {
            return input("cycle too short");
        }
        let edges = (0..cycle.len()).map(|i| (cycle[i], cycle[(i + 1) % cycle.len()])).collect();
        Self::new(g, edges)
    }

    pub fn validate(&self, g: &Multigraph) -> Result<()> {
        if self.edges.is_empty() {
            return input("empty subgraph");
        }
        if !edges_within(g, &self.edges) {
            return input("subgraph uses an edge missing from the host");
        }
        if endpoints(&self.edges) != self.vertices {
            return input("vertex set does not match edges");
        }
        let b = blocks(&g.with_edges(&self.edges));
        let spanning = b.blocks.len() == 1 && b.blocks[0].vertices.iter().copied().collect::<VSet>() == self.vertices;
        if !spanning || (self.vertices.len() == 2 && self.edges.len() < 2) {
            return input("subgraph is not 2-connected");
        }
        for &(a, b) in &self.edges {
            match (self.coloring.get(&a), self.coloring.get(&b)) {
                (Some(x), Some(y)) if x != y => {}
                _ => return input(format!("colouring fails on {}-{}", g.name(a), g.name(b))),
            }
        }
        Ok(())
    }

    pub fn graph(&self, g: &Multigraph) -> Multigraph {
        g.with_edges(&self.edges)
    }

    /// Adds the path `p` whose ends lie in the subgraph and whose inner
    /// vertices are new, colouring inner vertices from `p[0]`.
    fn add_ear(&mut self, g: &Multigraph, p: &[usize]) -> Result<()> {
        let c0 = self.coloring[&p[0]];
        let last = p.len() - 1;
        if (c0 as usize + last) % 2 != self.coloring[&p[last]] as usize {
            return assertion(format!("ear from {} has the wrong parity", g.name(p[0])));
        }
        for (k, &v) in p.iter().enumerate().take(last).skip(1) {
            if self.vertices.contains(&v) {
                return assertion("ear meets the subgraph inside");
            }
            self.vertices.insert(v);
            self.coloring.insert(v, ((c0 as usize + k) % 2) as u8);
        }
        for w in p.windows(2) {
            self.edges.push(norm((w[0], w[1])));
        }
        self.edges.sort_unstable();
        Ok(())
    }

    /// Adds two paths of a fan from `v`: the pair whose values of
    /// (length + colour of end) agree, least pair first.
    fn add_fan(&mut self, g: &Multigraph, fan: &[Vec<usize>]) -> Result<()> {
        let key = |p: &Vec<usize>| (p.len() - 1 + self.coloring[p.last().unwrap()] as usize) % 2;
        let (i, j) = parity_pair(&[key(&fan[0]), key(&fan[1]), key(&fan[2])]);
        let mut ear: Vec<usize> = fan[i].iter().rev().copied().collect();
        ear.extend(fan[j][1..].iter().copied());
        self.add_ear(g, &ear)
    }
}

/// Least pair of indices with equal parity among three values.
pub fn parity_pair(keys: &[usize; 3]) -> (usize, usize) {
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        if keys[i] % 2 == keys[j] % 2 {
            return (i, j);
        }
    }
    unreachable!("three parities always contain a repeat")
}

fn check_subcubic(g: &Multigraph) -> Result<()> {
    if g.max_degree() > 3 {
        return input(format!("graph is not subcubic (max degree {})", g.max_degree()));
    }
    Ok(())
}

fn check_three_connected(g: &Multigraph, s: &VSet) -> Result<()> {
    if s.len() < 2 {
        return Ok(());
    }
    match is_set_k_connected(g, s, 3)? {
        SetConnectivity::Connected => Ok(()),
        SetConnectivity::Violated { pair, found, cut } => input(format!(
            "{} and {} are joined by only {found} disjoint paths (cut {:?})",
            g.name(pair.0),
            g.name(pair.1),
            cut.vertices.iter().map(|&v| g.name(v)).collect::<Vec<_>>()
        )),
    }
}

/// Grows `d` by fans until it contains `s`.
pub fn absorb_set(g: &Multigraph, d: &BipartiteCertificate, s: &VSet) -> Result<BipartiteCertificate> {
    check_subcubic(g)?;
    g.check_set(s)?;
    d.validate(g)?;
    if s.is_disjoint(&d.vertices) {
        return input("target set does not meet the subgraph");
    }
    check_three_connected(g, s)?;
    let mut f = d.clone();
    while let Some(&v) = s.iter().find(|v| !f.vertices.contains(v)) {
        let paths = fan(g, v, &f.vertices, 3, &[])
            .ok_or_else(|| Error::Assertion(format!("no fan from {} to the subgraph", g.name(v))))?;
        f.add_fan(g, &paths)?;
    }
    f.validate(g)?;
    Ok(f)
}

/// A finite subgraph whose components are isolated vertices or
/// 2-connected bipartite graphs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cover {
    pub vertices: VSet,
    pub edges: Vec<Edge>,
}

impl Cover {
    pub fn components(&self, g: &Multigraph) -> Vec<Vec<usize>> {
        let outside: Vec<bool> = (0..g.n()).map(|v| !self.vertices.contains(&v)).collect();
        components_masked(&g.with_edges(&self.edges), &outside)
    }

    /// Edges of the component with vertex set `comp`.
    pub fn component_edges(&self, comp: &[usize]) -> Vec<Edge> {
        self.edges.iter().copied().filter(|&(a, _)| comp.binary_search(&a).is_ok()).collect()
    }

    pub fn union(&self, other: &Cover) -> Cover {
        let mut edges = self.edges.clone();
        edges.extend(&other.edges);
        edges.sort_unstable();
        Cover { vertices: self.vertices.union(&other.vertices).copied().collect(), edges }
    }

    /// Component shapes, then class containment.
    pub fn validate(&self, g: &Multigraph, classes: &[VSet]) -> Result<()> {
        if !edges_within(g, &self.edges) || !endpoints(&self.edges).is_subset(&self.vertices) {
            return input("cover edges are not host edges on its vertices");
        }
        let comps = self.components(g);
        let mut owner = vec![usize::MAX; g.n()];
        for (i, c) in comps.iter().enumerate() {
            for &v in c {
                owner[v] = i;
            }
            if c.len() > 1 {
                BipartiteCertificate::new(g, self.component_edges(c))
                    .map_err(|e| Error::Input(format!("cover component at {}: {e}", g.name(c[0]))))?;
            }
        }
        for u in classes {
            let owners: VSet = u.iter().map(|&v| owner[v]).collect();
            if owners.len() != 1 || owners.contains(&usize::MAX) {
                return input("a class is not inside one cover component");
            }
        }
        Ok(())
    }
}

/// A cover in which each class lies in one component.
pub fn component_bipartite_cover(g: &Multigraph, classes: &[VSet]) -> Result<Cover> {
    check_subcubic(g)?;
    for u in classes {
        g.check_set(u)?;
        check_three_connected(g, u)?;
    }
    let alive = vec![true; g.n()];
    let cover = cover_in(g, &alive, &g.edges(), classes)?;
    cover.validate(g, classes)?;
    Ok(cover)
}

/// The cover recursion on the ambient graph given by `alive` and `edges`.
fn cover_in(g: &Multigraph, alive: &[bool], edges: &[Edge], classes: &[VSet]) -> Result<Cover> {
    let singles: VSet = classes.iter().flatten().copied().collect();
    let Some(u) = classes.iter().find(|u| u.len() >= 2) else {
        return Ok(Cover { vertices: singles, edges: Vec::new() });
    };
    let amb = g.with_edges(edges);
    let dead: Vec<bool> = alive.iter().map(|a| !a).collect();
    let mut it = u.iter();
    let (a, b) = (*it.next().unwrap(), *it.next().unwrap());
    let r = pack(
        &amb,
        &Packing {
            mode: Mode::Vertex,
            sources: &[a],
            source_cap: INF,
            sinks: &[b],
            sink_cap: INF,
            blocked: &dead,
            limit: 3,
            short: true,
        },
    );
    if r.paths.paths.len() < 3 {
        return assertion(format!("{} and {} are not 3-connected in the sub-ambient", g.name(a), g.name(b)));
    }
    let mut ps = r.paths.paths;
    ps.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
    let theta = Theta { branch: (a, b), paths: [ps[0].clone(), ps[1].clone(), ps[2].clone()] };
    let mut d = BipartiteCertificate::from_cycle(&amb, &theta.shortest_even_cycle())?;
    'restart: loop {
        grow_by_fans(&amb, &dead, &mut d)?;
        let mut blocked = dead.clone();
        for &v in &d.vertices {
            blocked[v] = true;
        }
        let mut out = Cover { vertices: d.vertices.clone(), edges: d.edges.clone() };
        for h in components_masked(&amb, &blocked) {
            let hset: VSet = h.iter().copied().collect();
            let inner: Vec<VSet> = classes.iter().filter(|c| !c.is_disjoint(&hset)).cloned().collect();
            if inner.iter().any(|c| !c.is_subset(&hset)) {
                return assertion("a class straddles the grown subgraph");
            }
            if inner.is_empty() {
                continue;
            }
            let attach: Vec<Edge> = h
                .iter()
                .flat_map(|&x| amb.neighbors(x).iter().filter(|&&y| d.vertices.contains(&y)).map(move |&y| (x, y)))
                .collect();
            let mut sub_alive = vec![false; g.n()];
            for &x in &h {
                sub_alive[x] = true;
            }
            let mut sub_edges: Vec<Edge> =
                amb.edges().into_iter().filter(|&(x, y)| hset.contains(&x) && hset.contains(&y)).collect();
            let mut ear_path: Vec<usize> = Vec::new();
            match attach.len() {
                0 | 1 => {}
                2 => {
                    let (uu, up) = attach[0];
                    let (vv, vp) = attach[1];
                    let dg = d.graph(&amb);
                    let outside: Vec<bool> = (0..g.n()).map(|v| !d.vertices.contains(&v)).collect();
                    ear_path = shortest_path(&dg, up, vp, &outside)
                        .ok_or_else(|| Error::Assertion("grown subgraph is disconnected".into()))?;
                    for &x in &ear_path {
                        sub_alive[x] = true;
                    }
                    for w in ear_path.windows(2) {
                        sub_edges.push(norm((w[0], w[1])));
                    }
                    sub_edges.push(norm((uu, up)));
                    sub_edges.push(norm((vv, vp)));
                }
                _ => return assertion("component with three attachments survived growth"),
            }
            let f_h = cover_in(g, &sub_alive, &sub_edges, &inner)?;
            let touches_path = f_h.edges.iter().any(|&(x, y)| ear_path.contains(&x) || ear_path.contains(&y));
            if touches_path {
                // the piece through the attaching edges yields a longer ear of d
                let (uu, up) = attach[0];
                let (vv, vp) = attach[1];
                let fg = g.with_edges(&f_h.edges);
                let avoid: Vec<bool> = (0..g.n()).map(|v| !hset.contains(&v)).collect();
                let q = shortest_path(&fg, uu, vv, &avoid)
                    .ok_or_else(|| Error::Assertion("no return path inside the component".into()))?;
                let mut ear = vec![up];
                ear.extend(q);
                ear.push(vp);
                d.add_ear(&amb, &ear)?;
                continue 'restart;
            }
            out.vertices.extend(f_h.vertices.iter().copied().filter(|v| !ear_path.contains(v)));
            out.edges.extend(f_h.edges);
        }
        for c in classes {
            if !c.is_disjoint(&d.vertices) && !c.is_subset(&d.vertices) {
                return assertion("a class meets the grown subgraph without lying in it");
            }
        }
        out.vertices.extend(singles.iter().copied());
        out.edges.sort_unstable();
        return Ok(out);
    }
}

/// Adds fans from components of `amb - d` with three or more attaching
/// edges until none is left.
fn grow_by_fans(amb: &Multigraph, dead: &[bool], d: &mut BipartiteCertificate) -> Result<()> {
    'outer: loop {
        let mut blocked = dead.to_vec();
        for &v in &d.vertices {
            blocked[v] = true;
        }
        for h in components_masked(amb, &blocked) {
            let attaching: usize =
                h.iter().map(|&x| amb.neighbors(x).iter().filter(|y| d.vertices.contains(y)).count()).sum();
            if attaching < 3 {
                continue;
            }
            let hset: VSet = h.iter().copied().collect();
            let fence: Vec<bool> =
                (0..amb.n()).map(|v| dead[v] || (!hset.contains(&v) && !d.vertices.contains(&v))).collect();
            for &x in &h {
                if let Some(paths) = fan(amb, x, &d.vertices, 3, &fence) {
                    d.add_fan(amb, &paths)?;
                    continue 'outer;
                }
            }
            return assertion("three attaching edges but no fan");
        }
        return Ok(());
    }
}

/// Classes of the relation "joined by three edge-disjoint paths" on the
/// vertices not in `removed`.
pub fn three_edge_classes(g: &Multigraph, removed: &VSet) -> Vec<Vec<usize>> {
    let blocked = mask(g.n(), removed);
    let mut comp = vec![usize::MAX; g.n()];
    for (i, c) in components_masked(g, &blocked).iter().enumerate() {
        for &v in c {
            comp[v] = i;
        }
    }
    let mut reps: Vec<usize> = Vec::new();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for v in (0..g.n()).filter(|v| !blocked[*v]) {
        let hit = reps.iter().position(|&r| {
            comp[r] == comp[v]
                && pack(
                    g,
                    &Packing {
                        mode: Mode::Edge,
                        sources: &[r],
                        source_cap: INF,
                        sinks: &[v],
                        sink_cap: INF,
                        blocked: &blocked,
                        limit: 3,
                        short: false,
                    },
                )
                .paths
                .paths
                .len()
                    >= 3
        });
        match hit {
            Some(i) => classes[i].push(v),
            None => {
                reps.push(v);
                classes.push(vec![v]);
            }
        }
    }
    classes
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosureClass {
    /// Real vertices of the class.
    pub vertices: Vec<usize>,
    /// Class vertices with a neighbour outside the class.
    pub boundary: Vec<usize>,
    /// The class reaches an escaping region of the ball.
    pub infinite: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Closure {
    pub separator: VSet,
    pub classes: Vec<ClosureClass>,
}

impl Closure {
    /// Nonempty traces of the classes on `separator - s`.
    pub fn partition(&self, s: &VSet) -> Vec<VSet> {
        self.classes
            .iter()
            .map(|c| c.boundary.iter().copied().filter(|v| !s.contains(v)).collect::<VSet>())
            .filter(|p| !p.is_empty())
            .collect()
    }
}

/// A finite `T ⊇ S ∪ N(S)` such that the neighbourhood of every component
/// of `G - T` is 3-connected in `G - S`: `S` together with the boundaries
/// of the 3-edge-connectivity classes of `G - S`.
pub fn closure_separator(t: &Truncation, s: &VSet) -> Result<Closure> {
    t.core.check_set(s)?;
    check_subcubic(&t.core)?;
    if !t.well_inside(s) {
        return Err(Error::DepthInsufficient("separator seed too close to the frontier".into()));
    }
    let aug = t.augmented(t.depth_of(s));
    let raw = three_edge_classes(&aug.graph, s);
    let n = t.core.n();
    let mut class_of = vec![usize::MAX; n];
    let mut classes = Vec::new();
    for c in raw {
        let infinite = c.iter().any(|&v| aug.is_virtual(v));
        let vertices: Vec<usize> = c.into_iter().filter(|&v| !aug.is_virtual(v)).collect();
        if vertices.is_empty() {
            continue;
        }
        for &v in &vertices {
            class_of[v] = classes.len();
        }
        classes.push(ClosureClass { vertices, boundary: Vec::new(), infinite });
    }
    let mut sep = s.clone();
    for (i, c) in classes.iter_mut().enumerate() {
        c.boundary = c
            .vertices
            .iter()
            .copied()
            .filter(|&v| t.core.neighbors(v).iter().any(|&w| class_of[w] != i))
            .collect();
        sep.extend(c.boundary.iter().copied());
    }
    if !t.well_inside(&sep) {
        return Err(Error::DepthInsufficient(format!(
            "closure reaches the outer layers of the radius-{} ball",
            t.radius
        )));
    }
    Ok(Closure { separator: sep, classes })
}

/// Merges the components of `d` into one 2-connected bipartite subgraph on
/// the same vertex set, one even cycle of a Θ-graph at a time.
pub fn merge_components(g: &Multigraph, d: &Cover) -> Result<BipartiteCertificate> {
    check_subcubic(g)?;
    d.validate(g, &[])?;
    let mut cur = d.clone();
    loop {
        let comps = cur.components(g);
        if comps.len() == 1 {
            return BipartiteCertificate::new(g, cur.edges.clone());
        }
        if comps.is_empty() {
            return input("nothing to merge");
        }
        let mut comp_of = vec![usize::MAX; g.n()];
        for (i, c) in comps.iter().enumerate() {
            for &v in c {
                comp_of[v] = i;
            }
        }
        let mut qedges = Vec::new();
        let mut under: BTreeMap<Edge, Vec<Edge>> = BTreeMap::new();
        for (a, b) in g.edges() {
            let (ca, cb) = (comp_of[a], comp_of[b]);
            if ca != usize::MAX && cb != usize::MAX && ca != cb {
                qedges.push((ca, cb));
                let (k, e) = if ca < cb { ((ca, cb), (a, b)) } else { ((cb, ca), (b, a)) };
                under.entry(k).or_default().push(e);
            }
        }
        let names: Vec<String> = (0..comps.len()).map(|i| format!("{i:08}")).collect();
        let q = Multigraph::from_sorted(names, &qedges);
        let theta = find_theta(&q)
            .ok_or_else(|| Error::Input("no Θ-graph between components: host is not 3-edge-connected on them".into()))?;
        let mut taken: BTreeMap<Edge, usize> = BTreeMap::new();
        let mut attach: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let mut h_edges: Vec<Edge> = Vec::new();
        for path in &theta.paths {
            for w in path.windows(2) {
                let key = norm((w[0], w[1]));
                let i = taken.entry(key).or_default();
                let (x, y) = under[&key][*i];
                *i += 1;
                let (x, y) = if comp_of[x] == w[0] { (x, y) } else { (y, x) };
                attach.entry(w[0]).or_default().push(x);
                attach.entry(w[1]).or_default().push(y);
                h_edges.push(norm((x, y)));
            }
        }
        let crossing = h_edges.clone();
        for (&node, atts) in &attach {
            let l = &comps[node];
            let lg = g.with_edges(&cur.component_edges(l));
            let outside: Vec<bool> = (0..g.n()).map(|v| l.binary_search(&v).is_err()).collect();
            let p = shortest_path(&lg, atts[0], atts[1], &outside)
                .ok_or_else(|| Error::Assertion("component is disconnected".into()))?;
            for w in p.windows(2) {
                h_edges.push(norm((w[0], w[1])));
            }
            if atts.len() == 3 {
                let leg = path_to_set(&lg, atts[2], &p, &outside)
                    .ok_or_else(|| Error::Assertion("component is disconnected".into()))?;
                for w in leg.windows(2) {
                    h_edges.push(norm((w[0], w[1])));
                }
            }
        }
        let cycle = theta_even_cycle(g, &h_edges)?;
        let mut added = false;
        for i in 0..cycle.len() {
            let e = norm((cycle[i], cycle[(i + 1) % cycle.len()]));
            if comp_of[e.0] != comp_of[e.1] {
                if !crossing.contains(&e) {
                    return assertion("cycle leaves the Θ-graph");
                }
                cur.edges.push(e);
                added = true;
            }
        }
        if !added {
            return assertion("even cycle stays inside one component");
        }
        cur.edges.sort_unstable();
    }
}

/// Shortest path from `s` to the first vertex of `set`.
fn path_to_set(g: &Multigraph, s: usize, set: &[usize], blocked: &[bool]) -> Option<Vec<usize>> {
    let target: VSet = set.iter().copied().collect();
    let mut prev = vec![usize::MAX; g.n()];
    let mut seen = vec![false; g.n()];
    seen[s] = true;
    let mut q = VecDeque::from([s]);
    while let Some(x) = q.pop_front() {
        if target.contains(&x) {
            let mut p = vec![x];
            let mut c = x;
            while c != s {
                c = prev[c];
                p.push(c);
            }
            p.reverse();
            return Some(p);
        }
        for &y in g.neighbors(x) {
            if !seen[y] && !blocked.get(y).copied().unwrap_or(false) {
                seen[y] = true;
                prev[y] = x;
                q.push_back(y);
            }
        }
    }
    None
}

/// The shortest even cycle of the subdivided Θ-graph with edge set `h`.
fn theta_even_cycle(g: &Multigraph, h: &[Edge]) -> Result<Vec<usize>> {
    let hg = g.with_edges(h);
    let branch: Vec<usize> = (0..g.n()).filter(|&v| hg.degree(v) == 3).collect();
    if branch.len() != 2 || (0..g.n()).any(|v| hg.degree(v) > 3) {
        return assertion("expanded subgraph is not a Θ-graph");
    }
    let (b1, b2) = (branch[0], branch[1]);
    let mut paths = Vec::new();
    let mut used: BTreeMap<Edge, usize> = BTreeMap::new();
    for &start in hg.neighbors(b1) {
        let e = norm((b1, start));
        let c = used.entry(e).or_default();
        if *c >= hg.multiplicity(e.0, e.1) {
            continue;
        }
        *c += 1;
        let mut p = vec![b1, start];
        while *p.last().unwrap() != b2 {
            let cur = *p.last().unwrap();
            let prev = p[p.len() - 2];
            let next = hg.neighbors(cur).iter().copied().find(|&w| w != prev);
            match next {
                Some(w) if hg.degree(cur) == 2 => p.push(w),
                _ => return assertion("broken Θ-graph path"),
            }
        }
        paths.push(p);
    }
    if paths.len() != 3 {
        return assertion("Θ-graph without three branches");
    }
    let th = Theta { branch: (b1, b2), paths: [paths[0].clone(), paths[1].clone(), paths[2].clone()] };
    Ok(th.shortest_even_cycle())
}

/// Checks recorded for one round.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundEvidence {
    /// The previous subgraph is a subgraph of this one.
    pub contains_previous: bool,
    /// Every neighbour of the previous subgraph is a vertex of this one.
    pub neighborhood_absorbed: bool,
    /// Every component of `G` minus this subgraph has its neighbourhood in
    /// one component of this subgraph minus the previous vertex set.
    pub components_attach_once: bool,
    pub outside_components: usize,
}

impl RoundEvidence {
    pub fn passed(&self) -> bool {
        self.contains_previous && self.neighborhood_absorbed && self.components_attach_once
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BipartiteRound {
    pub f: BipartiteCertificate,
    /// The closure separator used to build this round (empty for the first).
    pub closure: VSet,
    pub evidence: Option<RoundEvidence>,
}

/// Round checks between consecutive subgraphs on a truncation.
pub fn round_evidence(t: &Truncation, prev: &[Edge], next: &[Edge]) -> RoundEvidence {
    let g = &t.core;
    let pv = endpoints(prev);
    let nv = endpoints(next);
    let contains_previous = edge_subset(prev, next);
    let neighborhood_absorbed = pv.iter().all(|&v| g.neighbors(v).iter().all(|w| nv.contains(w)));
    let fresh: Vec<bool> = (0..g.n()).map(|v| !nv.contains(&v) || pv.contains(&v)).collect();
    let mut owner = vec![usize::MAX; g.n()];
    for (i, c) in components_masked(&g.with_edges(next), &fresh).iter().enumerate() {
        for &v in c {
            owner[v] = i;
        }
    }
    let outside = t.host_components(&nv);
    let components_attach_once = outside.iter().all(|h| {
        let owners: VSet = h
            .vertices
            .iter()
            .flat_map(|&x| g.neighbors(x).iter().copied())
            .filter(|w| nv.contains(w))
            .map(|w| owner[w])
            .collect();
        owners.len() <= 1 && !owners.contains(&usize::MAX)
    });
    RoundEvidence { contains_previous, neighborhood_absorbed, components_attach_once, outside_components: outside.len() }
}

/// Shortest even cycle through the root, the seed of the rounds.
pub fn seed_cycle(t: &Truncation) -> Result<BipartiteCertificate> {
    match cycle_through(&t.core, &[t.root], &[], true, t.core.n(), 2_000_000) {
        CycleSearch::Found(c) => BipartiteCertificate::from_cycle(&t.core, &c),
        CycleSearch::NotFound => input("no even cycle through the root"),
        CycleSearch::BudgetExceeded => Err(Error::DepthInsufficient("even cycle search exhausted".into())),
    }
}

/// One round: closure, cover of the closure classes, merge.
pub fn next_round(t: &Truncation, f: &BipartiteCertificate) -> Result<BipartiteRound> {
    let g = &t.core;
    let closure = closure_separator(t, &f.vertices)?;
    let parts = closure.partition(&f.vertices);
    let (alive, amb_edges) = class_paths(t, &closure, &f.vertices)?;
    let mut d = cover_in(g, &alive, &amb_edges, &parts)?;
    d.vertices.extend(closure.separator.iter().copied().filter(|v| !f.vertices.contains(v)));
    d.validate(g, &parts)?;
    let all = d.union(&Cover { vertices: f.vertices.clone(), edges: f.edges.clone() });
    let next = merge_components(g, &all)?;
    let evidence = round_evidence(t, &f.edges, &next.edges);
    if !evidence.passed() {
        return assertion(format!("round checks failed: {evidence:?}"));
    }
    Ok(BipartiteRound { f: next, closure: closure.separator, evidence: Some(evidence) })
}

/// The finite ambient for the cover: class boundary vertices joined by
/// three paths per pair (a star of pairs per class), preferring paths that
/// stay in the class.
fn class_paths(t: &Truncation, closure: &Closure, s: &VSet) -> Result<(Vec<bool>, Vec<Edge>)> {
    let g = &t.core;
    let mut alive = vec![false; g.n()];
    let mut need: BTreeMap<Edge, usize> = BTreeMap::new();
    for c in &closure.classes {
        let part: Vec<usize> = c.boundary.iter().copied().filter(|v| !s.contains(v)).collect();
        for &v in &part {
            alive[v] = true;
        }
        let Some((&hub, rest)) = part.split_first() else { continue };
        let inside: VSet = c.vertices.iter().copied().collect();
        let strict: Vec<bool> = (0..g.n()).map(|v| !inside.contains(&v)).collect();
        let loose = mask(g.n(), s);
        for &x in rest {
            let three = |blocked: &[bool]| {
                let r = pack(
                    g,
                    &Packing {
                        mode: Mode::Vertex,
                        sources: &[hub],
                        source_cap: INF,
                        sinks: &[x],
                        sink_cap: INF,
                        blocked,
                        limit: 3,
                        short: true,
                    },
                );
                (r.paths.paths.len() == 3).then_some(r.paths.paths)
            };
            let paths = three(&strict).or_else(|| three(&loose)).ok_or_else(|| {
                Error::DepthInsufficient(format!(
                    "{} and {} need paths beyond the ball",
                    g.name(hub),
                    g.name(x)
                ))
            })?;
            let mut here: BTreeMap<Edge, usize> = BTreeMap::new();
            for p in &paths {
                for &v in p {
                    alive[v] = true;
                }
                for w in p.windows(2) {
                    *here.entry(norm((w[0], w[1]))).or_default() += 1;
                }
            }
            for (e, k) in here {
                let m = need.entry(e).or_default();
                *m = (*m).max(k);
            }
        }
    }
    let edges = need.into_iter().flat_map(|(e, k)| std::iter::repeat_n(e, k)).collect();
    Ok((alive, edges))
}

/// Rounds on a fixed truncation; stops early at the first depth failure and
/// reports it.
pub fn bipartite_rounds_on(t: &Truncation, rounds: usize) -> Result<(Vec<BipartiteRound>, Option<Error>)> {
    if rounds == 0 {
        return input("need at least one round");
    }
    check_subcubic(&t.core)?;
    let seed = seed_cycle(t)?;
    let mut out = vec![BipartiteRound { f: seed, closure: VSet::new(), evidence: None }];
    while out.len() < rounds {
        match next_round(t, &out.last().unwrap().f) {
            Ok(r) => out.push(r),
            Err(e @ Error::DepthInsufficient(_)) => return Ok((out, Some(e))),
            Err(e) => return Err(e),
        }
    }
    Ok((out, None))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BipartiteRun {
    pub spec: String,
    pub radius: usize,
    pub requested: usize,
    pub rounds: Vec<BipartiteRound>,
    /// Why fewer rounds than requested were built.
    pub stopped: Option<String>,
}

pub const DEFAULT_MAX_RADIUS: usize = 24;

/// Runs `rounds` rounds on balls of growing radius until they fit; returns
/// the deepest partial run if `max_radius` is reached first.
pub fn faithful_bipartite_rounds(
    gen: &GeneratorGraph,
    rounds: usize,
    start_radius: usize,
    max_radius: usize,
) -> Result<BipartiteRun> {
    let mut best: Option<BipartiteRun> = None;
    let mut r = start_radius.max(3);
    while r <= max_radius {
        let t = ball(gen, r)?;
        let (done, err) = bipartite_rounds_on(&t, rounds)?;
        let run = BipartiteRun {
            spec: gen.spec(),
            radius: r,
            requested: rounds,
            stopped: err.map(|e| e.to_string()),
            rounds: done,
        };
        if run.stopped.is_none() {
            return Ok(run);
        }
        if best.as_ref().is_none_or(|b| run.rounds.len() > b.rounds.len()) {
            best = Some(run);
        }
        r += 2;
    }
    best.ok_or_else(|| Error::DepthInsufficient("no radius tried".into()))
}
