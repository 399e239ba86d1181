//! Infinite locally finite graphs given by neighbour functions, their
//! finite balls, end approximants, end-degree bounds and faithfulness audits.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::flow::{fan, is_set_k_connected, pack, Mode, Packing, SetConnectivity, INF};
use crate::graph::{canonical_cmp, components_masked, norm, prism, prism_id, shortest_path, Edge, Multigraph, VSet};

pub const DEFAULT_DEGREE_CAP: usize = 64;

pub type NeighborFn = Arc<dyn Fn(&str) -> Result<Vec<String>> + Send + Sync>;

/// A rooted, locally finite graph described by a pure neighbour function.
#[derive(Clone)]
pub struct GeneratorGraph {
    pub family: String,
    pub params: BTreeMap<String, i64>,
    pub root: String,
    pub degree_cap: usize,
    neighbors: NeighborFn,
}

impl fmt::Debug for GeneratorGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneratorGraph").field("spec", &self.spec()).field("root", &self.root).finish()
    }
}

impl GeneratorGraph {
    pub fn new(family: &str, params: BTreeMap<String, i64>, root: &str, neighbors: NeighborFn) -> Self {
        GeneratorGraph {
            family: family.to_string(),
            params,
            root: root.to_string(),
            degree_cap: DEFAULT_DEGREE_CAP,
            neighbors,
        }
    }

    /// Wraps a finite graph; useful for running the bounded-depth tools on
    /// finite inputs.
    pub fn from_finite(name: &str, g: &Multigraph, root: usize) -> Result<Self> {
        if root >= g.n() {
            return input("root out of range");
        }
        let g = Arc::new(g.clone());
        let lookup = g.clone();
        let f: NeighborFn = Arc::new(move |v: &str| {
            let i = lookup.id(v)?;
            Ok(lookup.distinct_neighbors(i).into_iter().map(|w| lookup.name(w).to_string()).collect())
        });
        Ok(Self::new(name, BTreeMap::new(), g.name(root), f))
    }

    /// Sorted, duplicate-free neighbour list; enforces the degree cap.
    pub fn neighbors(&self, v: &str) -> Result<Vec<String>> {
        let mut nb = (self.neighbors)(v)?;
        nb.sort_by(|a, b| canonical_cmp(a, b));
        let before = nb.len();
        nb.dedup();
        if nb.len() != before {
            return Err(Error::Generator(format!("repeated neighbour at {v}")));
        }
        if nb.iter().any(|w| w == v) {
            return Err(Error::Generator(format!("self-loop at {v}")));
        }
        if nb.len() > self.degree_cap {
            return Err(Error::Generator(format!(
                "degree {} at {v} exceeds cap {}",
                nb.len(),
                self.degree_cap
            )));
        }
        Ok(nb)
    }

    /// Family spec string such as `family:hex_cylinder?c=6`.
    pub fn spec(&self) -> String {
        if self.params.is_empty() {
            format!("family:{}", self.family)
        } else {
            let q: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            format!("family:{}?{}", self.family, q.join("&"))
        }
    }
}

fn coords(v: &str) -> Result<(i64, i64)> {
    let (a, b) = v.split_once(',').ok_or_else(|| Error::Input(format!("bad vertex id {v}")))?;
    let p = |s: &str| s.parse::<i64>().map_err(|_| Error::Input(format!("bad vertex id {v}")));
    Ok((p(a)?, p(b)?))
}

fn xy(x: i64, y: i64) -> String {
    format!("{x},{y}")
}

/// Integers, `i ~ i±1`.
pub fn double_ray() -> GeneratorGraph {
    let f: NeighborFn = Arc::new(|v: &str| {
        let i: i64 = v.parse().map_err(|_| Error::Input(format!("bad vertex id {v}")))?;
        Ok(vec![(i - 1).to_string(), (i + 1).to_string()])
    });
    GeneratorGraph::new("double_ray", BTreeMap::new(), "0", f)
}

/// Vertices `i,s` with `i ≥ 0`, `s ∈ {0,1}`; rails `i ~ i+1`, rungs `s ~ 1-s`.
pub fn one_way_ladder() -> GeneratorGraph {
    let f: NeighborFn = Arc::new(|v: &str| {
        let (i, s) = coords(v)?;
        if i < 0 || !(0..=1).contains(&s) {
            return input(format!("bad vertex id {v}"));
        }
        let mut nb = vec![xy(i + 1, s), xy(i, 1 - s)];
        if i > 0 {
            nb.push(xy(i - 1, s));
        }
        Ok(nb)
    });
    GeneratorGraph::new("one_way_ladder", BTreeMap::new(), "0,0", f)
}

/// Bi-infinite ladder: vertices `i,s` with `i ∈ Z`.
pub fn ladder() -> GeneratorGraph {
    let f: NeighborFn = Arc::new(|v: &str| {
        let (i, s) = coords(v)?;
        if !(0..=1).contains(&s) {
            return input(format!("bad vertex id {v}"));
        }
        Ok(vec![xy(i - 1, s), xy(i + 1, s), xy(i, 1 - s)])
    });
    GeneratorGraph::new("ladder", BTreeMap::new(), "0,0", f)
}

/// 3-regular tree as the Cayley graph of the free product of three copies
/// of Z/2: vertices are reduced words over `a,b,c`, the root is `e`.
pub fn tree3() -> GeneratorGraph {
    let f: NeighborFn = Arc::new(|v: &str| {
        let word = if v == "e" { "" } else { v };
        if word.chars().any(|c| !"abc".contains(c)) || word.as_bytes().windows(2).any(|w| w[0] == w[1]) {
            return input(format!("bad vertex id {v}"));
        }
        let mut nb = Vec::with_capacity(3);
        for g in ['a', 'b', 'c'] {
            if word.ends_with(g) {
                let up = &word[..word.len() - 1];
                nb.push(if up.is_empty() { "e".to_string() } else { up.to_string() });
            } else {
                nb.push(format!("{word}{g}"));
            }
        }
        Ok(nb)
    });
    GeneratorGraph::new("tree3", BTreeMap::new(), "e", f)
}

fn brick(x: i64, y: i64, period: Option<i64>) -> Vec<String> {
    let wrap = |x: i64| match period {
        Some(p) => x.rem_euclid(p),
        None => x,
    };
    let vy = if (x + y).rem_euclid(2) == 0 { y + 1 } else { y - 1 };
    vec![xy(wrap(x - 1), y), xy(wrap(x + 1), y), xy(x, vy)]
}

/// Honeycomb in brick-wall coordinates: `x,y ~ x±1,y`, and `x,y ~ x,y+1`
/// when `x+y` is even.
pub fn hex() -> GeneratorGraph {
    let f: NeighborFn = Arc::new(|v: &str| {
        let (x, y) = coords(v)?;
        Ok(brick(x, y, None))
    });
    GeneratorGraph::new("hex", BTreeMap::new(), "0,0", f)
}

/// Honeycomb cylinder with `c` hexagons around: the brick wall with `x`
/// taken modulo `2c`.
pub fn hex_cylinder(c: i64) -> Result<GeneratorGraph> {
    if c < 2 {
        return input("hex_cylinder needs c >= 2");
    }
    let p = 2 * c;
    let f: NeighborFn = Arc::new(move |v: &str| {
        let (x, y) = coords(v)?;
        if !(0..p).contains(&x) {
            return input(format!("bad vertex id {v}"));
        }
        Ok(brick(x, y, Some(p)))
    });
    let params = BTreeMap::from([("c".to_string(), c)]);
    Ok(GeneratorGraph::new("hex_cylinder", params, "0,0", f))
}

pub const FAMILIES: [&str; 6] = ["double_ray", "one_way_ladder", "ladder", "tree3", "hex", "hex_cylinder"];

/// Parses `family:name` or `family:name?k=v&k2=v2`.
pub fn family(spec: &str) -> Result<GeneratorGraph> {
    let body = spec.strip_prefix("family:").unwrap_or(spec);
    let (name, query) = match body.split_once('?') {
        Some((n, q)) => (n, q),
        None => (body, ""),
    };
    let mut params = BTreeMap::new();
    for kv in query.split('&').filter(|s| !s.is_empty()) {
        let (k, v) = kv.split_once('=').ok_or_else(|| Error::Input(format!("bad parameter {kv}")))?;
        let v: i64 = v.parse().map_err(|_| Error::Input(format!("bad parameter value {kv}")))?;
        params.insert(k.to_string(), v);
    }
    let no_params = |g: GeneratorGraph| -> Result<GeneratorGraph> {
        if params.is_empty() {
            Ok(g)
        } else {
            input(format!("{name} takes no parameters"))
        }
    };
    match name {
        "double_ray" => no_params(double_ray()),
        "one_way_ladder" => no_params(one_way_ladder()),
        "ladder" => no_params(ladder()),
        "tree3" => no_params(tree3()),
        "hex" => no_params(hex()),
        "hex_cylinder" => {
            let c = *params.get("c").ok_or_else(|| Error::Input("hex_cylinder needs c".into()))?;
            if params.len() != 1 {
                return input("hex_cylinder takes only c");
            }
            hex_cylinder(c)
        }
        _ => input(format!("unknown family {name}")),
    }
}

/// A finite ball around the root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Truncation {
    pub spec: String,
    pub radius: usize,
    pub core: Multigraph,
    /// Vertices at distance `radius` with a neighbour outside the ball.
    pub frontier: VSet,
    /// Distance from the root (in the host).
    pub level: Vec<usize>,
    /// Number of host neighbours outside the ball.
    pub outside_degree: Vec<usize>,
    pub root: usize,
}

/// Breadth-first ball of the given radius; neighbour symmetry is checked on
/// every vertex materialized.
pub fn ball(g: &GeneratorGraph, radius: usize) -> Result<Truncation> {
    let mut dist: HashMap<String, usize> = HashMap::new();
    let mut nbs: HashMap<String, Vec<String>> = HashMap::new();
    let mut q = VecDeque::new();
    dist.insert(g.root.clone(), 0);
    q.push_back(g.root.clone());
    while let Some(v) = q.pop_front() {
        let d = dist[&v];
        let nb = g.neighbors(&v)?;
        if d < radius {
            for w in &nb {
                if !dist.contains_key(w) {
                    dist.insert(w.clone(), d + 1);
                    q.push_back(w.clone());
                }
            }
        }
        nbs.insert(v, nb);
    }
    for (v, nb) in &nbs {
        for w in nb {
            if let Some(wn) = nbs.get(w) {
                if wn.binary_search_by(|x| canonical_cmp(x, v)).is_err() {
                    return Err(Error::Generator(format!("{w} is a neighbour of {v} but not conversely")));
                }
            }
        }
    }
    let mut names: Vec<String> = dist.keys().cloned().collect();
    names.sort_by(|a, b| canonical_cmp(a, b));
    let index: HashMap<&str, usize> = names.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let mut edges = Vec::new();
    let mut frontier = VSet::new();
    let mut outside_degree = vec![0; names.len()];
    for (i, v) in names.iter().enumerate() {
        for w in &nbs[v] {
            match index.get(w.as_str()) {
                Some(&j) if i < j => edges.push((i, j)),
                Some(_) => {}
                None => {
                    frontier.insert(i);
                    outside_degree[i] += 1;
                }
            }
        }
    }
    let level = names.iter().map(|v| dist[v]).collect();
    let root = index[g.root.as_str()];
    Ok(Truncation {
        spec: g.spec(),
        radius,
        core: Multigraph::from_sorted(names, &edges),
        frontier,
        level,
        outside_degree,
        root,
    })
}

impl Truncation {
    /// Vertices within distance `s` of the root.
    pub fn ball_set(&self, s: usize) -> VSet {
        (0..self.core.n()).filter(|&v| self.level[v] <= s).collect()
    }

    /// Largest separator radius that stays two steps clear of the frontier.
    pub fn max_separator_radius(&self) -> Option<usize> {
        self.radius.checked_sub(2)
    }

    /// Whether every vertex of `t` sits at distance at least 2 from the
    /// frontier layer.
    pub fn well_inside(&self, t: &VSet) -> bool {
        t.iter().all(|&v| self.level[v] + 2 <= self.radius)
    }

    /// Same ball with a different edge set on the same vertex set.
    pub fn with_edges(&self, edges: &[Edge]) -> Truncation {
        Truncation { core: self.core.with_edges(edges), ..self.clone() }
    }

    /// The ball lifted to the prism: levels and frontier copied to both sides.
    pub fn prism(&self) -> Truncation {
        let p = prism(&self.core);
        let mut level = vec![0; p.n()];
        let mut outside_degree = vec![0; p.n()];
        let mut frontier = VSet::new();
        for v in 0..self.core.n() {
            for s in 0..2u8 {
                let i = p.index(&prism_id(self.core.name(v), s)).unwrap();
                level[i] = self.level[v];
                outside_degree[i] = self.outside_degree[v];
                if self.frontier.contains(&v) {
                    frontier.insert(i);
                }
            }
        }
        let root = p.index(&prism_id(self.core.name(self.root), 0)).unwrap();
        Truncation {
            spec: format!("{}#prism", self.spec),
            radius: self.radius,
            core: p,
            frontier,
            level,
            outside_degree,
            root,
        }
    }

    /// Shortest path from the root to `v`.
    pub fn ray_to(&self, v: usize) -> Option<Vec<usize>> {
        shortest_path(&self.core, self.root, v, &[])
    }

    pub fn is_interior(&self, v: usize) -> bool {
        self.level[v] < self.radius
    }
}

/// The core plus one virtual vertex per escaping region, joined to each
/// frontier vertex of that region once per missing neighbour. Real vertices keep their indices,
/// virtual ones follow them.
#[derive(Clone, Debug)]
pub struct Augmented {
    pub graph: Multigraph,
    pub real: usize,
}

impl Augmented {
    pub fn is_virtual(&self, v: usize) -> bool {
        v >= self.real
    }
}

/// A component of `G - X` seen through the truncation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HostComponent {
    /// Real vertices, sorted.
    pub vertices: Vec<usize>,
    pub escaping: bool,
}

impl Truncation {
    /// Regions are the escaping components of `core - ball(group)`; frontier
    /// vertices of one region are joined in `G - X` whenever `X` lies in
    /// that ball, so the virtual vertex only adds connections through the
    /// unexplored part.
    pub fn augmented(&self, group: usize) -> Augmented {
        let n = self.core.n();
        let inner = self.ball_set(group);
        let regions: Vec<Vec<usize>> = components_masked(&self.core, &mask(n, &inner))
            .into_iter()
            .filter(|c| c.iter().any(|v| self.frontier.contains(v)))
            .collect();
        let width = self.core.names().iter().map(|s| s.len()).max().unwrap_or(0) + 1;
        let mut names: Vec<String> = self.core.names().to_vec();
        let mut edges = self.core.edges();
        for (j, r) in regions.iter().enumerate() {
            names.push(format!("{}{:06}", "~".repeat(width), j));
            for &v in r {
                for _ in 0..self.outside_degree[v] {
                    edges.push((v, n + j));
                }
            }
        }
        Augmented { graph: Multigraph::from_sorted(names, &edges), real: n }
    }

    /// Deepest level of a vertex set (0 when empty).
    pub fn depth_of(&self, s: &VSet) -> usize {
        s.iter().map(|&v| self.level[v]).max().unwrap_or(0)
    }

    /// Components of `G - removed` as far as the ball can tell: components
    /// joined through the same escaping region are merged.
    pub fn host_components(&self, removed: &VSet) -> Vec<HostComponent> {
        let aug = self.augmented(self.depth_of(removed));
        let blocked = mask(aug.graph.n(), removed);
        components_masked(&aug.graph, &blocked)
            .into_iter()
            .filter_map(|c| {
                let escaping = c.iter().any(|&v| aug.is_virtual(v));
                let vertices: Vec<usize> = c.into_iter().filter(|&v| !aug.is_virtual(v)).collect();
                (!vertices.is_empty()).then_some(HostComponent { vertices, escaping })
            })
            .collect()
    }
}

/// Checks that the ball looks cubic and 3-connected: vertices below the
/// frontier layer have degree 3, and the ball of radius `radius - margin`
/// is 3-connected inside the truncation.
pub fn assert_cubic_3connected(t: &Truncation, margin: usize) -> Result<()> {
    for v in 0..t.core.n() {
        if t.is_interior(v) && t.core.degree(v) != 3 {
            return input(format!("vertex {} has degree {} (not cubic)", t.core.name(v), t.core.degree(v)));
        }
    }
    let inner = t.ball_set(t.radius.saturating_sub(margin));
    match is_set_k_connected(&t.core, &inner, 3)? {
        SetConnectivity::Connected => Ok(()),
        SetConnectivity::Violated { pair, found, .. } => input(format!(
            "not 3-connected: {} and {} joined by only {found} disjoint paths",
            t.core.name(pair.0),
            t.core.name(pair.1)
        )),
    }
}

/// A component of `core - separator` together with its separator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndApproximant {
    pub separator: VSet,
    pub component: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Approximants {
    /// Components meeting the frontier, ordered by least vertex.
    pub escaping: Vec<EndApproximant>,
    /// Finite components that stay inside the ball.
    pub contained: Vec<Vec<usize>>,
}

pub(crate) fn mask(n: usize, s: &VSet) -> Vec<bool> {
    let mut m = vec![false; n];
    for &v in s {
        m[v] = true;
    }
    m
}

pub fn end_approximants(t: &Truncation, sep: &VSet) -> Result<Approximants> {
    t.core.check_set(sep)?;
    if !t.well_inside(sep) {
        return Err(Error::DepthInsufficient(format!(
            "separator reaches within distance 2 of the frontier at radius {}",
            t.radius
        )));
    }
    let comps = components_masked(&t.core, &mask(t.core.n(), sep));
    let mut out = Approximants { escaping: Vec::new(), contained: Vec::new() };
    for c in comps {
        if c.iter().any(|v| t.frontier.contains(v)) {
            out.escaping.push(EndApproximant { separator: sep.clone(), component: c });
        } else {
            out.contained.push(c);
        }
    }
    Ok(out)
}

/// Chooses one end approximant at every separator radius.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EndSelector {
    /// The component holding the last vertex of this path.
    Ray(Vec<usize>),
    /// The escaping component of `core - ball(radius)` holding `rep`,
    /// refined at larger radii by containment.
    Component { radius: usize, rep: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndDegreeVerdict {
    pub lower: usize,
    /// `None` means unbounded at this depth.
    pub upper: Option<usize>,
    pub depth: usize,
    pub mode: Mode,
    /// Packing value for each separator radius explored, starting at `first_radius`.
    pub per_separator: Vec<usize>,
    pub first_radius: usize,
    /// Disjoint paths at the deepest separator.
    pub paths: Vec<Vec<String>>,
    /// A minimum cut at the deepest separator (vertices, then edge endpoints).
    pub cut: Vec<String>,
}

impl EndDegreeVerdict {
    pub fn upper_label(&self) -> String {
        match self.upper {
            Some(u) => u.to_string(),
            None => "UNBOUNDED-AT-DEPTH".to_string(),
        }
    }
}

/// Lower and upper bounds on the degree of the selected end.
///
/// For each ball separator `S_s` the selected component `C` of `core - S_s`
/// is packed with disjoint paths from the vertices of `C` next to `S_s` to
/// the frontier inside `C`; by Menger's theorem the packing value equals the
/// smallest separator of that neighbourhood inside `C`. The bounds are the
/// value at the deepest separator; the upper bound is reported only when the
/// sequence has stopped moving over the last two separators.
pub fn end_degree_bounds(t: &Truncation, sel: &EndSelector, mode: Mode) -> Result<EndDegreeVerdict> {
    if t.radius < 2 {
        return input("end degree needs depth >= 2");
    }
    let smax = t.radius - 2;
    let first = match sel {
        EndSelector::Ray(p) => {
            if p.is_empty() || p.iter().any(|&v| v >= t.core.n()) {
                return input("bad ray prefix");
            }
            0
        }
        EndSelector::Component { radius, rep } => {
            if *rep >= t.core.n() {
                return input("bad component representative");
            }
            if *radius > smax {
                return Err(Error::DepthInsufficient(format!("selector radius {radius} exceeds {smax}")));
            }
            *radius
        }
    };
    let n = t.core.n();
    let mut per = Vec::new();
    let mut last = None;
    let mut region: Option<VSet> = None;
    for s in first..=smax {
        let sep = t.ball_set(s);
        let blocked = mask(n, &sep);
        let comps = components_masked(&t.core, &blocked);
        let escaping: Vec<&Vec<usize>> =
            comps.iter().filter(|c| c.iter().any(|v| t.frontier.contains(v))).collect();
        let chosen: Vec<usize> = match sel {
            EndSelector::Ray(p) => {
                let tail = *p.last().unwrap();
                if sep.contains(&tail) {
                    return Err(Error::DepthInsufficient("ray prefix ends inside a separator".into()));
                }
                let c = comps.iter().find(|c| c.binary_search(&tail).is_ok()).unwrap();
                if !c.iter().any(|v| t.frontier.contains(v)) {
                    return input("ray prefix does not reach an escaping component");
                }
                c.clone()
            }
            EndSelector::Component { rep, .. } => match &region {
                None => {
                    let c = comps
                        .iter()
                        .find(|c| c.binary_search(rep).is_ok())
                        .ok_or_else(|| Error::Input("representative lies in the separator".into()))?;
                    if !c.iter().any(|v| t.frontier.contains(v)) {
                        return input("selected component does not escape");
                    }
                    c.clone()
                }
                Some(prev) => {
                    let inside: Vec<&&Vec<usize>> =
                        escaping.iter().filter(|c| prev.contains(&c[0])).collect();
                    match inside.len() {
                        1 => inside[0].to_vec(),
                        0 => return Err(Error::DepthInsufficient("selected end vanished".into())),
                        _ => {
                            return Err(Error::RefinementNeeded {
                                split: inside
                                    .iter()
                                    .map(|c| c.iter().map(|&v| t.core.name(v).to_string()).collect())
                                    .collect(),
                            })
                        }
                    }
                }
            },
        };
        let cset: VSet = chosen.iter().copied().collect();
        region = Some(cset.clone());
        let sinks: Vec<usize> = chosen.iter().copied().filter(|v| t.frontier.contains(v)).collect();
        let r = match mode {
            Mode::Vertex => {
                let sources: Vec<usize> = chosen
                    .iter()
                    .copied()
                    .filter(|&v| t.core.neighbors(v).iter().any(|w| sep.contains(w)))
                    .collect();
                let outside: Vec<bool> = (0..n).map(|v| !cset.contains(&v)).collect();
                pack(
                    &t.core,
                    &Packing {
                        mode: Mode::Vertex,
                        sources: &sources,
                        source_cap: 1,
                        sinks: &sinks,
                        sink_cap: 1,
                        blocked: &outside,
                        limit: usize::MAX,
                        short: false,
                    },
                )
            }
            Mode::Edge => {
                let sources: Vec<usize> = sep.iter().copied().collect();
                let outside: Vec<bool> = (0..n).map(|v| !cset.contains(&v) && !sep.contains(&v)).collect();
                pack(
                    &t.core,
                    &Packing {
                        mode: Mode::Edge,
                        sources: &sources,
                        source_cap: INF,
                        sinks: &sinks,
                        sink_cap: INF,
                        blocked: &outside,
                        limit: usize::MAX,
                        short: false,
                    },
                )
            }
        };
        per.push(r.paths.paths.len());
        last = Some(r);
    }
    let r = last.unwrap();
    let k = *per.last().unwrap();
    let upper = if per.len() >= 2 && per[per.len() - 2] == k { Some(k) } else { None };
    let names = |p: &Vec<usize>| p.iter().map(|&v| t.core.name(v).to_string()).collect::<Vec<_>>();
    let mut cut: Vec<String> = r.cut.vertices.iter().map(|&v| t.core.name(v).to_string()).collect();
    for &(a, b) in &r.cut.edges {
        cut.push(format!("{}-{}", t.core.name(a), t.core.name(b)));
    }
    Ok(EndDegreeVerdict {
        lower: k,
        upper,
        depth: t.radius,
        mode,
        per_separator: per,
        first_radius: first,
        paths: r.paths.paths.iter().map(names).collect(),
        cut,
    })
}

/// Evidence that a subgraph is not faithful.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditWitness {
    /// 1: an end of the host has no ray in the subgraph. 2: two subgraph
    /// ends merge in the host.
    pub condition: u8,
    pub separator_radius: usize,
    pub separator: Vec<String>,
    pub host_component: Vec<String>,
    pub sub_components: Vec<Vec<String>>,
    /// Subgraph edges leaving the separator into the reported components.
    pub edges: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum AuditVerdict {
    #[serde(rename = "CLEAN-AT-DEPTH")]
    CleanAtDepth { depth: usize },
    #[serde(rename = "VIOLATION")]
    Violation { depth: usize, witness: Box<AuditWitness> },
}

impl AuditVerdict {
    pub fn is_clean(&self) -> bool {
        matches!(self, AuditVerdict::CleanAtDepth { .. })
    }

    pub fn depth(&self) -> usize {
        match self {
            AuditVerdict::CleanAtDepth { depth } | AuditVerdict::Violation { depth, .. } => *depth,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            AuditVerdict::CleanAtDepth { .. } => "CLEAN-AT-DEPTH",
            AuditVerdict::Violation { .. } => "VIOLATION",
        }
    }
}

struct Layer {
    /// Escaping host components.
    host: Vec<Vec<usize>>,
    /// Escaping subgraph components with the index of the host component holding them.
    sub: Vec<(Vec<usize>, usize)>,
}

fn layer(t: &Truncation, f: &Multigraph, sep: &VSet) -> Layer {
    let blocked = mask(t.core.n(), sep);
    let escapes = |c: &Vec<usize>| c.iter().any(|v| t.frontier.contains(v));
    let host: Vec<Vec<usize>> = components_masked(&t.core, &blocked).into_iter().filter(escapes).collect();
    let mut owner = vec![usize::MAX; t.core.n()];
    for (i, c) in host.iter().enumerate() {
        for &v in c {
            owner[v] = i;
        }
    }
    let attached = |c: &Vec<usize>| c.iter().any(|&v| f.neighbors(v).iter().any(|&w| blocked[w]));
    let sub = components_masked(f, &blocked)
        .into_iter()
        .filter(|c| escapes(c) && attached(c))
        .map(|c| {
            let o = owner[c[0]];
            (c, o)
        })
        .collect();
    Layer { host, sub }
}

/// Bounded-depth faithfulness audit of the spanning subgraph with edge set
/// `f_edges` against the truncation, over ball separators of radius
/// `0..=radius-2`. Vertices in `isolated_ok` may have no subgraph edge.
///
/// A component of `F - S` counts as escaping when it meets the frontier and
/// has a subgraph edge into `S`; pieces that only touch the frontier from
/// outside are treated as finite.
pub fn faithfulness_audit(t: &Truncation, f_edges: &[Edge], isolated_ok: &VSet) -> Result<AuditVerdict> {
    if t.radius < 3 {
        return input("faithfulness audit needs depth >= 3");
    }
    let mut avail: HashMap<Edge, usize> = HashMap::new();
    for e in t.core.edges() {
        *avail.entry(e).or_default() += 1;
    }
    let mut covered = vec![false; t.core.n()];
    for &e in f_edges {
        let e = norm(e);
        match avail.get_mut(&e) {
            Some(c) if *c > 0 => *c -= 1,
            _ => return input(format!("edge {}-{} is not a host edge", t.core.name(e.0), t.core.name(e.1))),
        }
        covered[e.0] = true;
        covered[e.1] = true;
    }
    if let Some(v) = (0..t.core.n()).find(|&v| !covered[v] && !isolated_ok.contains(&v)) {
        return input(format!("subgraph is not spanning: {} has no edge", t.core.name(v)));
    }
    let f = t.core.with_edges(f_edges);
    let smax = t.radius - 2;
    let layers: Vec<(VSet, Layer)> = (0..=smax)
        .map(|s| {
            let sep = t.ball_set(s);
            let l = layer(t, &f, &sep);
            (sep, l)
        })
        .collect();
    let names = |c: &[usize]| c.iter().map(|&v| t.core.name(v).to_string()).collect::<Vec<_>>();
    let witness_edges = |sep: &VSet, comps: &[&Vec<usize>]| {
        let mut es = Vec::new();
        for c in comps {
            for &v in c.iter() {
                for &w in f.neighbors(v) {
                    if sep.contains(&w) {
                        es.push((t.core.name(w).to_string(), t.core.name(v).to_string()));
                    }
                }
            }
        }
        es
    };
    for (s, (sep, l)) in layers.iter().enumerate() {
        for (hi, h) in l.host.iter().enumerate() {
            if !l.sub.iter().any(|(_, o)| *o == hi) {
                return Ok(AuditVerdict::Violation {
                    depth: t.radius,
                    witness: Box::new(AuditWitness {
                        condition: 1,
                        separator_radius: s,
                        separator: names(&sep.iter().copied().collect::<Vec<_>>()),
                        host_component: names(h),
                        sub_components: Vec::new(),
                        edges: Vec::new(),
                    }),
                });
            }
        }
        for a in 0..l.sub.len() {
            for b in a + 1..l.sub.len() {
                if l.sub[a].1 != l.sub[b].1 {
                    continue;
                }
                let (ca, cb) = (&l.sub[a].0, &l.sub[b].0);
                let persists = layers[s + 1..].iter().all(|(_, deeper)| {
                    let mut hosts_a = BTreeSet::new();
                    let mut hosts_b = BTreeSet::new();
                    for (c, o) in &deeper.sub {
                        if ca.binary_search(&c[0]).is_ok() {
                            hosts_a.insert(*o);
                        } else if cb.binary_search(&c[0]).is_ok() {
                            hosts_b.insert(*o);
                        }
                    }
                    !hosts_a.is_disjoint(&hosts_b)
                });
                if persists {
                    return Ok(AuditVerdict::Violation {
                        depth: t.radius,
                        witness: Box::new(AuditWitness {
                            condition: 2,
                            separator_radius: s,
                            separator: names(&sep.iter().copied().collect::<Vec<_>>()),
                            host_component: names(&l.host[l.sub[a].1]),
                            sub_components: vec![names(ca), names(cb)],
                            edges: witness_edges(sep, &[ca, cb]),
                        }),
                    });
                }
            }
        }
    }
    Ok(AuditVerdict::CleanAtDepth { depth: t.radius })
}

/// One link `sub ≤ host` of a faithfulness chain, with its audit verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainLink {
    pub sub: BTreeSet<(String, String)>,
    pub host: BTreeSet<(String, String)>,
    pub verdict: AuditVerdict,
}

impl ChainLink {
    /// Edge sets given by vertex names; each pair is stored in canonical order.
    pub fn new(sub: &[(String, String)], host: &[(String, String)], verdict: AuditVerdict) -> Self {
        let canon = |es: &[(String, String)]| {
            es.iter()
                .map(|(a, b)| if canonical_cmp(a, b).is_le() { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) })
                .collect()
        };
        ChainLink { sub: canon(sub), host: canon(host), verdict }
    }
}

/// Combines audits of `D ≤ F ≤ G ≤ …` (listed bottom-up): the first
/// violation is forwarded, otherwise the chain is clean at the smallest depth.
pub fn compose_faithful_chain(links: &[ChainLink]) -> Result<AuditVerdict> {
    if links.is_empty() {
        return input("empty chain");
    }
    for (i, l) in links.iter().enumerate() {
        if !l.sub.is_subset(&l.host) {
            return input(format!("link {i}: subgraph is not contained in its host"));
        }
        if i + 1 < links.len() && l.host != links[i + 1].sub {
            return input(format!("links {i} and {} do not nest", i + 1));
        }
    }
    if let Some(v) = links.iter().find(|l| !l.verdict.is_clean()) {
        return Ok(v.verdict.clone());
    }
    let depth = links.iter().map(|l| l.verdict.depth()).min().unwrap();
    Ok(AuditVerdict::CleanAtDepth { depth })
}

pub const DEFAULT_COMB_TEETH: usize = 5;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CombOutcome {
    /// A spine with disjoint teeth ending in the target set; each tooth
    /// starts on the spine and meets it only there.
    Comb { spine: Vec<usize>, teeth: Vec<Vec<usize>> },
    /// A centre with disjoint paths to distinct target vertices.
    Star { center: usize, paths: Vec<Vec<usize>> },
}

/// Finite comb-or-star extraction for the target set `u` with `m` teeth.
pub fn comb_extract(t: &Truncation, u: &VSet, m: usize) -> Result<CombOutcome> {
    t.core.check_set(u)?;
    if m == 0 || u.len() < m {
        return input(format!("target set has {} vertices, needs at least {m}", u.len()));
    }
    let g = &t.core;
    for c in 0..g.n() {
        let target: VSet = u.iter().copied().filter(|&x| x != c).collect();
        if g.degree(c) < m {
            continue;
        }
        if let Some(paths) = fan(g, c, &target, m, &[]) {
            return Ok(CombOutcome::Star { center: c, paths });
        }
    }
    let mut spines: Vec<Vec<usize>> = Vec::new();
    let us: Vec<usize> = u.iter().copied().take(40).collect();
    for i in 0..us.len() {
        for j in i + 1..us.len() {
            if let Some(p) = shortest_path(g, us[i], us[j], &[]) {
                spines.push(p);
            }
        }
    }
    for &f in &t.frontier {
        if let Some(p) = shortest_path(g, t.root, f, &[]) {
            spines.push(p);
        }
    }
    let sinks: Vec<usize> = u.iter().copied().collect();
    let mut best: Option<(Vec<usize>, Vec<Vec<usize>>)> = None;
    for spine in spines {
        let r = pack(
            g,
            &Packing {
                mode: Mode::Vertex,
                sources: &spine,
                source_cap: 1,
                sinks: &sinks,
                sink_cap: 1,
                blocked: &[],
                limit: usize::MAX,
                short: true,
            },
        );
        let teeth = r.paths.paths;
        let better = match &best {
            None => true,
            Some((s, t)) => teeth.len() > t.len() || (teeth.len() == t.len() && spine.len() < s.len()),
        };
        if better {
            best = Some((spine, teeth));
        }
    }
    match best {
        Some((spine, mut teeth)) if teeth.len() >= m => {
            teeth.sort();
            Ok(CombOutcome::Comb { spine, teeth })
        }
        _ => Err(Error::DepthInsufficient(format!("no comb or star with {m} teeth in this ball"))),
    }
}
