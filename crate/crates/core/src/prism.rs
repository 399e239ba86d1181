//! Hamiltonian cycles in prisms of even cacti and semi-cacti, curve and
//! end-degree checks on truncations, truncated circle certificates, and the
//! pipeline for cubic 3-connected hosts.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bipartite::{bipartite_rounds_on, faithful_bipartite_rounds, BipartiteCertificate};
use crate::cactus::{cycle_edges, spanning_cactus_rounds, validate_cactus, validate_cactus_on, Cactus, SemiCactus};
use crate::cert::{verify_certificate, CutEvidence, HostGraph, PrismHamCertificate, CERTIFICATE_FORMAT};
use crate::error::{assertion, input, Error, Result};
use crate::flow::{pack, Mode, Packing};
use crate::graph::{components_masked, norm, prism_id, prism_index, split_prism_id, Edge, Multigraph, VSet};
use crate::infinite::{assert_cubic_3connected, ball, faithfulness_audit, mask, GeneratorGraph, Truncation};
use crate::search::{cycle_through, CycleSearch};

/// The subgraph `edges` as a graph on `vertices` alone.
pub(crate) fn local_graph(g: &Multigraph, vertices: &VSet, edges: &[Edge]) -> Result<Multigraph> {
    let names: Vec<&str> = vertices.iter().map(|&v| g.name(v)).collect();
    let es: Vec<(&str, &str)> = edges.iter().map(|&(a, b)| (g.name(a), g.name(b))).collect();
    Multigraph::new(&names, &es)
}

/// A Hamiltonian cycle of `c □ K2` as `(vertex, side)` pairs, where `c` is
/// an even cactus validated on `h`.
///
/// Every even cycle gets the zigzag cycle that uses all its rungs, every
/// vertex off the cycles gets a doubled rung, and each remaining edge `ab`
/// trades one rung at `a` and one at `b` for its two copies.
pub(crate) fn prism_walk(h: &Multigraph, c: &Cactus) -> Result<Vec<(usize, u8)>> {
    let verts: Vec<usize> = c.vertices.iter().copied().collect();
    let n = verts.len();
    if n < 2 {
        return input("a prism cycle needs at least two vertices");
    }
    if let Some(cy) = c.cycles.iter().find(|cy| cy.len() % 2 == 1) {
        return input(format!("odd cycle through {}", h.name(cy[0])));
    }
    let at = |v: usize| verts.binary_search(&v).expect("cactus vertex");
    let node = |v: usize, s: u8| 2 * at(v) + s as usize;
    let mut ends: Vec<(usize, usize)> = Vec::new();
    let mut alive: Vec<bool> = Vec::new();
    fn push(a: usize, b: usize, ends: &mut Vec<(usize, usize)>, alive: &mut Vec<bool>) -> usize {
        ends.push((a, b));
        alive.push(true);
        ends.len() - 1
    }
    let mut rungs: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut on_cycle = vec![false; n];
    for cy in &c.cycles {
        let k = cy.len();
        for i in 0..k {
            let (a, b) = (cy[i], cy[(i + 1) % k]);
            let s = (i % 2) as u8;
            push(node(a, s), node(b, s), &mut ends, &mut alive);
            on_cycle[at(a)] = true;
            let r = push(node(a, 0), node(a, 1), &mut ends, &mut alive);
            rungs[at(a)].push(r);
        }
    }
    for (i, &v) in verts.iter().enumerate() {
        if !on_cycle[i] {
            for _ in 0..2 {
                let r = push(node(v, 0), node(v, 1), &mut ends, &mut alive);
                rungs[i].push(r);
            }
        }
    }
    let on: BTreeSet<Edge> = c.cycles.iter().flat_map(|cy| cycle_edges(cy)).collect();
    for &(a, b) in &c.edges {
        if on.contains(&norm((a, b))) {
            continue;
        }
        for x in [a, b] {
            match rungs[at(x)].pop() {
                Some(r) => alive[r] = false,
                None => return assertion(format!("no rung left at {}", h.name(x))),
            }
        }
        push(node(a, 0), node(b, 0), &mut ends, &mut alive);
        push(node(a, 1), node(b, 1), &mut ends, &mut alive);
    }
    let mut inc: Vec<Vec<usize>> = vec![Vec::new(); 2 * n];
    for (i, &(a, b)) in ends.iter().enumerate() {
        if alive[i] {
            inc[a].push(i);
            inc[b].push(i);
        }
    }
    if let Some(x) = inc.iter().position(|l| l.len() != 2) {
        return assertion(format!("prism node {x} has {} cycle edges", inc[x].len()));
    }
    let mut seq = Vec::with_capacity(2 * n);
    let (mut cur, mut via) = (0usize, usize::MAX);
    loop {
        seq.push((verts[cur / 2], (cur % 2) as u8));
        let e = if inc[cur][0] != via { inc[cur][0] } else { inc[cur][1] };
        let (a, b) = ends[e];
        cur = if a == cur { b } else { a };
        via = e;
        if cur == 0 {
            break;
        }
        if seq.len() > 2 * n {
            return assertion("prism walk does not close");
        }
    }
    if seq.len() != 2 * n {
        return assertion(format!("prism walk closes after {} of {} vertices", seq.len(), 2 * n));
    }
    Ok(seq)
}

fn walk_names(g: &Multigraph, seq: &[(usize, u8)]) -> Vec<String> {
    seq.iter().map(|&(v, s)| prism_id(g.name(v), s)).collect()
}

/// FINITE certificate for the prism of the even cactus `c` (a subgraph of
/// `g`), verified before it is returned.
pub fn even_cactus_prism_hamcycle(g: &Multigraph, c: &Cactus) -> Result<PrismHamCertificate> {
    if validate_cactus_on(g, &c.vertices, &c.edges).is_err() {
        return input("not a cactus");
    }
    let seq = prism_walk(g, c)?;
    let h = local_graph(g, &c.vertices, &c.edges)?;
    let cert = PrismHamCertificate::finite(HostGraph::of("cactus", &h), walk_names(g, &seq));
    verify_certificate(&cert).map_err(|e| Error::Assertion(format!("cactus prism walk-check: {e}")))?;
    Ok(cert)
}

/// FINITE certificate for the prism of the even semi-cactus `s` (a
/// subgraph of `g`): every vertex on two cycles is cleaved into cycle-mate
/// halves joined by a new edge, the cactus cycle is built, and the two
/// copies of each new edge are contracted.
pub fn semicactus_prism_hamcycle(g: &Multigraph, s: &SemiCactus) -> Result<PrismHamCertificate> {
    let seq = semicactus_walk(g, s)?;
    let h = local_graph(g, &s.vertices, &s.edges)?;
    let cert = PrismHamCertificate::finite(HostGraph::of("semicactus", &h), walk_names(g, &seq));
    verify_certificate(&cert).map_err(|e| Error::Assertion(format!("semi-cactus prism walk-check: {e}")))?;
    Ok(cert)
}

/// The cycle of `semicactus_prism_hamcycle` as `(vertex, side)` pairs over `g`.
pub(crate) fn semicactus_walk(g: &Multigraph, s: &SemiCactus) -> Result<Vec<(usize, u8)>> {
    if !s.even {
        return input("semi-cactus has an odd cycle");
    }
    let h = local_graph(g, &s.vertices, &s.edges)?;
    let hv = |v: usize| h.index(g.name(v)).expect("semi-cactus vertex");
    let blocks: Vec<Vec<usize>> = s.blocks.iter().map(|b| b.iter().map(|&v| hv(v)).collect()).collect();
    let is_cycle = |b: &Vec<usize>| b.len() > 2 || h.multiplicity(b[0], b[1]) >= 2;
    let split: Vec<usize> = (0..h.n()).filter(|&v| h.degree(v) == 4).collect();
    let mut first_block: BTreeMap<usize, usize> = BTreeMap::new();
    for &u in &split {
        let on: Vec<usize> = (0..blocks.len()).filter(|&i| is_cycle(&blocks[i]) && blocks[i].contains(&u)).collect();
        if on.len() != 2 {
            return input(format!("{} has degree 4 but lies on {} cycles", h.name(u), on.len()));
        }
        first_block.insert(u, on[0]);
    }
    let mut names: Vec<String> = Vec::new();
    let mut origin: Vec<usize> = Vec::new();
    let mut copy: BTreeMap<(usize, u8), String> = BTreeMap::new();
    for v in 0..h.n() {
        if first_block.contains_key(&v) {
            for k in 1..=2u8 {
                let nm = format!("{}:{k}", h.name(v));
                if h.index(&nm).is_some() {
                    return input(format!("cleave id {nm} already used"));
                }
                copy.insert((v, k), nm.clone());
                names.push(nm);
                origin.push(v);
            }
        } else {
            copy.insert((v, 0), h.name(v).to_string());
            names.push(h.name(v).to_string());
            origin.push(v);
        }
    }
    let end = |x: usize, bi: usize| -> String {
        match first_block.get(&x) {
            Some(&f) => copy[&(x, if f == bi { 1 } else { 2 })].clone(),
            None => copy[&(x, 0)].clone(),
        }
    };
    let mut es: Vec<(String, String)> = Vec::new();
    for (bi, b) in blocks.iter().enumerate() {
        let edges: Vec<Edge> = if b.len() > 2 {
            cycle_edges(b)
        } else {
            vec![norm((b[0], b[1])); h.multiplicity(b[0], b[1])]
        };
        for (a, c) in edges {
            es.push((end(a, bi), end(c, bi)));
        }
    }
    for &u in &split {
        es.push((copy[&(u, 1)].clone(), copy[&(u, 2)].clone()));
    }
    let k = Multigraph::new(&names, &es)?;
    let cactus = validate_cactus(&k).map_err(|v| Error::Assertion(format!("cleaving left no cactus: {}", v.clause)))?;
    if !cactus.even {
        return assertion("cleaving produced an odd cycle");
    }
    let seq = prism_walk(&k, &cactus)?;
    let len = seq.len();
    let pos: BTreeMap<(usize, u8), usize> = seq.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    for &u in &split {
        let (a, b) = (k.id(&copy[&(u, 1)])?, k.id(&copy[&(u, 2)])?);
        for side in 0..2u8 {
            let (i, j) = (pos[&(a, side)], pos[&(b, side)]);
            if (i + 1) % len != j && (j + 1) % len != i {
                return assertion(format!("cycle avoids copy {side} of the edge added at {}", h.name(u)));
            }
        }
    }
    let kname = |v: usize| origin[names.iter().position(|x| x == k.name(v)).unwrap()];
    let mut out: Vec<(usize, u8)> = Vec::with_capacity(len);
    for &(v, side) in &seq {
        let p = (kname(v), side);
        if out.last() != Some(&p) {
            out.push(p);
        }
    }
    if out.len() > 1 && out.first() == out.last() {
        out.pop();
    }
    Ok(out.into_iter().map(|(v, side)| (g.index(h.name(v)).expect("semi-cactus vertex"), side)).collect())
}

const CURVE_BUDGET: usize = 200_000;
const EXHAUSTIVE_TRIPLES: usize = 50_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveVerdict {
    pub spec: String,
    pub depth: usize,
    /// Size of the inner ball the sets were drawn from.
    pub inner: usize,
    /// Every subset of the inner ball up to this size was tested.
    pub exhaustive_up_to: usize,
    pub tested: usize,
    pub sampled: usize,
    /// Sets whose cycle search ran out of budget.
    pub undecided: usize,
    pub pass: bool,
    pub failing: Option<Vec<String>>,
}

/// Looks for a cycle of the truncation through every small subset of the
/// inner ball and through `sample_budget` random larger subsets.
pub fn hamiltonian_curve_check(g: &GeneratorGraph, depth: usize, sample_budget: usize, seed: u64) -> Result<CurveVerdict> {
    if depth < 2 {
        return input("curve check needs depth >= 2");
    }
    let t = ball(g, depth)?;
    let inner: Vec<usize> = t.ball_set(depth - 2).into_iter().collect();
    let m = inner.len();
    let mut sets: Vec<Vec<usize>> = Vec::new();
    if m == 1 {
        sets.push(inner.clone());
    }
    for i in 0..m {
        for j in i + 1..m {
            sets.push(vec![inner[i], inner[j]]);
        }
    }
    let triples = m * m.saturating_sub(1) * m.saturating_sub(2) / 6;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let exhaustive_up_to = if triples <= EXHAUSTIVE_TRIPLES {
        for i in 0..m {
            for j in i + 1..m {
                for k in j + 1..m {
                    sets.push(vec![inner[i], inner[j], inner[k]]);
                }
            }
        }
        m.min(3)
    } else {
        m.min(2)
    };
    let mut sampled = 0;
    for _ in 0..sample_budget {
        let k = if exhaustive_up_to >= 3 { 4 } else { 3 };
        if m < k {
            break;
        }
        let size = k + sampled % 3;
        let size = size.min(m);
        let mut s: Vec<usize> = inner.choose_multiple(&mut rng, size).copied().collect();
        s.sort_unstable();
        sets.push(s);
        sampled += 1;
    }
    let mut found: Vec<Vec<bool>> = Vec::new();
    let mut verdict = CurveVerdict {
        spec: t.spec.clone(),
        depth,
        inner: m,
        exhaustive_up_to,
        tested: 0,
        sampled,
        undecided: 0,
        pass: true,
        failing: None,
    };
    for s in sets {
        verdict.tested += 1;
        if found.iter().any(|c| s.iter().all(|&v| c[v])) {
            continue;
        }
        match cycle_through(&t.core, &s, &[], false, t.core.n(), CURVE_BUDGET) {
            CycleSearch::Found(c) => found.push(mask(t.core.n(), &c.into_iter().collect())),
            CycleSearch::BudgetExceeded => verdict.undecided += 1,
            CycleSearch::NotFound => {
                verdict.pass = false;
                verdict.failing = Some(s.iter().map(|&v| t.core.name(v).to_string()).collect());
                return Ok(verdict);
            }
        }
    }
    verdict.pass = verdict.undecided == 0;
    Ok(verdict)
}

/// One stage of a nested construction on a truncation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FRound {
    pub vertices: VSet,
    pub edges: Vec<Edge>,
}

impl FRound {
    pub fn of_cactus(c: &Cactus) -> Self {
        FRound { vertices: c.vertices.clone(), edges: c.edges.clone() }
    }
}

/// Rounds given by the balls of radius `0..=radius-2` inside `f_edges`.
pub fn ball_rounds(t: &Truncation, f_edges: &[Edge]) -> Vec<FRound> {
    (0..t.radius.saturating_sub(1))
        .map(|s| {
            let vs = t.ball_set(s);
            let es = f_edges.iter().copied().filter(|(a, b)| vs.contains(a) && vs.contains(b)).collect();
            FRound { vertices: vs, edges: es }
        })
        .chain(std::iter::once(FRound {
            vertices: (0..t.core.n()).collect(),
            edges: f_edges.to_vec(),
        }))
        .collect()
}

/// The rounds `F_i □ K2` on the prism of the truncation.
pub fn prism_rounds(t: &Truncation, rounds: &[FRound]) -> (Truncation, Vec<FRound>) {
    let p = t.prism();
    let at = |v: usize, s: u8| prism_index(&p.core, &t.core, v, s);
    let lifted = rounds
        .iter()
        .map(|r| {
            let mut vs = VSet::new();
            let mut es = Vec::new();
            for &v in &r.vertices {
                vs.insert(at(v, 0));
                vs.insert(at(v, 1));
                es.push(norm((at(v, 0), at(v, 1))));
            }
            for &(a, b) in &r.edges {
                for s in 0..2 {
                    es.push(norm((at(a, s), at(b, s))));
                }
            }
            es.sort_unstable();
            FRound { vertices: vs, edges: es }
        })
        .collect();
    (p, lifted)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum CheckVerdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndDegreeCheck {
    pub k: usize,
    /// Largest packing value over the escaping approximants, per separator.
    pub per_separator: Vec<usize>,
    /// Largest neighbourhood of an escaping approximant, per separator.
    pub neighborhoods: Vec<usize>,
    pub approximants: Vec<usize>,
    pub upper: Option<usize>,
    pub verdict: CheckVerdict,
}

/// Bounds the degrees of the ends of `F` (the last round) using the earlier
/// rounds as separators: for every component of `F - V(F_i)` that reaches
/// the boundary of `F`, disjoint paths from its attachment vertices to the
/// boundary are packed inside it.
///
/// The boundary of `F` is the set of its vertices on the frontier or with a
/// neighbour outside `V(F)`.
pub fn end_degree_le_check(t: &Truncation, f_rounds: &[FRound], k: usize) -> Result<EndDegreeCheck> {
    end_degree_check(t, f_rounds, k, false)
}

/// Like [`end_degree_le_check`], but paths from a component of `F - V(F_i)`
/// are packed into one component of `F - V(F_{i+1})` inside it at a time, so
/// a component holding several ends is not charged their sum. The last
/// round serves only as `F`.
pub fn end_degree_nested_check(t: &Truncation, f_rounds: &[FRound], k: usize) -> Result<EndDegreeCheck> {
    end_degree_check(t, f_rounds, k, true)
}

fn end_degree_check(t: &Truncation, f_rounds: &[FRound], k: usize, nested: bool) -> Result<EndDegreeCheck> {
    if f_rounds.len() < 2 + usize::from(nested) {
        return input("end-degree check needs more rounds");
    }
    let last = f_rounds.last().unwrap();
    let n = t.core.n();
    let f = t.core.with_edges(&last.edges);
    let inside = mask(n, &last.vertices);
    let boundary: Vec<bool> = (0..n)
        .map(|v| inside[v] && (t.frontier.contains(&v) || t.core.neighbors(v).iter().any(|&w| !inside[w])))
        .collect();
    let escaping = |sep: &[bool]| -> Vec<Vec<usize>> {
        let blocked: Vec<bool> = (0..n).map(|v| !inside[v] || sep[v]).collect();
        components_masked(&f, &blocked).into_iter().filter(|c| c.iter().any(|&v| boundary[v])).collect()
    };
    let mut out = EndDegreeCheck {
        k,
        per_separator: Vec::new(),
        neighborhoods: Vec::new(),
        approximants: Vec::new(),
        upper: None,
        verdict: CheckVerdict::Inconclusive,
    };
    let seps = f_rounds.len() - 1 - usize::from(nested);
    for i in 0..seps {
        let sep = mask(n, &f_rounds[i].vertices);
        let inner = nested.then(|| escaping(&mask(n, &f_rounds[i + 1].vertices)));
        let (mut best, mut widest, mut count) = (0, 0, 0);
        for c in escaping(&sep) {
            count += 1;
            let nb: BTreeSet<usize> =
                c.iter().flat_map(|&v| f.neighbors(v).iter().copied()).filter(|&w| sep[w]).collect();
            let sources: Vec<usize> = c.iter().copied().filter(|&v| f.neighbors(v).iter().any(|&w| sep[w])).collect();
            let cset = mask(n, &c.iter().copied().collect());
            let outside: Vec<bool> = cset.iter().map(|b| !b).collect();
            let targets: Vec<Vec<usize>> = match &inner {
                None => vec![c.iter().copied().filter(|&v| boundary[v]).collect()],
                Some(cs) => cs.iter().filter(|d| cset[d[0]]).cloned().collect(),
            };
            for sinks in &targets {
                let res = pack(
                    &f,
                    &Packing {
                        mode: Mode::Vertex,
                        sources: &sources,
                        source_cap: 1,
                        sinks,
                        sink_cap: 1,
                        blocked: &outside,
                        limit: usize::MAX,
                        short: false,
                    },
                );
                best = best.max(res.paths.paths.len());
            }
            widest = widest.max(nb.len());
        }
        out.per_separator.push(best);
        out.neighborhoods.push(widest);
        out.approximants.push(count);
    }
    let p = &out.per_separator;
    if p.len() >= 2 && p[p.len() - 1] == p[p.len() - 2] && out.approximants.last() != Some(&0) {
        let u = p[p.len() - 1];
        out.upper = Some(u);
        out.verdict = if u <= k { CheckVerdict::Pass } else { CheckVerdict::Fail };
    }
    Ok(out)
}

pub const DEFAULT_A_MAX: usize = 4;
pub const DEFAULT_PAIR_BUDGET: usize = 50_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CircleOptions {
    pub a_max: usize,
    pub pair_budget: usize,
}

impl Default for CircleOptions {
    fn default() -> Self {
        CircleOptions { a_max: DEFAULT_A_MAX, pair_budget: DEFAULT_PAIR_BUDGET }
    }
}

/// Connected vertex sets of `g` inside `region` with 2 to `a_max` vertices.
fn connected_sets(g: &Multigraph, region: &[bool], a_max: usize) -> Vec<Vec<usize>> {
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut layer: Vec<Vec<usize>> = (0..g.n()).filter(|&v| region[v]).map(|v| vec![v]).collect();
    let mut out = Vec::new();
    for _ in 1..a_max {
        let mut next = Vec::new();
        for s in &layer {
            for &v in s {
                for &w in g.neighbors(v) {
                    if !region[w] || s.binary_search(&w).is_ok() {
                        continue;
                    }
                    let mut t = s.clone();
                    let p = t.binary_search(&w).unwrap_err();
                    t.insert(p, w);
                    if seen.insert(t.clone()) {
                        next.push(t);
                    }
                }
            }
        }
        next.sort();
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// TRUNCATED certificate for `t □ K2` from nested rounds whose last member
/// is an even cactus: the Hamiltonian cycle of its prism, restricted to the
/// inner region, with cut-parity and pairwise-cut evidence.
///
/// The inner region is `ball(s) × K2` for the largest `s` with
/// `ball(s + 1)` inside the last round and `s + 2 <= radius`.
pub fn build_circle_certificate(t: &Truncation, f_rounds: &[FRound], opts: CircleOptions) -> Result<PrismHamCertificate> {
    let last = f_rounds.last().ok_or_else(|| Error::Input("no rounds".into()))?;
    let c = validate_cactus_on(&t.core, &last.vertices, &last.edges)
        .map_err(|v| Error::Input(format!("last round is not a cactus: {}", v.clause)))?;
    if !c.even {
        return input("last round has an odd cycle");
    }
    let seq = prism_walk(&t.core, &c)?;
    circle_certificate_from_cycle(t, f_rounds, &seq, opts)
}

/// TRUNCATED certificate from a Hamiltonian cycle `seq` of `F □ K2`, where
/// `F` is the last round; the cycle is given as `(vertex, side)` pairs over
/// the core of `t`.
pub fn circle_certificate_from_cycle(
    t: &Truncation,
    f_rounds: &[FRound],
    seq: &[(usize, u8)],
    opts: CircleOptions,
) -> Result<PrismHamCertificate> {
    let last = f_rounds.last().ok_or_else(|| Error::Input("no rounds".into()))?;
    if seq.len() != 2 * last.vertices.len() {
        return input("cycle does not cover the prism of the last round");
    }
    let mut s_in = None;
    for s in 0..=t.radius.saturating_sub(2) {
        if t.ball_set(s + 1).is_subset(&last.vertices) {
            s_in = Some(s);
        } else {
            break;
        }
    }
    let s_in = s_in.ok_or_else(|| Error::DepthInsufficient("last round misses a neighbour of the root".into()))?;
    let pt = t.prism();
    let p = &pt.core;
    let order: Vec<usize> = seq.iter().map(|&(v, s)| prism_index(p, &t.core, v, s)).collect();
    let len = order.len();
    let inner = pt.ball_set(s_in);
    let region = mask(p.n(), &inner);
    let cyc: Vec<Edge> = (0..len).map(|i| norm((order[i], order[(i + 1) % len]))).collect();
    let factor: Vec<Edge> = {
        let mut f: Vec<Edge> = cyc.iter().copied().filter(|&(a, b)| region[a] || region[b]).collect();
        f.sort_unstable();
        f
    };
    let fset: BTreeSet<Edge> = factor.iter().copied().collect();
    let crossing = |side: &[usize]| -> usize {
        let m = mask(p.n(), &side.iter().copied().collect());
        factor.iter().filter(|&&(a, b)| m[a] != m[b]).count()
    };
    let name = |v: usize| p.name(v).to_string();
    let mut cuts: Vec<CutEvidence> = Vec::new();
    let mut record = |family: &str, side: Vec<usize>| -> Result<()> {
        let k = crossing(&side);
        if k == 0 || k % 2 == 1 {
            return assertion(format!(
                "{family} cut {:?} meets the two-factor {k} times",
                side.iter().map(|&v| name(v)).collect::<Vec<_>>()
            ));
        }
        cuts.push(CutEvidence { family: family.to_string(), side: side.iter().map(|&v| name(v)).collect(), crossing: k });
        Ok(())
    };
    for &v in &inner {
        record("vertex", vec![v])?;
    }
    for s in connected_sets(p, &region, opts.a_max) {
        record("connected", s)?;
    }
    let mut done: BTreeSet<Vec<usize>> = BTreeSet::new();
    for r in &f_rounds[..f_rounds.len() - 1] {
        let side: Vec<usize> = inner
            .iter()
            .copied()
            .filter(|&v| r.vertices.contains(&t.core.index(split_prism_id(p.name(v)).unwrap().0).unwrap()))
            .collect();
        if !side.is_empty() && side.len() < inner.len() && done.insert(side.clone()) {
            record("round", side)?;
        }
    }
    for s in 0..=s_in {
        let side: Vec<usize> = pt.ball_set(s).into_iter().collect();
        if done.insert(side.clone()) {
            record("column", side)?;
        }
    }
    let within: Vec<usize> = (0..len).filter(|&i| region[cyc[i].0] && region[cyc[i].1]).collect();
    let mut pairs = Vec::new();
    let mut unwitnessed = 0;
    for (x, &i) in within.iter().enumerate() {
        for &j in &within[x + 1..] {
            if pairs.len() < opts.pair_budget {
                pairs.push((i, j));
            } else {
                unwitnessed += 1;
            }
        }
    }
    debug_assert!(within.iter().all(|&i| fset.contains(&cyc[i])));
    let base = HostGraph::of(&t.spec, &t.core);
    Ok(PrismHamCertificate {
        format: CERTIFICATE_FORMAT.to_string(),
        mode: crate::cert::CertMode::Truncated,
        host: base,
        depth: Some(s_in),
        cycle: Vec::new(),
        region: inner.iter().map(|&v| name(v)).collect(),
        two_factor: factor.iter().map(|&(a, b)| (name(a), name(b))).collect(),
        cut_families: ["vertex", "connected", "round", "column"].iter().map(|s| s.to_string()).collect(),
        cuts,
        order: order.iter().map(|&v| name(v)).collect(),
        pairs,
        unwitnessed_pairs: unwitnessed,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageReport {
    pub stage: String,
    pub ok: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub spec: String,
    pub mode: String,
    pub rounds: usize,
    pub radius: usize,
    pub stages: Vec<StageReport>,
    pub verdict: String,
    pub failed_stage: Option<String>,
    pub certificate: Option<PrismHamCertificate>,
}

impl PipelineReport {
    pub(crate) fn new(spec: &str, mode: &str, rounds: usize) -> Self {
        PipelineReport {
            spec: spec.to_string(),
            mode: mode.to_string(),
            rounds,
            radius: 0,
            stages: Vec::new(),
            verdict: String::new(),
            failed_stage: None,
            certificate: None,
        }
    }

    pub(crate) fn pass(&mut self, stage: &str, detail: impl Into<String>) {
        self.stages.push(StageReport { stage: stage.to_string(), ok: true, detail: detail.into() });
    }

    pub(crate) fn fail(mut self, stage: &str, detail: impl Into<String>) -> Self {
        self.stages.push(StageReport { stage: stage.to_string(), ok: false, detail: detail.into() });
        self.verdict = format!("FAILED:{stage}");
        self.failed_stage = Some(stage.to_string());
        self
    }

    /// Stops at `stage` because the ball ran out before the construction did.
    pub(crate) fn exhausted(mut self, stage: &str, detail: impl Into<String>) -> Self {
        self = self.fail(stage, detail);
        self.verdict = format!("INCONCLUSIVE:{stage}");
        self
    }

    pub fn inconclusive(&self) -> bool {
        self.verdict.starts_with("INCONCLUSIVE:")
    }

    pub fn supported(&self) -> bool {
        self.failed_stage.is_none()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PipelineOptions {
    pub rounds: usize,
    pub depth: usize,
    pub max_radius: usize,
    pub circle: CircleOptions,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions { rounds: 2, depth: 6, max_radius: crate::bipartite::DEFAULT_MAX_RADIUS, circle: CircleOptions::default() }
    }
}

/// `sub` plus every host edge with an endpoint outside `vs`.
fn completion(g: &Multigraph, vs: &VSet, sub: &[Edge]) -> Vec<Edge> {
    let mut es = sub.to_vec();
    es.extend(g.edges().into_iter().filter(|(a, b)| !vs.contains(a) || !vs.contains(b)));
    es
}

/// Spanning even cactus rounds of the bipartite subgraph `f`, lifted to `g`.
fn cactus_of(g: &Multigraph, f: &BipartiteCertificate, root: usize) -> Result<(Vec<Cactus>, bool)> {
    let (h, map) = g.edge_induced(&f.edges);
    let r = map.iter().position(|&v| v == root).ok_or_else(|| Error::Input("root outside the bipartite subgraph".into()))?;
    let run = spanning_cactus_rounds(&h, r, h.n())?;
    if !run.spanning {
        return assertion("cactus rounds stopped before spanning");
    }
    if let Some(e) = run.evidence.iter().find(|e| !e.passed()) {
        return assertion(format!("cactus round {} failed its checks: {e:?}", e.round));
    }
    let mut out = Vec::new();
    for rd in &run.rounds {
        let vs: VSet = rd.f.vertices.iter().map(|&v| map[v]).collect();
        let es: Vec<Edge> = rd.f.edges.iter().map(|&(a, b)| norm((map[a], map[b]))).collect();
        let c = validate_cactus_on(g, &vs, &es).map_err(|v| Error::Assertion(format!("lifted cactus: {}", v.clause)))?;
        out.push(c);
    }
    let even = out.iter().all(|c| c.even);
    Ok((out, even))
}

/// Bipartite rounds, spanning even cactus, prism Hamiltonian cycle and
/// certificate for a finite cubic 3-connected graph.
pub fn cubic3_finite_pipeline(name: &str, g: &Multigraph) -> Result<PipelineReport> {
    let mut rep = PipelineReport::new(name, "FINITE", 0);
    if g.n() < 4 {
        return Ok(rep.fail("precondition", "fewer than four vertices"));
    }
    let gen = GeneratorGraph::from_finite(name, g, 0)?;
    let t = ball(&gen, g.n())?;
    rep.radius = t.radius;
    if let Err(e) = assert_cubic_3connected(&t, 0) {
        return Ok(rep.fail("precondition", e.to_string()));
    }
    rep.pass("precondition", "cubic and 3-connected");
    let mut k = 1;
    let f = loop {
        match bipartite_rounds_on(&t, k) {
            Ok((rs, None)) => {
                let f = rs.last().unwrap().f.clone();
                if f.vertices.len() == g.n() {
                    rep.rounds = rs.len();
                    break f;
                }
                if k >= g.n() {
                    return Ok(rep.fail("bipartite", "rounds stopped growing before spanning"));
                }
                k += 1;
            }
            Ok((_, Some(e))) | Err(e) => return Ok(rep.fail("bipartite", e.to_string())),
        }
    };
    rep.pass("bipartite", format!("{} rounds, {} edges", rep.rounds, f.edges.len()));
    let (cacti, even) = match cactus_of(&t.core, &f, t.root) {
        Ok(x) => x,
        Err(e) => return Ok(rep.fail("cactus", e.to_string())),
    };
    if !even {
        return Ok(rep.fail("cactus", "odd cycle in a bipartite cactus"));
    }
    rep.pass("cactus", format!("{} rounds", cacti.len()));
    let c = cacti.last().unwrap();
    let seq = match prism_walk(&t.core, c) {
        Ok(s) => s,
        Err(e) => return Ok(rep.fail("prism-cycle", e.to_string())),
    };
    let cert = PrismHamCertificate::finite(HostGraph::of(name, g), walk_names(&t.core, &seq));
    if let Err(e) = verify_certificate(&cert) {
        return Ok(rep.fail("certificate", e.to_string()));
    }
    rep.pass("prism-cycle", format!("Hamiltonian cycle of length {}", seq.len()));
    rep.pass("certificate", "walk-checked");
    rep.verdict = "HAMILTONIAN".to_string();
    rep.certificate = Some(cert);
    Ok(rep)
}

/// Bipartite rounds, spanning even cactus, audits, end-degree checks and a
/// truncated circle certificate for a cubic 3-connected host.
pub fn cubic3_prism_circle_pipeline(g: &GeneratorGraph, opts: PipelineOptions) -> Result<PipelineReport> {
    let mut rep = PipelineReport::new(&g.spec(), "TRUNCATED", opts.rounds);
    let run = match faithful_bipartite_rounds(g, opts.rounds, opts.depth, opts.max_radius) {
        Ok(r) => r,
        Err(e @ Error::DepthInsufficient(_)) => return Ok(rep.exhausted("bipartite", e.to_string())),
        Err(e) => return Ok(rep.fail("bipartite", e.to_string())),
    };
    rep.radius = run.radius;
    if let Some(why) = &run.stopped {
        return Ok(rep.exhausted("bipartite", format!("{} of {} rounds: {why}", run.rounds.len(), opts.rounds)));
    }
    let t = ball(g, run.radius)?;
    if let Err(e) = assert_cubic_3connected(&t, 2) {
        return Ok(rep.fail("precondition", e.to_string()));
    }
    rep.pass("precondition", format!("cubic and 3-connected at radius {}", t.radius));
    if let Some((i, _)) = run.rounds.iter().enumerate().find(|(_, r)| r.evidence.as_ref().is_some_and(|e| !e.passed())) {
        return Ok(rep.fail("bipartite", format!("round {} failed its checks", i + 1)));
    }
    let f = &run.rounds.last().unwrap().f;
    rep.pass("bipartite", format!("{} rounds, {} vertices", run.rounds.len(), f.vertices.len()));
    match faithfulness_audit(&t, &completion(&t.core, &f.vertices, &f.edges), &VSet::new()) {
        Ok(v) if v.is_clean() => rep.pass("bipartite-audit", v.label()),
        Ok(v) => return Ok(rep.fail("bipartite-audit", format!("{v:?}"))),
        Err(e) => return Ok(rep.fail("bipartite-audit", e.to_string())),
    }
    let (cacti, even) = match cactus_of(&t.core, f, t.root) {
        Ok(x) => x,
        Err(e) => return Ok(rep.fail("cactus", e.to_string())),
    };
    if !even {
        return Ok(rep.fail("cactus", "odd cycle in a bipartite cactus"));
    }
    rep.pass("cactus", format!("{} rounds, spanning the bipartite subgraph", cacti.len()));
    let c = cacti.last().unwrap();
    match faithfulness_audit(&t, &completion(&t.core, &c.vertices, &c.edges), &VSet::new()) {
        Ok(v) if v.is_clean() => rep.pass("cactus-audit", v.label()),
        Ok(v) => return Ok(rep.fail("cactus-audit", format!("{v:?}"))),
        Err(e) => return Ok(rep.fail("cactus-audit", e.to_string())),
    }
    let rounds: Vec<FRound> = cacti.iter().map(FRound::of_cactus).collect();
    if rounds.len() >= 2 {
        let (pt, lifted) = prism_rounds(&t, &rounds);
        let base = end_degree_le_check(&t, &rounds, 1);
        let lift = end_degree_le_check(&pt, &lifted, 2);
        match (base, lift) {
            (Ok(b), Ok(l)) => {
                let law = match (b.upper, l.upper) {
                    (Some(x), Some(y)) => y == 2 * x,
                    _ => true,
                };
                if b.verdict == CheckVerdict::Fail || l.verdict == CheckVerdict::Fail || !law {
                    return Ok(rep.fail("end-degree", format!("cactus {:?}, prism {:?}", b.per_separator, l.per_separator)));
                }
                if b.neighborhoods.iter().any(|&w| w > 1) {
                    return Ok(rep.fail("end-degree", format!("approximant neighbourhoods {:?}", b.neighborhoods)));
                }
                rep.pass("end-degree", format!("cactus upper {:?}, prism upper {:?}", b.upper, l.upper));
            }
            (Err(e), _) | (_, Err(e)) => return Ok(rep.fail("end-degree", e.to_string())),
        }
    } else {
        rep.pass("end-degree", "single round, nothing to separate");
    }
    let seq = match prism_walk(&t.core, c) {
        Ok(s) => s,
        Err(e) => return Ok(rep.fail("prism-cycle", e.to_string())),
    };
    let pt = t.prism();
    let cyc: Vec<Edge> = (0..seq.len())
        .map(|i| {
            let (a, b) = (seq[i], seq[(i + 1) % seq.len()]);
            norm((prism_index(&pt.core, &t.core, a.0, a.1), prism_index(&pt.core, &t.core, b.0, b.1)))
        })
        .collect();
    let cv: VSet = cyc.iter().flat_map(|&(a, b)| [a, b]).collect();
    rep.pass("prism-cycle", format!("Hamiltonian cycle of length {} on the cactus prism", seq.len()));
    match faithfulness_audit(&pt, &completion(&pt.core, &cv, &cyc), &VSet::new()) {
        Ok(v) if v.is_clean() => rep.pass("prism-audit", v.label()),
        Ok(v) => return Ok(rep.fail("prism-audit", format!("{v:?}"))),
        Err(e) => return Ok(rep.fail("prism-audit", e.to_string())),
    }
    let cert = match build_circle_certificate(&t, &rounds, opts.circle) {
        Ok(c) => c,
        Err(e) => return Ok(rep.fail("certificate", e.to_string())),
    };
    match verify_certificate(&cert) {
        Ok(s) => rep.pass("certificate", format!("{} cuts, {} pairs verified", s.cuts_checked, s.pairs_checked)),
        Err(e) => return Ok(rep.fail("certificate", e.to_string())),
    }
    rep.verdict = "SUPPORTED-AT-DEPTH".to_string();
    rep.certificate = Some(cert);
    Ok(rep)
}
