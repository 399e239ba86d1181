//! Prism Hamiltonicity certificates and their verifier.
//!
//! A certificate carries the base graph it talks about; the verifier only
//! builds the prism of that graph and re-counts edges, so it shares no code
//! with the constructions that emit certificates.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{norm, prism, Edge, Multigraph};
use crate::search::is_hamiltonian_cycle;

pub const CERTIFICATE_FORMAT: &str = "prismcirc/prism-ham-certificate/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum CertMode {
    Finite,
    Truncated,
}

/// The base graph `G`; the certificate speaks about `G □ K2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HostGraph {
    pub spec: String,
    pub vertices: Vec<String>,
    pub edges: Vec<(String, String)>,
}

impl HostGraph {
    pub fn of(spec: &str, g: &Multigraph) -> Self {
        HostGraph { spec: spec.to_string(), vertices: g.names().to_vec(), edges: g.edge_names() }
    }

    pub fn graph(&self) -> Result<Multigraph> {
        Multigraph::new(&self.vertices, &self.edges)
    }
}

/// A vertex set of the prism and the number of two-factor edges leaving it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutEvidence {
    pub family: String,
    pub side: Vec<String>,
    pub crossing: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrismHamCertificate {
    pub format: String,
    pub mode: CertMode,
    pub host: HostGraph,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    /// FINITE: a Hamiltonian cycle of the prism.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cycle: Vec<String>,
    /// TRUNCATED: prism vertices where the two-factor condition is claimed.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub region: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub two_factor: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cut_families: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cuts: Vec<CutEvidence>,
    /// TRUNCATED: a vertex sequence; pair `(i, j)` names the edges leaving
    /// positions `i` and `j` and the side `order[i+1..=j]`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub order: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pairs: Vec<(usize, usize)>,
    #[serde(default)]
    pub unwitnessed_pairs: usize,
}

impl PrismHamCertificate {
    pub fn finite(host: HostGraph, cycle: Vec<String>) -> Self {
        PrismHamCertificate {
            format: CERTIFICATE_FORMAT.to_string(),
            mode: CertMode::Finite,
            host,
            depth: None,
            cycle,
            region: Vec::new(),
            two_factor: Vec::new(),
            cut_families: Vec::new(),
            cuts: Vec::new(),
            order: Vec::new(),
            pairs: Vec::new(),
            unwitnessed_pairs: 0,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Input(format!("certificate json: {e}")))
    }
}

/// What a successful verification checked.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifySummary {
    pub mode: CertMode,
    pub prism_vertices: usize,
    pub cuts_checked: usize,
    pub pairs_checked: usize,
}

fn reject<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(format!("certificate rejected: {}", msg.into())))
}

/// Re-checks a certificate from its own contents.
pub fn verify_certificate(c: &PrismHamCertificate) -> Result<VerifySummary> {
    if c.format != CERTIFICATE_FORMAT {
        return reject(format!("unknown format {}", c.format));
    }
    let base = c.host.graph()?;
    let p = prism(&base);
    let id = |s: &str| p.index(s).ok_or_else(|| Error::Input(format!("certificate rejected: {s} is not a prism vertex")));
    match c.mode {
        CertMode::Finite => {
            let seq = c.cycle.iter().map(|s| id(s)).collect::<Result<Vec<_>>>()?;
            if !is_hamiltonian_cycle(&p, &seq) {
                return reject("cycle is not a Hamiltonian cycle of the prism");
            }
            Ok(VerifySummary { mode: c.mode, prism_vertices: p.n(), cuts_checked: 0, pairs_checked: 0 })
        }
        CertMode::Truncated => verify_truncated(c, &p, &id),
    }
}

fn verify_truncated(
    c: &PrismHamCertificate,
    p: &Multigraph,
    id: &dyn Fn(&str) -> Result<usize>,
) -> Result<VerifySummary> {
    if c.depth.is_none() {
        return reject("truncated certificate without depth");
    }
    let region: BTreeSet<usize> = c.region.iter().map(|s| id(s)).collect::<Result<_>>()?;
    if region.is_empty() || region.len() != c.region.len() {
        return reject("region is empty or repeats a vertex");
    }
    let mut avail: BTreeMap<Edge, usize> = BTreeMap::new();
    for e in p.edges() {
        *avail.entry(e).or_default() += 1;
    }
    let mut f: BTreeMap<Edge, usize> = BTreeMap::new();
    for (a, b) in &c.two_factor {
        let e = norm((id(a)?, id(b)?));
        let k = f.entry(e).or_default();
        *k += 1;
        if *k > avail.get(&e).copied().unwrap_or(0) {
            return reject(format!("{a}-{b} is not a prism edge"));
        }
    }
    let mut deg = vec![0usize; p.n()];
    for (&(a, b), &k) in &f {
        deg[a] += k;
        deg[b] += k;
    }
    for &v in &region {
        if deg[v] != 2 {
            return reject(format!("{} meets {} two-factor edges", p.name(v), deg[v]));
        }
    }
    let crossing = |side: &BTreeSet<usize>| -> usize {
        f.iter().filter(|(&(a, b), _)| side.contains(&a) != side.contains(&b)).map(|(_, &k)| k).sum()
    };
    let families: BTreeSet<&str> = c.cut_families.iter().map(|s| s.as_str()).collect();
    for cut in &c.cuts {
        if !families.contains(cut.family.as_str()) {
            return reject(format!("cut of undeclared family {}", cut.family));
        }
        let side: BTreeSet<usize> = cut.side.iter().map(|s| id(s)).collect::<Result<_>>()?;
        if side.is_empty() {
            return reject("empty cut side");
        }
        let k = crossing(&side);
        if k != cut.crossing || k == 0 || k % 2 == 1 {
            return reject(format!("{} cut {:?} meets the two-factor {k} times", cut.family, cut.side));
        }
    }
    let order = c.order.iter().map(|s| id(s)).collect::<Result<Vec<_>>>()?;
    let len = order.len();
    for &(i, j) in &c.pairs {
        if i >= j || j >= len {
            return reject(format!("pair ({i},{j}) out of order"));
        }
        let e1 = norm((order[i], order[i + 1]));
        let e2 = norm((order[j], order[(j + 1) % len]));
        if !f.contains_key(&e1) || !f.contains_key(&e2) {
            return reject(format!("pair ({i},{j}) names a non-factor edge"));
        }
        let side: BTreeSet<usize> = order[i + 1..=j].iter().copied().collect();
        let hit: Vec<Edge> = f
            .keys()
            .copied()
            .filter(|&(a, b)| side.contains(&a) != side.contains(&b))
            .collect();
        let mut want = vec![e1, e2];
        want.sort_unstable();
        if hit != want || e1 == e2 {
            return reject(format!("pair ({i},{j}): cut meets {} factor edges", hit.len()));
        }
    }
    Ok(VerifySummary { mode: c.mode, prism_vertices: p.n(), cuts_checked: c.cuts.len(), pairs_checked: c.pairs.len() })
}

/// A random single-edge change: for TRUNCATED certificates one two-factor
/// edge is dropped or one prism edge at a region vertex is added; for FINITE
/// certificates one cycle entry is dropped.
pub fn mutate_single_edge<R: Rng>(c: &PrismHamCertificate, rng: &mut R) -> Result<PrismHamCertificate> {
    let mut m = c.clone();
    match c.mode {
        CertMode::Finite => {
            if m.cycle.is_empty() {
                return Err(Error::Input("empty cycle".into()));
            }
            let i = rng.gen_range(0..m.cycle.len());
            m.cycle.remove(i);
        }
        CertMode::Truncated => {
            let p = prism(&c.host.graph()?);
            let present: BTreeSet<(String, String)> =
                c.two_factor.iter().flat_map(|(a, b)| [(a.clone(), b.clone()), (b.clone(), a.clone())]).collect();
            let additions: Vec<(String, String)> = c
                .region
                .iter()
                .filter_map(|v| p.index(v))
                .flat_map(|v| p.neighbors(v).iter().map(move |&w| (v, w)))
                .map(|(v, w)| (p.name(v).to_string(), p.name(w).to_string()))
                .filter(|e| !present.contains(e))
                .collect();
            if m.two_factor.is_empty() && additions.is_empty() {
                return Err(Error::Input("nothing to mutate".into()));
            }
            if additions.is_empty() || (!m.two_factor.is_empty() && rng.gen_bool(0.5)) {
                let i = rng.gen_range(0..m.two_factor.len());
                m.two_factor.remove(i);
            } else {
                m.two_factor.push(additions.choose(rng).unwrap().clone());
            }
        }
    }
    Ok(m)
}
