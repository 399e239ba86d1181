//! Exhaustive oracles and small structural finders.

use crate::error::{Error, Result};
use crate::flow::{pack, Mode, Packing, INF};
use crate::graph::{bfs_dist_multi, Multigraph};

pub const DEFAULT_ORACLE_BOUND: usize = 24;

/// Lexicographically least Hamiltonian cycle (as a sequence starting at the
/// least vertex), or `None` once the search is exhausted.
pub fn brute_force_hamiltonian_cycle(g: &Multigraph) -> Result<Option<Vec<usize>>> {
    brute_force_hamiltonian_cycle_bounded(g, DEFAULT_ORACLE_BOUND)
}

pub fn brute_force_hamiltonian_cycle_bounded(g: &Multigraph, bound: usize) -> Result<Option<Vec<usize>>> {
    let n = g.n();
    if n > bound || n > 64 {
        return Err(Error::SizeBound { size: n, bound: bound.min(64) });
    }
    if n < 3 {
        return Ok(None);
    }
    let nb: Vec<u64> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u64, |m, &w| m | (1 << w)))
        .collect();
    if nb.iter().any(|m| m.count_ones() < 2) {
        return Ok(None);
    }
    let full: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut path = vec![0usize];
    let mut s = HamSearch { nb: &nb, full, n };
    if s.extend(&mut path, 1) {
        Ok(Some(path))
    } else {
        Ok(None)
    }
}

struct HamSearch<'a> {
    nb: &'a [u64],
    full: u64,
    n: usize,
}

impl HamSearch<'_> {
    fn extend(&mut self, path: &mut Vec<usize>, visited: u64) -> bool {
        let cur = *path.last().unwrap();
        if path.len() == self.n {
            return self.nb[cur] & 1 != 0;
        }
        let mut cand = self.nb[cur] & !visited;
        while cand != 0 {
            let w = cand.trailing_zeros() as usize;
            cand &= cand - 1;
            let vis = visited | (1 << w);
            if !self.feasible(vis, w) {
                continue;
            }
            path.push(w);
            if self.extend(path, vis) {
                return true;
            }
            path.pop();
        }
        false
    }

    /// Every unvisited vertex keeps two usable neighbours and the unvisited
    /// part stays reachable from the current end.
    fn feasible(&self, visited: u64, cur: usize) -> bool {
        let rest = self.full & !visited;
        if rest == 0 {
            return true;
        }
        let ends = (1u64 << cur) | 1;
        let mut r = rest;
        while r != 0 {
            let v = r.trailing_zeros() as usize;
            r &= r - 1;
            if (self.nb[v] & (rest | ends)).count_ones() < 2 {
                return false;
            }
        }
        // connectivity of rest from cur
        let mut seen = self.nb[cur] & rest;
        if seen == 0 {
            return false;
        }
        let mut frontier = seen;
        while frontier != 0 {
            let v = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let new = self.nb[v] & rest & !seen;
            seen |= new;
            frontier |= new;
        }
        seen == rest && (self.nb[0] & rest) != 0
    }
}

/// Checks that `cycle` visits every vertex of `g` once and consecutive
/// vertices (cyclically) are adjacent.
pub fn is_hamiltonian_cycle(g: &Multigraph, cycle: &[usize]) -> bool {
    if cycle.len() != g.n() || g.n() < 3 {
        return false;
    }
    let mut seen = vec![false; g.n()];
    for &v in cycle {
        if v >= g.n() || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    (0..cycle.len()).all(|i| g.has_edge(cycle[i], cycle[(i + 1) % cycle.len()]))
}

/// Two branch vertices and three internally disjoint paths between them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theta {
    pub branch: (usize, usize),
    pub paths: [Vec<usize>; 3],
}

impl Theta {
    pub fn total_length(&self) -> usize {
        self.paths.iter().map(|p| p.len() - 1).sum()
    }

    /// The shortest even cycle formed by two of the paths (pigeonhole on
    /// path-length parity), as a vertex sequence from the first branch vertex.
    pub fn shortest_even_cycle(&self) -> Vec<usize> {
        let mut best: Option<(usize, usize, usize)> = None;
        for i in 0..3 {
            for j in i + 1..3 {
                let len = self.paths[i].len() + self.paths[j].len() - 2;
                if len.is_multiple_of(2) && best.is_none_or(|b| len < b.0) {
                    best = Some((len, i, j));
                }
            }
        }
        let (_, i, j) = best.expect("a theta always has an even cycle");
        let mut cyc = self.paths[i].clone();
        let back = &self.paths[j];
        cyc.extend(back[1..back.len() - 1].iter().rev());
        cyc
    }
}

/// Least branch pair (by index) carrying three internally disjoint paths,
/// shortest total length for that pair.
pub fn find_theta(g: &Multigraph) -> Option<Theta> {
    find_theta_masked(g, &[])
}

pub fn find_theta_masked(g: &Multigraph, blocked: &[bool]) -> Option<Theta> {
    let is_blocked = |v: usize| blocked.get(v).copied().unwrap_or(false);
    let cands: Vec<usize> = (0..g.n()).filter(|&v| !is_blocked(v) && g.degree(v) >= 3).collect();
    for (i, &a) in cands.iter().enumerate() {
        for &b in &cands[i + 1..] {
            let r = pack(
                g,
                &Packing {
                    mode: Mode::Vertex,
                    sources: &[a],
                    source_cap: INF,
                    sinks: &[b],
                    sink_cap: INF,
                    blocked,
                    limit: 3,
                    short: true,
                },
            );
            if r.paths.paths.len() == 3 {
                let mut ps = r.paths.paths;
                ps.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
                let paths = [ps[0].clone(), ps[1].clone(), ps[2].clone()];
                return Some(Theta { branch: (a, b), paths });
            }
        }
    }
    None
}

/// A subdivided claw: centre and three legs (each starting at the centre).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct YGraph {
    pub center: usize,
    pub legs: Vec<Vec<usize>>,
}

/// Claw at `v` using its three least distinct neighbours.
pub fn find_y(g: &Multigraph, v: usize) -> Option<YGraph> {
    let nb = g.distinct_neighbors(v);
    if nb.len() < 3 {
        return None;
    }
    Some(YGraph { center: v, legs: nb[..3].iter().map(|&w| vec![v, w]).collect() })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CycleSearch {
    Found(Vec<usize>),
    NotFound,
    BudgetExceeded,
}

/// Shortest cycle through every vertex of `must` (then lexicographically least
/// from `must[0]`), within `allowed`, of length in `min_len..=max_len`,
/// optionally of even length.
pub fn cycle_through(
    g: &Multigraph,
    must: &[usize],
    allowed: &[bool],
    even: bool,
    max_len: usize,
    budget: usize,
) -> CycleSearch {
    let mut must: Vec<usize> = must.to_vec();
    must.sort_unstable();
    must.dedup();
    if must.is_empty() {
        return CycleSearch::NotFound;
    }
    let ok = |v: usize| allowed.get(v).copied().unwrap_or(true);
    if must.iter().any(|&m| !ok(m)) {
        return CycleSearch::NotFound;
    }
    let blocked: Vec<bool> = (0..g.n()).map(|v| !ok(v)).collect();
    let dists: Vec<Vec<usize>> = must.iter().map(|&m| bfs_dist_multi(g, &[m], &blocked)).collect();
    for i in 1..must.len() {
        if dists[0][must[i]] == usize::MAX {
            return CycleSearch::NotFound;
        }
    }
    let mut st = CycleDfs {
        g,
        must: &must,
        dists: &dists,
        blocked: &blocked,
        budget,
        spent: 0,
        target: 0,
        even,
        onpath: vec![false; g.n()],
    };
    let start = must[0];
    let cap = max_len.min(g.n());
    let mut any_budget = false;
    for len in 3..=cap {
        if even && len % 2 == 1 {
            continue;
        }
        st.target = len;
        let mut path = vec![start];
        st.onpath[start] = true;
        let r = st.go(&mut path);
        st.onpath[start] = false;
        match r {
            Some(true) => return CycleSearch::Found(path),
            Some(false) => {}
            None => {
                any_budget = true;
                break;
            }
        }
    }
    if any_budget {
        CycleSearch::BudgetExceeded
    } else {
        CycleSearch::NotFound
    }
}

struct CycleDfs<'a> {
    g: &'a Multigraph,
    must: &'a [usize],
    dists: &'a [Vec<usize>],
    blocked: &'a [bool],
    budget: usize,
    spent: usize,
    target: usize,
    even: bool,
    onpath: Vec<bool>,
}

impl CycleDfs<'_> {
    fn lower_bound(&self, cur: usize) -> usize {
        let back = self.dists[0][cur];
        let mut lb = back;
        for (i, &m) in self.must.iter().enumerate().skip(1) {
            if !self.onpath[m] {
                let d = self.dists[i][cur];
                let r = self.dists[i][self.must[0]];
                if d == usize::MAX || r == usize::MAX {
                    return usize::MAX;
                }
                lb = lb.max(d + r);
            }
        }
        lb
    }

    /// Some(true) found, Some(false) exhausted, None budget hit.
    fn go(&mut self, path: &mut Vec<usize>) -> Option<bool> {
        self.spent += 1;
        if self.spent > self.budget {
            return None;
        }
        let cur = *path.last().unwrap();
        let start = path[0];
        let edges_used = path.len() - 1;
        if path.len() == self.target {
            let closes = self.g.has_edge(cur, start)
                && (path.len() > 2 || self.g.multiplicity(cur, start) >= 2);
            let all = self.must.iter().all(|&m| self.onpath[m]);
            let _ = self.even;
            return Some(closes && all);
        }
        let lb = self.lower_bound(cur);
        if lb == usize::MAX || edges_used + lb.max(1) > self.target {
            return Some(false);
        }
        let mut nb = self.g.distinct_neighbors(cur);
        nb.retain(|&w| !self.blocked[w] && !self.onpath[w]);
        for w in nb {
            path.push(w);
            self.onpath[w] = true;
            let r = self.go(path);
            if r != Some(false) {
                if r.is_none() {
                    self.onpath[w] = false;
                    path.pop();
                }
                return r;
            }
            self.onpath[w] = false;
            path.pop();
        }
        Some(false)
    }
}
