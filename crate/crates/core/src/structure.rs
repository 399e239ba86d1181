//! Blocks, bipartitions and depth-first (normal) spanning trees.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::graph::{Edge, Multigraph, VSet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub vertices: Vec<usize>,
    pub edges: Vec<Edge>,
}

impl Block {
    pub fn is_bridge(&self) -> bool {
        self.edges.len() == 1
    }

    /// Each vertex has block-degree 2 and the block is not a bridge.
    pub fn is_cycle(&self) -> bool {
        if self.edges.len() < 2 || self.edges.len() != self.vertices.len() {
            return false;
        }
        let mut deg: BTreeMap<usize, usize> = BTreeMap::new();
        for &(a, b) in &self.edges {
            *deg.entry(a).or_default() += 1;
            *deg.entry(b).or_default() += 1;
        }
        deg.values().all(|&d| d == 2)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockDecomposition {
    /// Ordered by least vertex, then by edge list.
    pub blocks: Vec<Block>,
    pub cut_vertices: VSet,
    /// Bipartite block/cut-vertex tree as (block index, cut vertex) pairs.
    pub block_tree: Vec<(usize, usize)>,
}

impl BlockDecomposition {
    pub fn blocks_of(&self, v: usize) -> Vec<usize> {
        self.blocks
            .iter()
            .enumerate()
            .filter(|(_, b)| b.vertices.binary_search(&v).is_ok())
            .map(|(i, _)| i)
            .collect()
    }
}

/// Biconnected components (Hopcroft-Tarjan, iterative). Parallel edges form
/// a 2-connected block; isolated vertices belong to no block.
pub fn blocks(g: &Multigraph) -> BlockDecomposition {
    let edges = g.edges();
    let mut inc: Vec<Vec<(usize, usize)>> = vec![Vec::new(); g.n()];
    for (i, &(a, b)) in edges.iter().enumerate() {
        inc[a].push((b, i));
        inc[b].push((a, i));
    }
    for l in &mut inc {
        l.sort_unstable();
    }
    const UNSET: usize = usize::MAX;
    let mut disc = vec![UNSET; g.n()];
    let mut low = vec![0; g.n()];
    let mut time = 0;
    let mut estack: Vec<usize> = Vec::new();
    let mut raw: Vec<Vec<usize>> = Vec::new();
    for r in 0..g.n() {
        if disc[r] != UNSET || inc[r].is_empty() {
            continue;
        }
        disc[r] = time;
        low[r] = time;
        time += 1;
        // (vertex, parent edge, next incidence)
        let mut stack: Vec<(usize, usize, usize)> = vec![(r, UNSET, 0)];
        while let Some(&mut (v, pe, ref mut i)) = stack.last_mut() {
            if *i < inc[v].len() {
                let (w, e) = inc[v][*i];
                *i += 1;
                if e == pe {
                    continue;
                }
                if disc[w] == UNSET {
                    estack.push(e);
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    stack.push((w, e, 0));
                } else if disc[w] < disc[v] {
                    estack.push(e);
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if let Some(&(u, _, _)) = stack.last() {
                    low[u] = low[u].min(low[v]);
                    if low[v] >= disc[u] {
                        let mut blk = Vec::new();
                        while let Some(e) = estack.pop() {
                            blk.push(e);
                            if e == pe {
                                break;
                            }
                        }
                        raw.push(blk);
                    }
                }
            }
        }
    }
    let mut blocks: Vec<Block> = raw
        .into_iter()
        .map(|es| {
            let mut be: Vec<Edge> = es.iter().map(|&e| edges[e]).collect();
            be.sort_unstable();
            let mut vs: Vec<usize> = be.iter().flat_map(|&(a, b)| [a, b]).collect();
            vs.sort_unstable();
            vs.dedup();
            Block { vertices: vs, edges: be }
        })
        .collect();
    blocks.sort_by(|a, b| a.vertices[0].cmp(&b.vertices[0]).then_with(|| a.edges.cmp(&b.edges)));
    let mut count = vec![0usize; g.n()];
    for b in &blocks {
        for &v in &b.vertices {
            count[v] += 1;
        }
    }
    let cut_vertices: VSet = (0..g.n()).filter(|&v| count[v] >= 2).collect();
    let mut block_tree = Vec::new();
    for (i, b) in blocks.iter().enumerate() {
        for &v in &b.vertices {
            if cut_vertices.contains(&v) {
                block_tree.push((i, v));
            }
        }
    }
    BlockDecomposition { blocks, cut_vertices, block_tree }
}

/// Connected, at least 3 vertices (or 2 joined by parallel edges), no cut vertex.
pub fn is_two_connected(g: &Multigraph) -> bool {
    if g.n() < 2 {
        return false;
    }
    let b = blocks(g);
    b.blocks.len() == 1 && b.blocks[0].vertices.len() == g.n() && !(g.n() == 2 && g.m() < 2)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Bipartition {
    Coloring(Vec<u8>),
    /// An odd cycle as a vertex sequence (closing edge implied).
    OddCycle(Vec<usize>),
}

pub fn bipartition(g: &Multigraph) -> Bipartition {
    let n = g.n();
    let mut color = vec![u8::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut depth = vec![0usize; n];
    for s in 0..n {
        if color[s] != u8::MAX {
            continue;
        }
        color[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for &w in g.neighbors(u) {
                if color[w] == u8::MAX {
                    color[w] = 1 - color[u];
                    parent[w] = u;
                    depth[w] = depth[u] + 1;
                    q.push_back(w);
                } else if color[w] == color[u] {
                    let (mut x, mut y) = (u, w);
                    let mut left = vec![x];
                    let mut right = vec![y];
                    while depth[x] > depth[y] {
                        x = parent[x];
                        left.push(x);
                    }
                    while depth[y] > depth[x] {
                        y = parent[y];
                        right.push(y);
                    }
                    while x != y {
                        x = parent[x];
                        y = parent[y];
                        left.push(x);
                        right.push(y);
                    }
                    right.pop();
                    right.reverse();
                    left.extend(right);
                    return Bipartition::OddCycle(left);
                }
            }
        }
    }
    Bipartition::Coloring(color)
}

/// A rooted spanning tree with its tree order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootedTree {
    pub root: usize,
    pub parent: Vec<Option<usize>>,
    /// Preorder of the depth-first search.
    pub order: Vec<usize>,
    pub depth: Vec<usize>,
    tin: Vec<usize>,
    tout: Vec<usize>,
}

impl RootedTree {
    pub fn is_ancestor(&self, a: usize, b: usize) -> bool {
        self.tin[a] <= self.tin[b] && self.tout[b] <= self.tout[a]
    }

    pub fn comparable(&self, a: usize, b: usize) -> bool {
        self.is_ancestor(a, b) || self.is_ancestor(b, a)
    }

    /// Sons in increasing index order.
    pub fn children(&self, v: usize) -> Vec<usize> {
        (0..self.parent.len()).filter(|&w| self.parent[w] == Some(v)).collect()
    }

    pub fn edges(&self) -> Vec<Edge> {
        let mut es: Vec<Edge> = self
            .parent
            .iter()
            .enumerate()
            .filter_map(|(v, p)| p.map(|p| crate::graph::norm((p, v))))
            .collect();
        es.sort_unstable();
        es
    }

    pub fn from_parents(root: usize, parent: Vec<Option<usize>>) -> Self {
        let n = parent.len();
        let mut kids = vec![Vec::new(); n];
        for (v, p) in parent.iter().enumerate() {
            if let Some(p) = p {
                kids[*p].push(v);
            }
        }
        let mut tin = vec![0; n];
        let mut tout = vec![0; n];
        let mut depth = vec![0; n];
        let mut order = Vec::with_capacity(n);
        let mut t = 0;
        let mut stack = vec![(root, 0usize)];
        tin[root] = t;
        t += 1;
        order.push(root);
        while let Some(&mut (v, ref mut i)) = stack.last_mut() {
            if *i < kids[v].len() {
                let w = kids[v][*i];
                *i += 1;
                depth[w] = depth[v] + 1;
                tin[w] = t;
                t += 1;
                order.push(w);
                stack.push((w, 0));
            } else {
                tout[v] = t;
                t += 1;
                stack.pop();
            }
        }
        RootedTree { root, parent, order, depth, tin, tout }
    }
}

/// Depth-first spanning tree; every edge of `g` is asserted to join
/// tree-comparable vertices.
pub fn normal_spanning_tree(g: &Multigraph, root: usize) -> Result<RootedTree> {
    if root >= g.n() {
        return input("root out of range");
    }
    let n = g.n();
    let mut parent = vec![None; n];
    let mut seen = vec![false; n];
    seen[root] = true;
    let mut stack = vec![(root, 0usize)];
    while let Some(&mut (v, ref mut i)) = stack.last_mut() {
        let nb = g.neighbors(v);
        if *i < nb.len() {
            let w = nb[*i];
            *i += 1;
            if !seen[w] {
                seen[w] = true;
                parent[w] = Some(v);
                stack.push((w, 0));
            }
        } else {
            stack.pop();
        }
    }
    if seen.iter().any(|s| !s) {
        return input("graph is disconnected");
    }
    let t = RootedTree::from_parents(root, parent);
    for (a, b) in g.edges() {
        if !t.comparable(a, b) {
            return crate::error::assertion(format!(
                "edge {}-{} joins incomparable vertices",
                g.name(a),
                g.name(b)
            ));
        }
    }
    Ok(t)
}
