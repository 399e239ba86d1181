//! Small named graphs used by tests, examples and the CLI.

use crate::error::{input, Result};
use crate::graph::Multigraph;

fn build(n: usize, edges: &[(usize, usize)]) -> Multigraph {
    let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let es: Vec<(String, String)> = edges.iter().map(|&(a, b)| (a.to_string(), b.to_string())).collect();
    Multigraph::new(&names, &es).expect("well-formed named graph")
}

pub fn path(n: usize) -> Multigraph {
    let es: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    build(n, &es)
}

pub fn cycle(n: usize) -> Multigraph {
    let es: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    build(n, &es)
}

pub fn complete(n: usize) -> Multigraph {
    let mut es = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            es.push((i, j));
        }
    }
    build(n, &es)
}

pub fn complete_bipartite(a: usize, b: usize) -> Multigraph {
    let mut es = Vec::new();
    for i in 0..a {
        for j in 0..b {
            es.push((i, a + j));
        }
    }
    build(a + b, &es)
}

pub fn star(leaves: usize) -> Multigraph {
    complete_bipartite(1, leaves)
}

/// Two triangles sharing vertex 0.
pub fn bowtie() -> Multigraph {
    build(5, &[(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0)])
}

/// Circular ladder `C_n □ K2`; `prism_graph(5)` is the pentagonal prism.
pub fn prism_graph(n: usize) -> Multigraph {
    let mut es = Vec::new();
    for i in 0..n {
        es.push((i, (i + 1) % n));
        es.push((n + i, n + (i + 1) % n));
        es.push((i, n + i));
    }
    build(2 * n, &es)
}

/// Möbius ladder on `2k` vertices.
pub fn moebius(k: usize) -> Multigraph {
    let n = 2 * k;
    let mut es: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    for i in 0..k {
        es.push((i, i + k));
    }
    build(n, &es)
}

pub fn cube() -> Multigraph {
    let mut es = Vec::new();
    for v in 0..8usize {
        for b in 0..3 {
            let w = v ^ (1 << b);
            if v < w {
                es.push((v, w));
            }
        }
    }
    build(8, &es)
}

pub fn petersen() -> Multigraph {
    let mut es = Vec::new();
    for i in 0..5 {
        es.push((i, (i + 1) % 5));
        es.push((i, i + 5));
        es.push((5 + i, 5 + (i + 2) % 5));
    }
    build(10, &es)
}

/// Generalized Petersen graph GP(n, k): outer cycle, spokes, inner star polygon.
/// Cubic when `2k < n`.
pub fn generalized_petersen(n: usize, k: usize) -> Multigraph {
    let mut es = Vec::new();
    for i in 0..n {
        es.push((i, (i + 1) % n));
        es.push((i, n + i));
        let j = (i + k) % n;
        es.push((n + i.min(j), n + i.max(j)));
    }
    es.sort_unstable();
    es.dedup();
    build(2 * n, &es)
}

/// Two vertices joined by three internally disjoint paths with the given
/// numbers of inner vertices.
pub fn theta(inner: [usize; 3]) -> Multigraph {
    let mut es = Vec::new();
    let mut next = 2;
    for &k in &inner {
        let mut prev = 0;
        for _ in 0..k {
            es.push((prev, next));
            prev = next;
            next += 1;
        }
        es.push((prev, 1));
    }
    build(next, &es)
}

/// Finite ladder with `rungs` rungs.
pub fn ladder(rungs: usize) -> Multigraph {
    let mut es = Vec::new();
    for i in 0..rungs {
        es.push((2 * i, 2 * i + 1));
        if i + 1 < rungs {
            es.push((2 * i, 2 * i + 2));
            es.push((2 * i + 1, 2 * i + 3));
        }
    }
    build(2 * rungs, &es)
}

pub fn k4() -> Multigraph {
    complete(4)
}

pub fn k33() -> Multigraph {
    complete_bipartite(3, 3)
}

/// Resolves names such as `petersen`, `cycle:6`, `prism:5`, `theta:1,1,2`.
pub fn by_name(spec: &str) -> Result<Multigraph> {
    let (name, arg) = match spec.split_once(':') {
        Some((a, b)) => (a, Some(b)),
        None => (spec, None),
    };
    let num = |a: Option<&str>| -> Result<usize> {
        a.and_then(|s| s.parse().ok())
            .ok_or_else(|| crate::Error::Input(format!("{name} needs a numeric argument")))
    };
    Ok(match name {
        "k4" => k4(),
        "k33" => k33(),
        "cube" => cube(),
        "petersen" => petersen(),
        "bowtie" => bowtie(),
        "path" => path(num(arg)?),
        "cycle" => cycle(num(arg)?),
        "complete" => complete(num(arg)?),
        "star" => star(num(arg)?),
        "prism" => prism_graph(num(arg)?),
        "moebius" => moebius(num(arg)?),
        "ladder" => ladder(num(arg)?),
        "gp" => {
            let (a, b) = arg
                .and_then(|s| s.split_once(','))
                .and_then(|(a, b)| Some((a.parse().ok()?, b.parse().ok()?)))
                .ok_or_else(|| crate::Error::Input("gp needs n,k".into()))?;
            if b == 0 || 2 * b > a {
                return input("gp needs 1 <= k <= n/2");
            }
            generalized_petersen(a, b)
        }
        "theta" => {
            let parts: Vec<usize> = arg
                .unwrap_or("")
                .split(',')
                .map(|s| s.parse().map_err(|_| crate::Error::Input("bad theta spec".into())))
                .collect::<Result<_>>()?;
            if parts.len() != 3 {
                return input("theta needs three lengths");
            }
            theta([parts[0], parts[1], parts[2]])
        }
        _ => return input(format!("unknown graph name {name}")),
    })
}
