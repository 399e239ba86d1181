mod common;

use std::collections::BTreeSet;

use common::*;
use prismcirc::flow::{is_set_k_connected, menger, Mode, SetConnectivity};
use prismcirc::graph::*;
use prismcirc::named;
use prismcirc::search::*;
use prismcirc::structure::*;
use proptest::prelude::*;

fn set(g: &Multigraph, ids: &[usize]) -> VSet {
    ids.iter().map(|&i| v(g, i)).collect()
}

#[test]
fn components_examples() {
    let c4 = named::cycle(4);
    let parts = components(&c4, &set(&c4, &[0])).unwrap();
    assert_eq!(parts.len(), 1);
    assert_eq!(parts[0].len(), 3);

    // ladder rungs (0,1) (2,3) (4,5); remove middle rung
    let l = named::ladder(3);
    assert_eq!(components(&l, &set(&l, &[2, 3])).unwrap().len(), 2);

    let p = named::petersen();
    let closed: VSet = set(&p, &[0, 1, 4, 5]);
    let parts = components(&p, &closed).unwrap();
    // union-find oracle
    let mut parent: Vec<usize> = (0..p.n()).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    for (a, b) in p.edges() {
        if !closed.contains(&a) && !closed.contains(&b) {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra] = rb;
        }
    }
    let roots: BTreeSet<usize> =
        (0..p.n()).filter(|x| !closed.contains(x)).map(|x| find(&mut parent, x)).collect();
    assert_eq!(parts.len(), roots.len());
    let covered: usize = parts.iter().map(Vec::len).sum();
    assert_eq!(covered, 6);
}

#[test]
fn components_rejects_unknown_vertex() {
    let g = named::cycle(4);
    assert!(components(&g, &[17].into_iter().collect()).is_err());
    assert!(g.id("nope").is_err());
}

#[test]
fn zones_examples() {
    let g = named::path(3);
    let all: VSet = (0..3).collect();
    let z = zones(&g, &all).unwrap();
    assert!(z.n.is_empty() && z.z.is_empty() && z.i == all);
    let z = zones(&g, &set(&g, &[1])).unwrap();
    assert_eq!(z.n, set(&g, &[0, 2]));
    assert_eq!(z.z, set(&g, &[1]));
    assert!(z.i.is_empty());
}

#[test]
fn menger_examples() {
    let k4 = named::k4();
    for a in 0..4 {
        for b in a + 1..4 {
            let (k, ps) = menger(&k4, a, b, Mode::Vertex).unwrap();
            assert_eq!(k, 3);
            assert!(ps.validate(&k4));
        }
    }
    let p = named::petersen();
    for (a, b) in p.edges() {
        let (k, ps) = menger(&p, a, b, Mode::Vertex).unwrap();
        assert_eq!(k, brute_local_connectivity(&p, a, b));
        assert_eq!(k, 3);
        assert!(ps.validate(&p));
    }
    let bt = named::bowtie();
    assert_eq!(menger(&bt, v(&bt, 1), v(&bt, 3), Mode::Vertex).unwrap().0, 1);
    assert!(menger(&bt, 1, 1, Mode::Vertex).is_err());
}

#[test]
fn set_connectivity_examples() {
    let q3 = named::cube();
    let all: VSet = (0..8).collect();
    assert_eq!(is_set_k_connected(&q3, &all, 3).unwrap(), SetConnectivity::Connected);
    let p = named::path(2);
    match is_set_k_connected(&p, &(0..2).collect(), 2).unwrap() {
        SetConnectivity::Violated { found, cut, .. } => {
            assert_eq!(found, 1);
            assert_eq!(cut.edges, vec![(0, 1)]);
        }
        other => panic!("{other:?}"),
    }
    let g = named::petersen();
    assert_eq!(is_set_k_connected(&g, &(0..10).collect(), 1).unwrap(), SetConnectivity::Connected);
    assert!(is_set_k_connected(&g, &(0..10).collect(), 0).is_err());
}

#[test]
fn blocks_examples() {
    let b = blocks(&named::bowtie());
    assert_eq!(b.blocks.len(), 2);
    assert_eq!(b.cut_vertices.len(), 1);
    let mut r = rng(3);
    let t = random_tree(&mut r, 9);
    assert_eq!(blocks(&t).blocks.len(), 8);
    let th = named::theta([1, 2, 3]);
    assert_eq!(blocks(&th).blocks.len(), 1);
}

#[test]
fn bipartition_examples() {
    assert!(matches!(bipartition(&named::cycle(6)), Bipartition::Coloring(_)));
    match bipartition(&named::cycle(5)) {
        Bipartition::OddCycle(c) => assert_eq!(c.len(), 5),
        _ => panic!("C5 is not bipartite"),
    }
    let q3 = named::cube();
    match bipartition(&q3) {
        Bipartition::Coloring(c) => assert!(q3.edges().iter().all(|&(a, b)| c[a] != c[b])),
        _ => panic!(),
    }
}

#[test]
fn quotient_examples() {
    let l = named::ladder(4);
    let parts: Vec<Vec<usize>> = (0..4).map(|i| vec![v(&l, 2 * i), v(&l, 2 * i + 1)]).collect();
    let (q, _) = quotient(&l, &parts).unwrap();
    assert_eq!(q.n(), 4);
    assert_eq!(q.m(), 6);
    assert!(q.edges().chunks(2).all(|c| c[0] == c[1]));

    let k4 = named::k4();
    let (q, _) = quotient(&k4, &[vec![0, 1], vec![2, 3]]).unwrap();
    assert_eq!(q.n(), 2);
    assert_eq!(q.multiplicity(0, 1), 4);

    assert!(quotient(&k4, &[vec![0, 1], vec![1, 2, 3]]).is_err());
    assert!(quotient(&k4, &[vec![0, 1], vec![2]]).is_err());
}

#[test]
fn cleave_examples() {
    let bt = named::bowtie();
    let c = v(&bt, 0);
    let cl = cleave(&bt, c, &[v(&bt, 1), v(&bt, 2)]).unwrap();
    let (a, b) = cl.e;
    assert_eq!(cl.graph.degree(a), 3);
    assert_eq!(cl.graph.degree(b), 3);
    let back = contract(&cl.graph, a, b, "0").unwrap();
    assert_eq!(back, bt);
    assert!(cleave(&bt, c, &[]).is_err());
}

#[test]
fn product_examples() {
    let p = prism(&named::path(2));
    assert_eq!((p.n(), p.m()), (4, 4));
    assert!(p.edges().iter().all(|&(a, b)| p.degree(a) == 2 && p.degree(b) == 2));
    let t = prism(&named::cycle(3));
    assert_eq!((t.n(), t.m()), (6, 9));
    let g = named::petersen();
    let d = named::cycle(4);
    assert_eq!(cartesian_product(&g, &d).unwrap().n(), 40);
    let empty = Multigraph::new::<&str>(&[], &[]).unwrap();
    assert!(cartesian_product(&g, &empty).is_err());
}

#[test]
fn line_graph_examples() {
    let l = line_graph(&named::star(3)).unwrap();
    assert_eq!((l.graph.n(), l.graph.m()), (3, 3));
    let l = line_graph(&named::path(4)).unwrap();
    assert_eq!((l.graph.n(), l.graph.m()), (3, 2));
    let l = line_graph(&named::cycle(5)).unwrap();
    assert!((0..5).all(|x| l.graph.degree(x) == 2) && l.graph.m() == 5);
    let multi = graph(2, &[(0, 1), (0, 1)]);
    assert!(matches!(line_graph(&multi), Err(prismcirc::Error::Unsupported(_))));
}

#[test]
fn power_examples() {
    assert_eq!(power(&named::path(4), 2).unwrap().m(), 5);
    let c6 = power(&named::cycle(6), 2).unwrap();
    assert_eq!(c6.m(), 12);
    assert!((0..6).all(|x| c6.degree(x) == 4));
    let g = named::petersen();
    assert_eq!(power(&g, 1).unwrap(), g);
}

#[test]
fn normal_spanning_tree_examples() {
    let mut r = rng(5);
    let t = random_tree(&mut r, 10);
    let nst = normal_spanning_tree(&t, 3).unwrap();
    assert_eq!(nst.edges(), t.edges());
    let c4 = named::cycle(4);
    let nst = normal_spanning_tree(&c4, 0).unwrap();
    assert_eq!(nst.edges().len(), 3);
    assert!(nst.depth.iter().max() == Some(&3));
    normal_spanning_tree(&named::petersen(), 0).unwrap();
    let two = graph(4, &[(0, 1), (2, 3)]);
    assert!(normal_spanning_tree(&two, 0).is_err());
}

#[test]
fn brute_force_examples() {
    let c5 = named::cycle(5);
    assert_eq!(brute_force_hamiltonian_cycle(&c5).unwrap(), Some(vec![0, 1, 2, 3, 4]));
    assert_eq!(brute_force_hamiltonian_cycle(&named::petersen()).unwrap(), None);
    let pp = prism(&named::petersen());
    let c = brute_force_hamiltonian_cycle(&pp).unwrap().unwrap();
    assert_eq!(c.len(), 20);
    assert!(is_hamiltonian_cycle(&pp, &c));
    let big = named::cycle(30);
    assert!(matches!(brute_force_hamiltonian_cycle(&big), Err(prismcirc::Error::SizeBound { .. })));
    assert!(brute_force_hamiltonian_cycle_bounded(&big, 40).unwrap().is_some());
}

#[test]
fn brute_force_is_lexicographically_least() {
    // K4: cycles from 0 are 0123, 0132, 0213 (and reverses); least is 0123
    assert_eq!(brute_force_hamiltonian_cycle(&named::k4()).unwrap(), Some(vec![0, 1, 2, 3]));
}

#[test]
fn theta_and_y_examples() {
    let th = named::theta([1, 1, 2]);
    let t = find_theta(&th).unwrap();
    assert_eq!(t.total_length(), th.m());
    assert_eq!(t.shortest_even_cycle().len(), 4);
    let mut r = rng(9);
    assert!(find_theta(&random_tree(&mut r, 12)).is_none());
    let y = find_y(&named::k4(), 2).unwrap();
    assert_eq!(y.legs.len(), 3);
    assert!(y.legs.iter().all(|l| l.len() == 2));
    assert!(find_y(&named::cycle(5), 0).is_none());
}

#[test]
fn theta_in_multigraph_uses_parallel_edges() {
    let g = graph(3, &[(0, 1), (0, 1), (1, 2), (2, 0)]);
    let t = find_theta(&g).unwrap();
    assert_eq!(t.branch, (0, 1));
    assert_eq!(t.total_length(), 4);
}

#[test]
fn cycle_search_finds_shortest_even() {
    let p = named::petersen();
    match cycle_through(&p, &[0], &[], true, 10, 1_000_000) {
        CycleSearch::Found(c) => assert_eq!(c.len(), 6),
        other => panic!("{other:?}"),
    }
    let t = named::path(5);
    assert_eq!(cycle_through(&t, &[0, 2], &[], false, 10, 1000), CycleSearch::NotFound);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn menger_matches_exhaustive_separator(seed in 0u64..10_000, n in 2usize..9, p in 0.2f64..0.8) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, n, p);
        for a in 0..n {
            for b in a + 1..n {
                let (k, ps) = menger(&g, a, b, Mode::Vertex).unwrap();
                prop_assert!(ps.validate(&g));
                prop_assert_eq!(k, brute_local_connectivity(&g, a, b));
            }
        }
    }

    #[test]
    fn edge_menger_matches_exhaustive_cut(seed in 0u64..10_000, n in 2usize..7) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, n, 0.5);
        for a in 0..n {
            for b in a + 1..n {
                let (k, ps) = menger(&g, a, b, Mode::Edge).unwrap();
                prop_assert!(ps.validate(&g));
                prop_assert_eq!(k, brute_edge_connectivity(&g, a, b));
            }
        }
    }

    #[test]
    fn singleton_quotient_is_identity(seed in 0u64..10_000, n in 1usize..12) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, n, 0.4);
        let parts: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        let (q, map) = quotient(&g, &parts).unwrap();
        prop_assert_eq!(&q, &g);
        prop_assert!(map.iter().enumerate().all(|(i, &m)| i == m));
    }

    #[test]
    fn cleave_contract_round_trip(seed in 0u64..10_000, n in 3usize..13) {
        let mut r = rng(seed);
        let g = random_connected(&mut r, n, 0.3);
        if let Some(x) = (0..n).find(|&x| g.degree(x) >= 2) {
            let nb = g.neighbors(x).to_vec();
            let cut = 1 + (seed as usize) % (nb.len() - 1);
            let cl = cleave(&g, x, &nb[..cut]).unwrap();
            let (a, b) = cl.e;
            let back = contract(&cl.graph, a, b, g.name(x)).unwrap();
            prop_assert_eq!(back, g);
        }
    }

    #[test]
    fn line_graph_degree_law(seed in 0u64..10_000, n in 2usize..10) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, n, 0.4);
        let l = line_graph(&g).unwrap();
        for (i, &(a, b)) in l.edge_of.iter().enumerate() {
            prop_assert_eq!(l.graph.degree(i), g.degree(a) + g.degree(b) - 2);
        }
    }

    #[test]
    fn power_is_monotone(seed in 0u64..10_000, n in 2usize..10, k in 1usize..4) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, n, 0.3);
        let a: BTreeSet<_> = power(&g, k).unwrap().edges().into_iter().collect();
        let b: BTreeSet<_> = power(&g, k + 1).unwrap().edges().into_iter().collect();
        prop_assert!(a.is_subset(&b));
    }

    #[test]
    fn dfs_tree_is_normal(seed in 0u64..10_000, n in 1usize..16) {
        let mut r = rng(seed);
        let g = random_connected(&mut r, n, 0.25);
        let t = normal_spanning_tree(&g, (seed as usize) % n).unwrap();
        for (a, b) in g.edges() {
            prop_assert!(t.comparable(a, b));
        }
        prop_assert_eq!(t.edges().len(), n - 1);
    }

    #[test]
    fn blocks_partition_edges(seed in 0u64..10_000, n in 1usize..12) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, n, 0.3);
        let b = blocks(&g);
        let mut all: Vec<Edge> = b.blocks.iter().flat_map(|x| x.edges.clone()).collect();
        all.sort_unstable();
        prop_assert_eq!(all, g.edges());
    }

    #[test]
    fn brute_force_agrees_with_validator(seed in 0u64..10_000, n in 3usize..10) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, n, 0.5);
        if let Some(c) = brute_force_hamiltonian_cycle(&g).unwrap() {
            prop_assert!(is_hamiltonian_cycle(&g, &c));
        } else {
            // exhaustive permutation check from vertex 0
            let mut rest: Vec<usize> = (1..n).collect();
            let mut any = false;
            permute(&mut rest, 0, &mut |p| {
                let mut c = vec![0];
                c.extend_from_slice(p);
                if is_hamiltonian_cycle(&g, &c) { any = true; }
            });
            prop_assert!(!any);
        }
    }
}

fn permute(a: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == a.len() {
        f(a);
        return;
    }
    for i in k..a.len() {
        a.swap(k, i);
        permute(a, k + 1, f);
        a.swap(k, i);
    }
}
