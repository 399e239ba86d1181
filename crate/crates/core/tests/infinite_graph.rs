mod common;

use std::collections::BTreeMap;
use std::sync::Arc;

use prismcirc::flow::Mode;
use prismcirc::graph::{Edge, VSet};
use prismcirc::infinite::*;
use prismcirc::named;
use prismcirc::Error;
use proptest::prelude::*;

fn ids(t: &Truncation, names: &[&str]) -> VSet {
    names.iter().map(|s| t.core.id(s).unwrap()).collect()
}

fn edge(t: &Truncation, a: &str, b: &str) -> Edge {
    let (x, y) = (t.core.id(a).unwrap(), t.core.id(b).unwrap());
    (x.min(y), x.max(y))
}

/// Both rails of a ladder ball plus the rung at `rung`.
fn rails_and_rung(t: &Truncation, rung: i64) -> Vec<Edge> {
    let mut es: Vec<Edge> = t
        .core
        .edges()
        .into_iter()
        .filter(|&(a, b)| {
            let (sa, sb) = (t.core.name(a), t.core.name(b));
            sa.split(',').nth(1) == sb.split(',').nth(1)
        })
        .collect();
    es.push(edge(t, &format!("{rung},0"), &format!("{rung},1")));
    es
}

#[test]
fn ball_examples() {
    let t = ball(&double_ray(), 3).unwrap();
    assert_eq!(t.core.n(), 7);
    assert_eq!(t.core.m(), 6);
    assert_eq!(t.frontier, ids(&t, &["-3", "3"]));

    let t = ball(&tree3(), 2).unwrap();
    assert_eq!(t.core.n(), 10);
    assert_eq!(t.frontier.len(), 6);

    let t = ball(&hex(), 4).unwrap();
    assert!(!t.frontier.is_empty());
    for v in 0..t.core.n() {
        if t.is_interior(v) {
            assert_eq!(t.core.degree(v), 3, "{}", t.core.name(v));
        }
    }
    for &f in &t.frontier {
        assert_eq!(t.level[f], 4);
    }
}

#[test]
fn families_are_cubic_and_three_connected_on_balls() {
    for spec in ["family:hex", "family:hex_cylinder?c=4", "family:hex_cylinder?c=6", "family:ladder"] {
        let g = family(spec).unwrap();
        let t = ball(&g, 6).unwrap();
        if spec == "family:ladder" {
            assert!(assert_cubic_3connected(&t, 2).is_err());
        } else {
            assert_cubic_3connected(&t, 2).unwrap_or_else(|e| panic!("{spec}: {e}"));
        }
    }
    let t = ball(&tree3(), 5).unwrap();
    assert!(assert_cubic_3connected(&t, 2).is_err());
}

#[test]
fn family_spec_round_trip() {
    for spec in ["family:hex_cylinder?c=6", "family:tree3", "family:double_ray"] {
        assert_eq!(family(spec).unwrap().spec(), spec);
    }
    assert_eq!(family("ladder").unwrap().spec(), "family:ladder");
    assert!(matches!(family("family:grid"), Err(Error::Input(_))));
    assert!(matches!(family("family:hex_cylinder?c=1"), Err(Error::Input(_))));
    assert!(matches!(family("family:hex_cylinder"), Err(Error::Input(_))));
    assert!(matches!(family("family:tree3?k=2"), Err(Error::Input(_))));
}

#[test]
fn asymmetric_generator_is_rejected() {
    let f: NeighborFn = Arc::new(|v: &str| {
        let i: i64 = v.parse().unwrap();
        Ok(if i == 0 { vec!["1".into(), "2".into()] } else { vec![(i + 1).to_string()] })
    });
    let g = GeneratorGraph::new("bad", BTreeMap::new(), "0", f);
    assert!(matches!(ball(&g, 2), Err(Error::Generator(_))));
}

#[test]
fn degree_cap_is_enforced() {
    let f: NeighborFn = Arc::new(|v: &str| {
        if v == "hub" {
            Ok((0..70).map(|i| i.to_string()).collect())
        } else {
            Ok(vec!["hub".into()])
        }
    });
    let g = GeneratorGraph::new("hub", BTreeMap::new(), "hub", f);
    assert!(matches!(ball(&g, 1), Err(Error::Generator(_))));
    let mut g2 = g.clone();
    g2.degree_cap = 100;
    assert_eq!(ball(&g2, 1).unwrap().core.n(), 71);
}

#[test]
fn approximant_examples() {
    let t = ball(&double_ray(), 4).unwrap();
    let a = end_approximants(&t, &ids(&t, &["0"])).unwrap();
    assert_eq!(a.escaping.len(), 2);
    assert!(a.contained.is_empty());

    let t = ball(&one_way_ladder(), 5).unwrap();
    let a = end_approximants(&t, &ids(&t, &["0,0", "0,1"])).unwrap();
    assert_eq!(a.escaping.len(), 1);

    let t = ball(&ladder(), 5).unwrap();
    let a = end_approximants(&t, &ids(&t, &["0,0", "0,1"])).unwrap();
    assert_eq!(a.escaping.len(), 2);

    let t = ball(&double_ray(), 3).unwrap();
    assert!(matches!(end_approximants(&t, &ids(&t, &["2"])), Err(Error::DepthInsufficient(_))));
}

#[test]
fn contained_components_are_reported() {
    // root of a star-with-tail graph: leaves are finite components
    let g = named::star(3);
    let gen = GeneratorGraph::from_finite("star", &g, 0).unwrap();
    let t = ball(&gen, 3).unwrap();
    assert!(t.frontier.is_empty());
    let a = end_approximants(&t, &ids(&t, &["0"])).unwrap();
    assert!(a.escaping.is_empty());
    assert_eq!(a.contained.len(), 3);
}

fn ray_right(t: &Truncation) -> EndSelector {
    let far = t.core.id(&(t.radius as i64).to_string()).unwrap();
    EndSelector::Ray(t.ray_to(far).unwrap())
}

#[test]
fn end_degree_double_ray() {
    let t = ball(&double_ray(), 6).unwrap();
    let v = end_degree_bounds(&t, &ray_right(&t), Mode::Vertex).unwrap();
    assert_eq!((v.lower, v.upper), (1, Some(1)));
    assert_eq!(v.paths.len(), 1);
    assert_eq!(v.cut.len(), 1);
    let v = end_degree_bounds(&t, &ray_right(&t), Mode::Edge).unwrap();
    assert_eq!((v.lower, v.upper), (1, Some(1)));
}

#[test]
fn end_degree_ladder_and_its_prism() {
    let t = ball(&ladder(), 6).unwrap();
    let rep = t.core.id("5,0").unwrap();
    let sel = EndSelector::Component { radius: 1, rep };
    let v = end_degree_bounds(&t, &sel, Mode::Vertex).unwrap();
    assert_eq!((v.lower, v.upper), (2, Some(2)));
    let v = end_degree_bounds(&t, &sel, Mode::Edge).unwrap();
    assert_eq!((v.lower, v.upper), (2, Some(2)));

    let p = t.prism();
    let rep = p.core.id("5,0|0").unwrap();
    let v = end_degree_bounds(&p, &EndSelector::Component { radius: 1, rep }, Mode::Vertex).unwrap();
    assert_eq!((v.lower, v.upper), (4, Some(4)));
}

#[test]
fn end_degree_tree_ends_are_thin() {
    let t = ball(&tree3(), 6).unwrap();
    let far = t.core.id("abcabc").unwrap();
    let v = end_degree_bounds(&t, &EndSelector::Ray(t.ray_to(far).unwrap()), Mode::Vertex).unwrap();
    assert_eq!((v.lower, v.upper), (1, Some(1)));
}

#[test]
fn end_degree_selector_that_splits_needs_refinement() {
    let t = ball(&tree3(), 5).unwrap();
    let rep = t.core.id("a").unwrap();
    let sel = EndSelector::Component { radius: 0, rep };
    assert!(matches!(end_degree_bounds(&t, &sel, Mode::Vertex), Err(Error::RefinementNeeded { .. })));
}

#[test]
fn end_degree_unbounded_when_still_growing() {
    // a half-grid's end keeps gaining disjoint rays as the ball widens
    let f: NeighborFn = Arc::new(|v: &str| {
        let (x, y) = v.split_once(',').unwrap();
        let (x, y): (i64, i64) = (x.parse().unwrap(), y.parse().unwrap());
        let mut nb = vec![format!("{},{y}", x - 1), format!("{},{y}", x + 1), format!("{x},{}", y + 1)];
        if y > 0 {
            nb.push(format!("{x},{}", y - 1));
        }
        Ok(nb)
    });
    let g = GeneratorGraph::new("half_grid", BTreeMap::new(), "0,0", f);
    let t = ball(&g, 6).unwrap();
    let rep = t.core.id("0,5").unwrap();
    let v = end_degree_bounds(&t, &EndSelector::Component { radius: 0, rep }, Mode::Vertex).unwrap();
    assert_eq!(v.upper, None);
    assert_eq!(v.upper_label(), "UNBOUNDED-AT-DEPTH");
    assert!(v.per_separator.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn audit_identity_is_clean() {
    for spec in ["family:ladder", "family:one_way_ladder", "family:tree3", "family:hex"] {
        let t = ball(&family(spec).unwrap(), 5).unwrap();
        let v = faithfulness_audit(&t, &t.core.edges(), &VSet::new()).unwrap();
        assert_eq!(v, AuditVerdict::CleanAtDepth { depth: 5 }, "{spec}");
    }
}

#[test]
fn audit_one_way_ladder_spanning_tree_violates() {
    let t = ball(&one_way_ladder(), 4).unwrap();
    let f = rails_and_rung(&t, 0);
    match faithfulness_audit(&t, &f, &VSet::new()).unwrap() {
        AuditVerdict::Violation { witness, .. } => {
            assert_eq!(witness.condition, 2);
            assert_eq!(witness.sub_components.len(), 2);
            assert!(!witness.edges.is_empty());
        }
        other => panic!("expected violation, got {other:?}"),
    }
}

#[test]
fn audit_bi_infinite_ladder_rails_and_rung_violates() {
    // the left end of the ladder holds two rail rays that one rung cannot join
    let t = ball(&ladder(), 6).unwrap();
    let f = rails_and_rung(&t, 0);
    let v = faithfulness_audit(&t, &f, &VSet::new()).unwrap();
    assert_eq!(v.label(), "VIOLATION");
}

#[test]
fn audit_ladder_with_all_rungs_but_one_is_clean() {
    let t = ball(&ladder(), 6).unwrap();
    let drop = edge(&t, "0,0", "0,1");
    let f: Vec<Edge> = t.core.edges().into_iter().filter(|&e| e != drop).collect();
    assert!(faithfulness_audit(&t, &f, &VSet::new()).unwrap().is_clean());
}

#[test]
fn audit_condition_one_witness() {
    // dropping every rail edge to the right of the root loses the right end
    let t = ball(&ladder(), 5).unwrap();
    let f: Vec<Edge> = t
        .core
        .edges()
        .into_iter()
        .filter(|&(a, b)| {
            let xa: i64 = t.core.name(a).split(',').next().unwrap().parse().unwrap();
            let xb: i64 = t.core.name(b).split(',').next().unwrap().parse().unwrap();
            xa == xb || xa.max(xb) <= 0
        })
        .collect();
    let all: VSet = (0..t.core.n()).collect();
    match faithfulness_audit(&t, &f, &all).unwrap() {
        AuditVerdict::Violation { witness, .. } => assert_eq!(witness.condition, 1),
        other => panic!("{other:?}"),
    }
}

#[test]
fn audit_rejects_bad_input() {
    let t = ball(&ladder(), 4).unwrap();
    let mut f = t.core.edges();
    f.pop();
    f.retain(|&(a, _)| a != 0);
    assert!(matches!(faithfulness_audit(&t, &f, &VSet::new()), Err(Error::Input(_))));
    let t2 = ball(&ladder(), 2).unwrap();
    assert!(matches!(faithfulness_audit(&t2, &t2.core.edges(), &VSet::new()), Err(Error::Input(_))));
}

#[test]
fn chain_composition() {
    let t = ball(&ladder(), 6).unwrap();
    let all = t.core.edge_names();
    let clean6 = AuditVerdict::CleanAtDepth { depth: 6 };
    let same = ChainLink::new(&all, &all, clean6.clone());
    assert_eq!(compose_faithful_chain(&[same.clone(), same.clone()]).unwrap(), clean6);

    let sub: Vec<_> = all[1..].to_vec();
    let mid: Vec<_> = all.to_vec();
    let a = ChainLink::new(&sub, &mid, AuditVerdict::CleanAtDepth { depth: 6 });
    let b = ChainLink::new(&mid, &all, AuditVerdict::CleanAtDepth { depth: 7 });
    assert_eq!(compose_faithful_chain(&[a.clone(), b]).unwrap(), clean6);

    let bad = faithfulness_audit(&t, &rails_and_rung(&t, 0), &VSet::new()).unwrap();
    let c = ChainLink::new(&mid, &all, bad.clone());
    assert_eq!(compose_faithful_chain(&[a.clone(), c]).unwrap(), bad);

    let rev = ChainLink::new(&all, &sub, clean6);
    assert!(matches!(compose_faithful_chain(&[rev]), Err(Error::Input(_))));
    assert!(matches!(compose_faithful_chain(&[a.clone(), a]), Err(Error::Input(_))));
    assert!(compose_faithful_chain(&[]).is_err());
}

#[test]
fn comb_examples() {
    let t = ball(&double_ray(), 6).unwrap();
    let u = ids(&t, &["0", "1", "2", "3", "4", "5", "6"]);
    match comb_extract(&t, &u, DEFAULT_COMB_TEETH).unwrap() {
        CombOutcome::Comb { spine, teeth } => {
            assert!(teeth.len() >= 5);
            assert!(teeth.iter().all(|p| p.len() == 1 && spine.contains(&p[0])));
        }
        other => panic!("{other:?}"),
    }

    let t = ball(&ladder(), 6).unwrap();
    let u: VSet = (0..t.core.n()).filter(|&v| t.core.name(v).ends_with(",0")).collect();
    match comb_extract(&t, &u, 5).unwrap() {
        CombOutcome::Comb { spine, teeth } => {
            assert!(teeth.len() >= 5);
            for p in &teeth {
                assert!(spine.contains(&p[0]) && u.contains(p.last().unwrap()));
                assert!(p[1..].iter().all(|x| !spine.contains(x)));
            }
        }
        other => panic!("{other:?}"),
    }

    let g = named::star(7);
    let t = ball(&GeneratorGraph::from_finite("star", &g, 0).unwrap(), 2).unwrap();
    let leaves: VSet = (1..8).map(|i| t.core.id(&i.to_string()).unwrap()).collect();
    match comb_extract(&t, &leaves, 5).unwrap() {
        CombOutcome::Star { center, paths } => {
            assert_eq!(t.core.name(center), "0");
            assert_eq!(paths.len(), 5);
        }
        other => panic!("{other:?}"),
    }
    assert!(matches!(comb_extract(&t, &ids(&t, &["1", "2"]), 5), Err(Error::Input(_))));
}

#[test]
fn prism_of_ball_keeps_levels() {
    let t = ball(&double_ray(), 3).unwrap();
    let p = t.prism();
    assert_eq!(p.core.n(), 14);
    assert_eq!(p.frontier.len(), 4);
    assert_eq!(p.core.name(p.root), "0|0");
    assert_eq!(p.level[p.core.id("-2|1").unwrap()], 2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn balls_grow_monotonically(fi in 0usize..FAMILIES.len(), r in 0usize..8) {
        let spec = if FAMILIES[fi] == "hex_cylinder" { "hex_cylinder?c=3".to_string() } else { FAMILIES[fi].to_string() };
        let g = family(&spec).unwrap();
        let a = ball(&g, r).unwrap();
        let b = ball(&g, r + 1).unwrap();
        let inner = b.ball_set(r);
        prop_assert_eq!(inner.len(), a.core.n());
        for (x, y) in a.core.edge_names() {
            let (i, j) = (b.core.id(&x).unwrap(), b.core.id(&y).unwrap());
            prop_assert!(b.core.has_edge(i, j));
        }
        for v in 0..a.core.n() {
            if !a.frontier.contains(&v) {
                let w = b.core.id(a.core.name(v)).unwrap();
                prop_assert_eq!(a.core.degree(v), b.core.degree(w));
            }
        }
    }

    #[test]
    fn identity_audit_clean_and_deterministic(fi in 0usize..FAMILIES.len(), r in 3usize..7) {
        let spec = if FAMILIES[fi] == "hex_cylinder" { "hex_cylinder?c=4".to_string() } else { FAMILIES[fi].to_string() };
        let g = family(&spec).unwrap();
        let t = ball(&g, r).unwrap();
        let v = faithfulness_audit(&t, &t.core.edges(), &VSet::new()).unwrap();
        prop_assert!(v.is_clean());
        let t2 = ball(&family(&spec).unwrap(), r).unwrap();
        prop_assert_eq!(&t, &t2);
        let f = rails_like(&t2);
        let all: VSet = (0..t.core.n()).collect();
        prop_assert_eq!(
            faithfulness_audit(&t, &f, &all).unwrap(),
            faithfulness_audit(&t2, &f, &all).unwrap()
        );
    }

    #[test]
    fn end_degree_monotone_in_depth(which in 0usize..2, r in 3usize..8) {
        let (g, far) = if which == 0 { (double_ray(), r.to_string()) } else { (ladder(), format!("{r},0")) };
        let lo = ball(&g, r).unwrap();
        let hi = ball(&g, r + 1).unwrap();
        let a = end_degree_bounds(&lo, &EndSelector::Ray(lo.ray_to(lo.core.id(&far).unwrap()).unwrap()), Mode::Vertex).unwrap();
        let b = end_degree_bounds(&hi, &EndSelector::Ray(hi.ray_to(hi.core.id(&far).unwrap()).unwrap()), Mode::Vertex).unwrap();
        prop_assert!(a.lower <= b.lower);
        if let (Some(x), Some(y)) = (a.upper, b.upper) {
            prop_assert!(y <= x);
        }
    }

    #[test]
    fn prism_doubles_end_statistic(which in 0usize..2, r in 3usize..8) {
        let (g, far) = if which == 0 { (double_ray(), r.to_string()) } else { (ladder(), format!("{r},0")) };
        let t = ball(&g, r).unwrap();
        let rep = t.core.id(&far).unwrap();
        let base = end_degree_bounds(&t, &EndSelector::Component { radius: 1, rep }, Mode::Vertex).unwrap();
        let p = t.prism();
        let prep = p.core.id(&format!("{far}|1")).unwrap();
        let lifted = end_degree_bounds(&p, &EndSelector::Component { radius: 1, rep: prep }, Mode::Vertex).unwrap();
        prop_assert_eq!(lifted.per_separator.len(), base.per_separator.len());
        for (x, y) in base.per_separator.iter().zip(&lifted.per_separator) {
            prop_assert_eq!(2 * x, *y);
        }
    }
}

/// Drops every third edge in index order; a deterministic non-trivial subgraph.
fn rails_like(t: &Truncation) -> Vec<Edge> {
    t.core.edges().into_iter().enumerate().filter(|(i, _)| i % 3 != 2).map(|(_, e)| e).collect()
}
