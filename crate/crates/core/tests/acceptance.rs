mod common;

use std::time::{Duration, Instant};

use common::*;
use prismcirc::cactus::validate_cactus;
use prismcirc::cert::{mutate_single_edge, verify_certificate, CertMode, PrismHamCertificate};
use prismcirc::flow::{menger, Mode};
use prismcirc::graph::{line_graph, power, prism, Edge, VSet};
use prismcirc::infinite::{
    ball, double_ray, end_degree_bounds, faithfulness_audit, family, ladder, one_way_ladder, AuditVerdict,
    EndSelector, Truncation,
};
use prismcirc::linegraph::{essential_cut_edges, linegraph_finite_pipeline, linegraph_prism_pipeline};
use prismcirc::named;
use prismcirc::prism::{
    ball_rounds, cubic3_finite_pipeline, cubic3_prism_circle_pipeline, end_degree_le_check,
    even_cactus_prism_hamcycle, prism_rounds, semicactus_prism_hamcycle, CircleOptions, FRound, PipelineOptions,
    PipelineReport,
};
use prismcirc::search::brute_force_hamiltonian_cycle_bounded;
use prismcirc::square::{assemble_semicactus, case_of, square_prism_pipeline, Case, RootedTreePlan, SquareOptions};
use rand::seq::SliceRandom;
use rand::Rng;

struct Outcome {
    failures: Vec<String>,
    detail: String,
}

impl Outcome {
    fn new() -> Self {
        Outcome { failures: Vec::new(), detail: String::new() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok && self.failures.len() < 5 {
            self.failures.push(what());
        }
    }
}

fn prism_ham(g: &prismcirc::Multigraph) -> bool {
    brute_force_hamiltonian_cycle_bounded(&prism(g), 28).unwrap().is_some()
}

fn finite_cubic_corpus() -> Outcome {
    let mut o = Outcome::new();
    let mut corpus = vec![
        ("K4", named::k4()),
        ("K33", named::k33()),
        ("cube", named::cube()),
        ("petersen", named::petersen()),
        ("prism5", named::prism_graph(5)),
        ("prism6", named::prism_graph(6)),
        ("prism7", named::prism_graph(7)),
        ("moebius4", named::moebius(4)),
        ("moebius5", named::moebius(5)),
        ("moebius6", named::moebius(6)),
        ("gp(6,2)", named::generalized_petersen(6, 2)),
        ("gp(7,2)", named::generalized_petersen(7, 2)),
    ];
    let mut r = rng(1);
    let mut random = 0;
    while random < 200 {
        let n = 2 * r.gen_range(3..=7);
        if let Some(g) = random_cubic(&mut r, n).filter(three_connected) {
            corpus.push(("random cubic", g));
            random += 1;
        }
    }
    for (name, g) in &corpus {
        let rep = cubic3_finite_pipeline(name, g).unwrap();
        let walk = rep.certificate.as_ref().is_some_and(|c| verify_certificate(c).is_ok() && oracle_prism_ham(g, &c.cycle));
        o.check(rep.verdict == "HAMILTONIAN" && walk, || format!("{name} {:?}: {}", g.edge_names(), rep.verdict));
        o.check(prism_ham(g), || format!("{name} {:?}: brute force finds no prism cycle", g.edge_names()));
    }
    o.detail = format!("{} graphs ({random} random, up to 14 vertices), pipeline and brute force agree", corpus.len());
    o
}

fn random_cubic(r: &mut rand_chacha::ChaCha8Rng, n: usize) -> Option<prismcirc::Multigraph> {
    let mut points: Vec<usize> = (0..3 * n).map(|p| p / 3).collect();
    points.shuffle(r);
    let mut es: Vec<(usize, usize)> = points.chunks(2).map(|c| (c[0].min(c[1]), c[0].max(c[1]))).collect();
    es.sort_unstable();
    let simple = es.windows(2).all(|w| w[0] != w[1]) && es.iter().all(|e| e.0 != e.1);
    simple.then(|| graph(n, &es))
}

fn three_connected(g: &prismcirc::Multigraph) -> bool {
    let n = g.n();
    (0..n).all(|a| (a + 1..n).all(|b| g.neighbors(a).contains(&b) || brute_local_connectivity(g, a, b) >= 3))
}

fn even_cacti() -> Outcome {
    let mut o = Outcome::new();
    let all = even_cacti_up_to(12);
    for c in &all {
        let g = c.graph();
        let cert = even_cactus_prism_hamcycle(&g, &validate_cactus(&g).unwrap());
        let walk = cert.as_ref().is_ok_and(|c| oracle_prism_ham(&g, &c.cycle));
        o.check(walk, || format!("cactus {} not walk-checked", c.code()));
        o.check(walk == prism_ham(&g), || format!("cactus {}: brute force disagrees", c.code()));
    }
    let mut r = rng(2024);
    let random = 300;
    for _ in 0..random {
        let target = r.gen_range(2..=40);
        let c = random_even_cactus(&mut r, target);
        let g = c.graph();
        let cert = even_cactus_prism_hamcycle(&g, &validate_cactus(&g).unwrap());
        o.check(cert.is_ok_and(|c| oracle_prism_ham(&g, &c.cycle)), || format!("random cactus {}", c.code()));
    }
    o.detail = format!("{} exhaustive (brute force), {random} random up to 40 vertices", all.len());
    o
}

fn end_degree_laws() -> Outcome {
    let mut o = Outcome::new();
    let t = ball(&double_ray(), 8).unwrap();
    let far = t.core.id("8").unwrap();
    let v = end_degree_bounds(&t, &EndSelector::Ray(t.ray_to(far).unwrap()), Mode::Vertex).unwrap();
    o.check((v.lower, v.upper) == (1, Some(1)), || format!("double ray end: ({}, {:?})", v.lower, v.upper));
    let t = ball(&ladder(), 8).unwrap();
    let rep = t.core.id("7,0").unwrap();
    let v = end_degree_bounds(&t, &EndSelector::Component { radius: 1, rep }, Mode::Vertex).unwrap();
    o.check((v.lower, v.upper) == (2, Some(2)), || format!("ladder end: ({}, {:?})", v.lower, v.upper));
    let mut laws = 0;
    for depth in 4..=8 {
        let t = ball(&double_ray(), depth).unwrap();
        let rounds = ball_rounds(&t, &t.core.edges());
        law(&mut o, &t, &rounds, &format!("double ray depth {depth}"));
        laws += 1;
        let t = ball(&ladder(), depth).unwrap();
        let run = prismcirc::cactus::spanning_cactus_rounds_on(&t, 3).unwrap();
        let rounds: Vec<FRound> = run.rounds.iter().map(|x| FRound::of_cactus(&x.f)).collect();
        law(&mut o, &t, &rounds, &format!("ladder cactus depth {depth}"));
        laws += 1;
    }
    o.detail = format!("double ray (1,1), ladder (2,2), prism factor law on {laws} approximant sequences");
    o
}

fn law(o: &mut Outcome, t: &Truncation, rounds: &[FRound], what: &str) {
    let b = end_degree_le_check(t, rounds, 1).unwrap();
    let (p, lifted) = prism_rounds(t, rounds);
    let l = end_degree_le_check(&p, &lifted, 2).unwrap();
    let ok = b.upper.is_some() && l.upper == b.upper.map(|u| 2 * u);
    o.check(ok, || format!("{what}: base {:?}, prism {:?}", b.upper, l.upper));
}

fn audit_sensitivity() -> Outcome {
    let mut o = Outcome::new();
    let t = ball(&one_way_ladder(), 4).unwrap();
    let rung: Edge = {
        let (x, y) = (t.core.id("0,0").unwrap(), t.core.id("0,1").unwrap());
        (x.min(y), x.max(y))
    };
    let mut f: Vec<Edge> = t
        .core
        .edges()
        .into_iter()
        .filter(|&(a, b)| t.core.name(a).split(',').nth(1) == t.core.name(b).split(',').nth(1))
        .collect();
    f.push(rung);
    let v = faithfulness_audit(&t, &f, &VSet::new()).unwrap();
    o.check(matches!(v, AuditVerdict::Violation { .. }), || format!("rails plus one rung at depth 4: {}", v.label()));
    let mut clean = 0;
    for spec in ["family:double_ray", "family:ladder", "family:one_way_ladder", "family:tree3", "family:hex"] {
        for depth in 3..=8 {
            let t = ball(&family(spec).unwrap(), depth).unwrap();
            let v = faithfulness_audit(&t, &t.core.edges(), &VSet::new()).unwrap();
            o.check(v.is_clean(), || format!("identity on {spec} at depth {depth}: {}", v.label()));
            clean += 1;
        }
    }
    o.detail = format!("VIOLATION at depth 4, identity CLEAN in {clean} runs up to depth 8");
    o
}

fn timed(f: impl FnOnce() -> PipelineReport) -> (PipelineReport, Duration) {
    let start = Instant::now();
    let rep = f();
    (rep, start.elapsed())
}

fn truncated_reports() -> Vec<(PipelineReport, Duration)> {
    let mut out = Vec::new();
    for spec in ["family:hex", "family:hex_cylinder?c=4", "family:hex_cylinder?c=6"] {
        let g = family(spec).unwrap();
        out.push(timed(|| cubic3_prism_circle_pipeline(&g, PipelineOptions::default()).unwrap()));
    }
    for spec in ["family:double_ray", "family:tree3"] {
        let g = family(spec).unwrap();
        out.push(timed(|| square_prism_pipeline(&g, SquareOptions::default()).unwrap()));
    }
    for spec in ["family:ladder", "family:hex"] {
        let g = family(spec).unwrap();
        out.push(timed(|| linegraph_prism_pipeline(&g, 5, CircleOptions::default()).unwrap()));
    }
    out
}

fn certificate_soundness(reports: &[(PipelineReport, Duration)]) -> Outcome {
    let mut o = Outcome::new();
    let certs: Vec<(&str, &PrismHamCertificate)> =
        reports.iter().filter_map(|(r, _)| r.certificate.as_ref().map(|c| (r.spec.as_str(), c))).collect();
    o.check(certs.len() == reports.len(), || "a pipeline emitted no certificate".into());
    let mut mutants = 0;
    for (i, (spec, c)) in certs.iter().enumerate() {
        o.check(c.mode == CertMode::Truncated, || format!("{spec}: not TRUNCATED"));
        let back = PrismHamCertificate::from_json(&c.to_json()).unwrap();
        o.check(verify_certificate(&back).is_ok(), || format!("{spec}: certificate rejected"));
        let mut r = rng(100 + i as u64);
        for k in 0..100 {
            let m = mutate_single_edge(&back, &mut r).unwrap();
            o.check(verify_certificate(&m).is_err(), || format!("{spec}: mutation {k} accepted"));
            mutants += 1;
        }
    }
    o.detail = format!("{} certificates verified, {mutants} mutants all rejected", certs.len());
    o
}

fn menger_kernel() -> Outcome {
    let mut o = Outcome::new();
    let mut r = rng(6);
    let samples = 10_000;
    let mut pairs = 0;
    for _ in 0..samples {
        let n = r.gen_range(2..=8);
        let p = r.gen_range(0.2..0.8);
        let g = random_connected(&mut r, n, p);
        for a in 0..n {
            for b in a + 1..n {
                let (k, ps) = menger(&g, a, b, Mode::Vertex).unwrap();
                o.check(ps.validate(&g), || format!("invalid path system {:?}", g.edge_names()));
                let want = brute_local_connectivity(&g, a, b);
                o.check(k == want, || format!("{:?} ({a},{b}): {k} vs {want}", g.edge_names()));
                pairs += 1;
            }
        }
    }
    o.detail = format!("{samples} random connected graphs, {pairs} pairs");
    o
}

fn square_assembly() -> Outcome {
    let mut o = Outcome::new();
    for d in 1..=8 {
        for d1 in 0..=8 {
            let hits = Case::ALL.iter().filter(|c| c.applies(d, d1)).count();
            o.check(hits == 1 && case_of(d, d1).is_some(), || format!("case table at ({d},{d1}): {hits} cases"));
        }
    }
    let trees = trees_up_to(12);
    for es in trees.iter().filter(|e| !e.is_empty()) {
        let n = es.len() + 1;
        let g = graph(n, es);
        let sq = power(&g, 2).unwrap();
        let plan = RootedTreePlan::of_tree(&g, 0).unwrap();
        let asm = assemble_semicactus(&plan, &sq, usize::MAX).unwrap();
        o.check(asm.checks.passed(), || format!("{es:?}: {:?}", asm.checks));
        let ok = match asm.semicactus(&sq) {
            Ok(s) if s.even && s.vertices.len() == n => {
                semicactus_prism_hamcycle(&sq, &s).is_ok_and(|c| oracle_prism_ham(&sq, &c.cycle))
            }
            _ => false,
        };
        o.check(ok, || format!("{es:?}: semi-cactus prism cycle"));
        o.check(prism_ham(&sq), || format!("{es:?}: brute force finds no cycle"));
    }
    o.detail = format!("case table on [1..8]x[0..8], {} trees with brute force", trees.len() - 1);
    o
}

fn c5_with_chords() -> Vec<prismcirc::Multigraph> {
    let chords = [(0, 2), (1, 3), (2, 4), (3, 0), (4, 1)];
    (0..32u32)
        .map(|mask| {
            let mut es: Vec<(usize, usize)> = (0..5).map(|i| (i, (i + 1) % 5)).collect();
            es.extend((0..5).filter(|&i| mask >> i & 1 == 1).map(|i| chords[i]));
            graph(5, &es)
        })
        .collect()
}

fn linegraph_small_cases() -> Outcome {
    let mut o = Outcome::new();
    let mut cases = vec![("K13".to_string(), named::star(3)), ("bowtie".to_string(), named::bowtie())];
    cases.extend(c5_with_chords().into_iter().enumerate().map(|(i, g)| (format!("C5 chords #{i}"), g)));
    for (name, g) in &cases {
        o.check(essential_cut_edges(g).is_empty(), || format!("{name}: has an essential cut-edge"));
        let rep = linegraph_finite_pipeline(name, g).unwrap();
        let lg = line_graph(g).unwrap();
        let ok = rep
            .certificate
            .as_ref()
            .is_some_and(|c| c.mode == CertMode::Finite && verify_certificate(c).is_ok() && oracle_prism_ham(&lg.graph, &c.cycle));
        o.check(ok, || format!("{name}: {}", rep.verdict));
        o.check(prism_ham(&lg.graph), || format!("{name}: brute force finds no cycle"));
    }
    o.detail = format!("{} graphs, FINITE certificates confirmed by brute force", cases.len());
    o
}

fn flagships(reports: &[(PipelineReport, Duration)]) -> Outcome {
    let mut o = Outcome::new();
    for (rep, took) in &reports[..4] {
        o.check(*took <= Duration::from_secs(600), || format!("{}: {:.0}s", rep.spec, took.as_secs_f64()));
    }
    for (rep, _) in &reports[..3] {
        let all_ok = rep.stages.iter().all(|s| s.ok);
        o.check(rep.verdict == "SUPPORTED-AT-DEPTH" && all_ok, || format!("{}: {}", rep.spec, rep.verdict));
        o.check(rep.rounds >= 2 && rep.radius >= 6, || format!("{}: rounds {} radius {}", rep.spec, rep.rounds, rep.radius));
    }
    let sq = &reports[3].0;
    o.check(sq.spec == "family:double_ray" && sq.verdict == "SUPPORTED-AT-DEPTH", || format!("square double ray: {}", sq.verdict));
    o.detail = reports[..4].iter().map(|(r, t)| format!("{} r={} {:.1}s", r.spec, r.radius, t.as_secs_f64())).collect::<Vec<_>>().join(", ");
    o
}

#[test]
fn acceptance() {
    let mut lines = Vec::new();
    let mut all = true;
    let mut record = |n: usize, name: &str, limit: Option<Duration>, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let out = f();
        let took = start.elapsed();
        let in_time = limit.is_none_or(|l| took <= l);
        let pass = out.failures.is_empty() && in_time;
        all &= pass;
        let mut line = format!(
            "criterion {n} {}: {name}: {} [{:.1}s]",
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            took.as_secs_f64()
        );
        if !in_time {
            line.push_str(&format!(" over the {}s limit", limit.unwrap().as_secs()));
        }
        for f in &out.failures {
            line.push_str(&format!("\n    {f}"));
        }
        println!("{line}");
        lines.push(line);
    };
    let min = |m: u64| Some(Duration::from_secs(60 * m));
    record(1, "finite cubic 3-connected corpus", min(5), &mut finite_cubic_corpus);
    record(2, "even cactus prism cycles", min(2), &mut even_cacti);
    record(3, "end-degree laws", None, &mut end_degree_laws);
    record(4, "faithfulness audit sensitivity", None, &mut audit_sensitivity);
    let reports = truncated_reports();
    let built: Duration = reports.iter().map(|r| r.1).sum();
    record(5, "certificate soundness", min(5).map(|l| l.saturating_sub(built)), &mut || certificate_soundness(&reports));
    record(6, "Menger kernel", None, &mut menger_kernel);
    record(7, "square case table and tree assembly", min(5), &mut square_assembly);
    record(8, "line graph small cases", None, &mut linegraph_small_cases);
    record(9, "infinite flagships", None, &mut || flagships(&reports));
    assert!(all, "{}", lines.join("\n"));
}
