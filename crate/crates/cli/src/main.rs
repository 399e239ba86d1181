use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use prismcirc::cert::{mutate_single_edge, verify_certificate, CertMode, PrismHamCertificate};
use prismcirc::graph::{prism, Multigraph};
use prismcirc::infinite::{ball, family, GeneratorGraph};
use prismcirc::io::GraphDoc;
use prismcirc::linegraph::{linegraph_finite_pipeline, linegraph_prism_pipeline};
use prismcirc::named;
use prismcirc::prism::{cubic3_finite_pipeline, cubic3_prism_circle_pipeline, CircleOptions, PipelineOptions, PipelineReport};
use prismcirc::search::{brute_force_hamiltonian_cycle_bounded, DEFAULT_ORACLE_BOUND};
use prismcirc::square::{square_finite_pipeline, square_prism_pipeline, SquareOptions};
use prismcirc::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

const ORACLE_BOUND_VAR: &str = "PRISMCIRC_ORACLE_BOUND";

#[derive(Parser)]
#[command(name = "prismcirc", version, about = "Prism Hamiltonicity pipelines and certificates for locally finite graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a ball of a family (or a named finite graph) as graph JSON.
    Generate {
        /// `family:<name>[?k=v]` or a named graph such as `petersen` or `cycle:5`.
        spec: String,
        #[arg(long, short, default_value_t = 3)]
        radius: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write DOT here.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Run a pipeline and write its report and certificate.
    Run {
        #[arg(long, value_enum)]
        pipeline: Pipeline,
        /// `family:<name>[?k=v]` for an infinite graph, or a named finite graph.
        #[arg(required_unless_present = "input", conflicts_with = "input")]
        spec: Option<String>,
        /// Finite graph JSON.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        rounds: usize,
        #[arg(long, default_value_t = 6)]
        depth: usize,
        #[arg(long, default_value_t = 24)]
        max_radius: usize,
        /// Seed for the mutation self-check.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of single-edge mutations of the certificate that must be rejected.
        #[arg(long, default_value_t = 0)]
        mutations: usize,
        /// Write `report.json` and `certificate.json` here instead of printing.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Re-check a certificate from its own contents.
    Verify { certificate: PathBuf },
    /// Convert graph JSON to DOT.
    ExportDot {
        graph: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Pipeline {
    Cubic3,
    Square,
    Linegraph,
}

impl Pipeline {
    fn name(self) -> &'static str {
        match self {
            Pipeline::Cubic3 => "cubic3",
            Pipeline::Square => "square",
            Pipeline::Linegraph => "linegraph",
        }
    }
}

enum Failure {
    Usage(String),
    Failed(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Input(_) | Error::Unsupported(_) => Failure::Usage(e.to_string()),
            _ => Failure::Failed(e.to_string()),
        }
    }
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

enum Subject {
    Infinite(GeneratorGraph),
    Finite(String, Multigraph),
}

fn subject(spec: &str) -> Result<Subject, Failure> {
    if spec.starts_with("family:") {
        Ok(Subject::Infinite(family(spec)?))
    } else {
        Ok(Subject::Finite(spec.to_string(), named::by_name(spec)?))
    }
}

/// Writes through a temporary file in the same directory.
fn write_atomic(path: &Path, contents: &str) -> Result<(), Failure> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents).map_err(|e| Failure::Failed(format!("{}: {e}", tmp.display())))?;
    fs::rename(&tmp, path).map_err(|e| Failure::Failed(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, contents: &str) -> Result<(), Failure> {
    match out {
        Some(p) => write_atomic(p, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json serializes");
    s.push('\n');
    s
}

fn oracle_bound() -> Result<usize, Failure> {
    match std::env::var(ORACLE_BOUND_VAR) {
        Ok(s) => s.parse().map_err(|_| usage(format!("{ORACLE_BOUND_VAR} must be a number, got {s}"))),
        Err(_) => Ok(DEFAULT_ORACLE_BOUND),
    }
}

fn generate(spec: &str, radius: usize, out: Option<&Path>, dot: Option<&Path>) -> Result<u8, Failure> {
    let doc = match subject(spec)? {
        Subject::Infinite(g) => GraphDoc::of_truncation(&ball(&g, radius)?),
        Subject::Finite(name, g) => GraphDoc::of_graph(&name, &g),
    };
    let mut json = doc.to_json();
    json.push('\n');
    emit(out, &json)?;
    if let Some(d) = dot {
        write_atomic(d, &doc.to_dot())?;
    }
    Ok(0)
}

struct RunArgs {
    pipeline: Pipeline,
    spec: Option<String>,
    input: Option<PathBuf>,
    rounds: usize,
    depth: usize,
    max_radius: usize,
    seed: u64,
    mutations: usize,
    out_dir: Option<PathBuf>,
}

fn run_pipeline(a: &RunArgs, subject: &Subject) -> Result<PipelineReport, Failure> {
    let circle = CircleOptions::default();
    let rep = match (subject, a.pipeline) {
        (Subject::Finite(name, g), Pipeline::Cubic3) => cubic3_finite_pipeline(name, g)?,
        (Subject::Finite(name, g), Pipeline::Square) => square_finite_pipeline(name, g, 0)?,
        (Subject::Finite(name, g), Pipeline::Linegraph) => linegraph_finite_pipeline(name, g)?,
        (Subject::Infinite(g), Pipeline::Cubic3) => cubic3_prism_circle_pipeline(
            g,
            PipelineOptions { rounds: a.rounds, depth: a.depth, max_radius: a.max_radius, circle },
        )?,
        (Subject::Infinite(g), Pipeline::Square) => square_prism_pipeline(
            g,
            SquareOptions { rounds: a.rounds, depth: a.depth, max_radius: a.max_radius, circle },
        )?,
        (Subject::Infinite(g), Pipeline::Linegraph) => linegraph_prism_pipeline(g, a.depth, circle)?,
    };
    Ok(rep)
}

fn oracle_check(cert: &PrismHamCertificate, bound: usize) -> Result<(String, bool), Failure> {
    let p = prism(&cert.host.graph()?);
    Ok(match brute_force_hamiltonian_cycle_bounded(&p, bound) {
        Ok(Some(_)) => ("agrees".to_string(), true),
        Ok(None) => ("disagrees: prism has no Hamiltonian cycle".to_string(), false),
        Err(Error::SizeBound { size, bound }) => (format!("skipped: {size} vertices > bound {bound}"), true),
        Err(e) => return Err(e.into()),
    })
}

fn run(a: RunArgs) -> Result<u8, Failure> {
    let (input, subject) = match (&a.spec, &a.input) {
        (Some(s), None) => (s.clone(), subject(s)?),
        (None, Some(p)) => {
            let doc = GraphDoc::from_json(&read(p)?)?;
            (p.display().to_string(), Subject::Finite(doc.spec.clone(), doc.graph()?))
        }
        _ => return Err(usage("give either a spec or --input")),
    };
    let bound = oracle_bound()?;
    let mut rep = run_pipeline(&a, &subject)?;
    let cert = rep.certificate.take();
    let mut notes = serde_json::Map::new();
    let mut ok = cert.is_some() && rep.supported();
    if let Some(c) = &cert {
        match verify_certificate(c) {
            Ok(s) => {
                notes.insert("verify".into(), json!({ "cuts": s.cuts_checked, "pairs": s.pairs_checked }));
            }
            Err(e) => {
                notes.insert("verify".into(), json!(e.to_string()));
                ok = false;
            }
        }
        if c.mode == CertMode::Finite {
            let (label, agrees) = oracle_check(c, bound)?;
            notes.insert("oracle".into(), json!({ "bound": bound, "result": label }));
            ok &= agrees;
        }
        if a.mutations > 0 {
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            let mut accepted = 0;
            for _ in 0..a.mutations {
                if verify_certificate(&mutate_single_edge(c, &mut rng)?).is_ok() {
                    accepted += 1;
                }
            }
            notes.insert("mutations".into(), json!({ "tried": a.mutations, "accepted": accepted }));
            ok &= accepted == 0;
        }
    }
    let (status, code) = match &cert {
        Some(c) if ok && c.mode == CertMode::Finite => ("FINITE-VERIFIED", 0),
        Some(_) if ok => ("SUPPORTED-AT-DEPTH", 0),
        _ if rep.inconclusive() => ("INCONCLUSIVE", 3),
        _ => ("FAILED", 1),
    };
    let mut out = json!({
        "command": "run",
        "pipeline": a.pipeline.name(),
        "input": input,
        "rounds": a.rounds,
        "depth": a.depth,
        "max_radius": a.max_radius,
        "seed": a.seed,
        "status": status,
        "exit_code": code,
        "checks": notes,
        "report": rep,
    });
    match &a.out_dir {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| Failure::Failed(format!("{}: {e}", dir.display())))?;
            if let Some(c) = &cert {
                write_atomic(&dir.join("certificate.json"), &format!("{}\n", c.to_json()))?;
                out["certificate_file"] = json!("certificate.json");
            }
            write_atomic(&dir.join("report.json"), &pretty(&out))?;
        }
        None => {
            out["certificate"] = serde_json::to_value(&cert).expect("certificate serializes");
            print!("{}", pretty(&out));
        }
    }
    Ok(code)
}

fn verify(path: &Path) -> Result<u8, Failure> {
    let cert = PrismHamCertificate::from_json(&read(path)?)?;
    let (out, code) = match verify_certificate(&cert) {
        Ok(s) => (
            json!({
                "status": "PASS",
                "mode": s.mode,
                "prism_vertices": s.prism_vertices,
                "cuts": s.cuts_checked,
                "pairs": s.pairs_checked,
            }),
            0,
        ),
        Err(e) => (json!({ "status": "FAIL", "reason": e.to_string() }), 1),
    };
    print!("{}", pretty(&out));
    Ok(code)
}

fn export_dot(path: &Path, out: Option<&Path>) -> Result<u8, Failure> {
    let doc = GraphDoc::from_json(&read(path)?)?;
    emit(out, &doc.to_dot())?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate { spec, radius, out, dot } => generate(&spec, radius, out.as_deref(), dot.as_deref()),
        Command::Run { pipeline, spec, input, rounds, depth, max_radius, seed, mutations, out_dir } => {
            run(RunArgs { pipeline, spec, input, rounds, depth, max_radius, seed, mutations, out_dir })
        }
        Command::Verify { certificate } => verify(&certificate),
        Command::ExportDot { graph, out } => export_dot(&graph, out.as_deref()),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Failed(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
