//! `dmod`: classify invariant D-modules from JSON inputs.
//!
//! Exit codes: 0 success, 1 negative verdict, 2 input error, 3 numerical failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use dmod_core::borel::{borel_gauge, diagonal_reduction, verify_intertwining, FD_TOLERANCE};
use dmod_core::dmod::{hom_dimension, sl2_adjoint_fixture, GroupKind, InvariantDModule};
use dmod_core::io::{self, Document};
use dmod_core::lie::{Representation, ValidationReport};
use dmod_core::torus::{laurent_gauge, TorusRep};
use dmod_core::unipotent::{canonical_class, gauge_equivalent, trace_word_invariants, CanonicalClass};
use dmod_core::{DmodError, ToleranceConfig};

#[derive(Parser, Debug)]
#[command(name = "dmod", version, about = "Invariant D-modules on unipotent groups, tori and Borel subgroups")]
struct Cli {
    /// Relative equality tolerance for approximate scalars.
    #[arg(long, global = true, default_value_t = ToleranceConfig::default().eps)]
    tolerance: f64,
    /// Eigenvalue clustering radius.
    #[arg(long, global = true, default_value_t = ToleranceConfig::default().cluster_eps)]
    cluster: f64,
    /// Seed for every randomized step.
    #[arg(long, global = true, env = "DMOD_SEED", default_value_t = 0)]
    seed: u64,
    /// Longest trace word (default: the rank).
    #[arg(long, global = true)]
    max_word_len: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate a Lie algebra or representation file.
    Check { file: PathBuf },
    /// Canonical class of a representation, or of every file in a directory.
    Canonical { input: PathBuf },
    /// Gauge equivalence over the unipotent group.
    Equiv { first: PathBuf, second: PathBuf },
    /// Gauge equivalence over the torus, with a Laurent gauge when positive.
    TorusEquiv { first: PathBuf, second: PathBuf },
    /// Diagonal reduction of a Borel representation plus its verification.
    BorelReduce {
        file: PathBuf,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Dimension of the Hom space between two unipotent D-modules.
    HomDim { first: PathBuf, second: PathBuf },
    /// Trace-word invariants.
    Traces { file: PathBuf },
    /// Verify the sl2 adjoint example.
    FixtureSl2,
}

/// A finished report and whether its verdict was positive.
struct Outcome {
    report: Value,
    verdict: bool,
}

fn positive(report: Value) -> Outcome {
    Outcome { report, verdict: true }
}

fn representation(path: &Path) -> Result<Representation, DmodError> {
    match io::read_document(path)? {
        Document::Representation(r) => Ok(r),
        Document::Borel(_, r) => Ok(r),
        _ => Err(DmodError::Parse(format!("{}: expected a representation", path.display()))),
    }
}

fn torus(path: &Path) -> Result<TorusRep, DmodError> {
    match io::read_document(path)? {
        Document::Torus(t) => Ok(t),
        Document::Representation(r) => TorusRep::new(r.rank, r.images),
        _ => Err(DmodError::Parse(format!("{}: expected a torus_rep", path.display()))),
    }
}

fn check(file: &Path) -> Result<Outcome, DmodError> {
    let doc = io::read_document(file)?;
    let (kind, report) = match &doc {
        Document::LieAlgebra(a) => ("lie_algebra", a.validate()),
        Document::Representation(r) => ("representation", r.validate()),
        Document::Borel(_, r) => ("borel_rep", r.validate()),
        Document::Torus(_) => ("torus_rep", ValidationReport { failures: Vec::new() }),
    };
    let mut out = io::validation_to_json(&report);
    out["kind"] = json!(kind);
    out["mode"] = json!("exact");
    if let Document::LieAlgebra(a) = &doc {
        let p = a.nilpotency_profile();
        out["nilpotent"] = json!(p.is_nilpotent);
        out["abelianization_dim"] = json!(p.abelianization_dim);
    }
    if !report.is_valid() {
        out["error"] = json!(format!("{} is invalid", file.display()));
        return Ok(Outcome { report: out, verdict: false });
    }
    Ok(positive(out))
}

fn canonical(input: &Path, cfg: &ToleranceConfig) -> Result<Outcome, DmodError> {
    if !input.is_dir() {
        let class = canonical_class(&representation(input)?, cfg)?;
        return Ok(positive(io::canonical_class_to_json(&class)));
    }
    let mut paths: Vec<PathBuf> = std::fs::read_dir(input)
        .map_err(|e| DmodError::Parse(format!("{}: {e}", input.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    // files that are not representations (e.g. referenced algebras) are skipped
    let results: Vec<(PathBuf, Result<CanonicalClass, DmodError>)> = paths
        .par_iter()
        .filter_map(|p| match representation(p) {
            Err(DmodError::Parse(_)) => None,
            other => Some((p.clone(), other.and_then(|r| canonical_class(&r, cfg)))),
        })
        .collect();
    let classes: Vec<(&PathBuf, &CanonicalClass)> =
        results.iter().filter_map(|(p, c)| c.as_ref().ok().map(|c| (p, c))).collect();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (k, (_, c)) in classes.iter().enumerate() {
        match groups.iter_mut().find(|g| {
            let rep = classes[g[0]].1;
            rep.l == c.l && rep.n == c.n && rep.same_as(c, cfg.cluster_eps)
        }) {
            Some(g) => g.push(k),
            None => groups.push(vec![k]),
        }
    }
    let name = |k: usize| json!(classes[k].0.display().to_string());
    let entries: Vec<Value> = results
        .iter()
        .map(|(p, c)| match c {
            Ok(c) => json!({"path": p.display().to_string(), "class": io::canonical_class_to_json(c)}),
            Err(e) => json!({"path": p.display().to_string(), "error": e.to_string()}),
        })
        .collect();
    let groups: Vec<Value> = groups.iter().map(|g| Value::Array(g.iter().map(|&k| name(k)).collect())).collect();
    let exact = classes.iter().all(|(_, c)| c.is_exact());
    Ok(positive(json!({
        "classes": entries,
        "groups": groups,
        "mode": if exact { "exact" } else { "approx" },
    })))
}

fn equiv(a: &Path, b: &Path, cfg: &ToleranceConfig) -> Result<Outcome, DmodError> {
    let cert = gauge_equivalent(&representation(a)?, &representation(b)?, cfg)?;
    Ok(Outcome { report: io::certificate_to_json(&cert), verdict: cert.verdict })
}

fn torus_equiv(a: &Path, b: &Path, cfg: &ToleranceConfig) -> Result<Outcome, DmodError> {
    let (r1, r2) = (torus(a)?, torus(b)?);
    let cert = dmod_core::torus::torus_gauge_equivalent(&r1, &r2, cfg)?;
    let mut out = io::certificate_to_json(&cert);
    if let (true, Some(g)) = (cert.verdict, &cert.conjugator) {
        let gauge = laurent_gauge(&r1, &r2, g, cfg)?;
        let mut gj = io::laurent_gauge_to_json(&gauge);
        match &gauge {
            dmod_core::torus::AnyLaurentGauge::Exact(x) => {
                gj["intertwines_exactly"] = json!(x.intertwines_exactly(&r1, &r2));
            }
            dmod_core::torus::AnyLaurentGauge::Approx(_) => {
                gj["residual"] = json!(gauge.intertwining_defect(&r1, &r2));
            }
        }
        out["laurent_gauge"] = gj;
    }
    Ok(Outcome { report: out, verdict: cert.verdict })
}

fn borel_reduce(file: &Path, samples: usize, cfg: &ToleranceConfig) -> Result<Outcome, DmodError> {
    let (borel, rho) = match io::read_document(file)? {
        Document::Borel(b, r) => (b, r),
        _ => return Err(DmodError::Parse(format!("{}: expected a borel_rep", file.display()))),
    };
    let reduced = diagonal_reduction(&borel, &rho)?;
    let gauge = borel_gauge(&borel, &rho)?;
    let report = verify_intertwining(&borel, &|p| gauge.eval_c64(p), &rho, &reduced, samples, cfg)?;
    let passed = report.passed();
    Ok(Outcome {
        report: json!({
            "reduced": io::borel_rep_to_json(&borel, &reduced),
            "certificate": io::reduction_certificate_to_json(&gauge.certificate),
            "verification": io::verification_to_json(&report),
            "tolerance": FD_TOLERANCE,
            "mode": "approx",
        }),
        verdict: passed,
    })
}

fn hom_dim(a: &Path, b: &Path, cfg: &ToleranceConfig) -> Result<Outcome, DmodError> {
    let m1 = InvariantDModule::new(representation(a)?, GroupKind::Unipotent)?;
    let m2 = InvariantDModule::new(representation(b)?, GroupKind::Unipotent)?;
    Ok(positive(io::hom_space_to_json(&hom_dimension(&m1, &m2, cfg)?)))
}

fn traces(file: &Path, max_len: Option<usize>) -> Result<Outcome, DmodError> {
    let rho = representation(file)?;
    let len = max_len.unwrap_or(rho.rank.max(1));
    if len == 0 {
        return Err(DmodError::Precondition("max word length must be at least 1".into()));
    }
    Ok(positive(io::trace_table_to_json(&trace_word_invariants(&rho, len), len)))
}

fn run(cli: &Cli) -> Result<Outcome, DmodError> {
    let cfg = ToleranceConfig {
        eps: cli.tolerance,
        cluster_eps: cli.cluster,
        rng_seed: cli.seed,
        ..Default::default()
    };
    cfg.validate()?;
    match &cli.command {
        Command::Check { file } => check(file),
        Command::Canonical { input } => canonical(input, &cfg),
        Command::Equiv { first, second } => equiv(first, second, &cfg),
        Command::TorusEquiv { first, second } => torus_equiv(first, second, &cfg),
        Command::BorelReduce { file, samples } => borel_reduce(file, *samples, &cfg),
        Command::HomDim { first, second } => hom_dim(first, second, &cfg),
        Command::Traces { file } => traces(file, cli.max_word_len),
        Command::FixtureSl2 => {
            let r = sl2_adjoint_fixture();
            Ok(Outcome { verdict: r.passed(), report: io::fixture_to_json(&r) })
        }
    }
}

fn render_text(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                match x {
                    Value::Object(_) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render_text(x, indent + 1, out);
                    }
                    _ => out.push_str(&format!("{pad}{k}: {}\n", scalar_text(x))),
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar_text(other))),
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn emit(cli: &Cli, report: Value) -> Result<(), DmodError> {
    let text = match cli.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&io::tagged(report)).expect("JSON values serialize");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut s = String::new();
            render_text(&io::tagged(report), 0, &mut s);
            s
        }
    };
    match &cli.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| DmodError::Parse(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome { report, verdict }) => {
            let invalid = report.get("error").is_some();
            if let Err(e) = emit(&cli, report) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if invalid {
                eprintln!("error: validation failed");
                ExitCode::from(2)
            } else if verdict {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 3 } else { 2 })
        }
    }
}
