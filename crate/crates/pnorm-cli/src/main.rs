//! `pnorm` command-line interface.
//!
//! Subcommands: `norm`, `gap`, `verify`, `counterexample`, `sweep`. JSON goes
//! to stdout, diagnostics to stderr. Exit codes: 0 success (or C*-like at the
//! checked instance), 1 input error, 2 non-convergence, 3 property or gap
//! failure.

mod verify;

use std::fs::File;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use pnorm::experiments::{
    default_sweep_grid, sd_claim_cases, sd_claim_oracle, sd_counterexample_with, sd_sweep,
    upper_triangular_example, ClaimCase,
};
use pnorm::opnorm::{
    op_norm_estimate, op_norm_exact, op_norm_oracle_with, oracle_gap_bound, OracleOptions,
};
use pnorm::pairing::{cstar_gap_column, cstar_gap_row, GapReport};
use pnorm::par::init_thread_cap;
use pnorm::{
    Algebra, ColumnModuleElement, ComplexMatrix, NormEstimate, OptimizerConfig, PExponent,
    RowModuleElement,
};

#[derive(Parser)]
#[command(name = "pnorm", version, about = "Matrix p->q operator norms and norm-recovery gaps")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute the p->q operator norm of a matrix from a JSON file.
    Norm(NormArgs),
    /// Norm-recovery gap of a module element over an algebra.
    Gap(GapArgs),
    /// Run a randomized property suite.
    Verify(VerifyArgs),
    /// Reproduce a built-in counterexample.
    Counterexample(CounterexampleArgs),
    /// Sweep norm, pairing supremum, and gap over a grid of exponents.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct NormArgs {
    /// Matrix JSON file ({"rows", "cols", "entries": [[re, im], ...]}).
    matrix: PathBuf,
    #[arg(short, long, default_value = "2")]
    p: PExponent,
    #[arg(short, long, default_value = "2")]
    q: PExponent,
    /// Closed-form only; errors for unsupported (p, q).
    #[arg(long, group = "mode")]
    exact: bool,
    /// Restarted power iteration (default; routes to closed forms).
    #[arg(long, group = "mode")]
    estimate: bool,
    /// Deterministic grid search over the unit p-sphere.
    #[arg(long, group = "mode")]
    oracle: bool,
    #[arg(long, default_value_t = 64)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Grid resolution for --oracle.
    #[arg(long, default_value_t = 24)]
    resolution: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Column,
    Row,
}

#[derive(Args)]
struct GapArgs {
    /// Element JSON file: the stacked nd x d (column) or d x nd (row) matrix.
    element: PathBuf,
    /// Algebra JSON file ({"kind": "block", "parts": [...]} or
    /// {"kind": "basis", "dim": d, "basis": [...]}).
    #[arg(long)]
    algebra: PathBuf,
    #[arg(short, long, default_value = "2")]
    p: PExponent,
    #[arg(long, value_enum, default_value_t = SideArg::Column)]
    side: SideArg,
    /// Gap above this is reported as not C*-like (exit 3).
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 64)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Attach an oracle bracket at non-exact exponents.
    #[arg(long)]
    oracle_resolution: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(value_enum)]
    suite: verify::Suite,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum CounterexampleName {
    UpperTriangular,
    Sd,
}

#[derive(Args)]
struct CounterexampleArgs {
    #[arg(value_enum)]
    name: CounterexampleName,
    /// Exponent (upper-triangular only; the sd instance is pinned at p = 1).
    #[arg(short, long, default_value = "1")]
    p: PExponent,
    /// Number of stacked blocks (upper-triangular only).
    #[arg(short, long, default_value_t = 1)]
    n: usize,
    #[arg(long, default_value_t = 256)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SweepArgs {
    /// Comma-separated exponent grid, e.g. "1.5,2,3".
    #[arg(long)]
    grid: Option<String>,
    /// CSV output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 256)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Provenance block serialized into every output.
#[derive(Serialize)]
struct RunManifest {
    command: String,
    args: Vec<String>,
    seed: u64,
    version: String,
    duration_secs: f64,
}

impl RunManifest {
    fn new(command: &str, seed: u64, started: Instant) -> Self {
        RunManifest {
            command: command.to_string(),
            args: std::env::args().skip(1).collect(),
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            duration_secs: started.elapsed().as_secs_f64(),
        }
    }
}

const EXIT_INPUT: i32 = 1;
const EXIT_NONCONVERGED: i32 = 2;
const EXIT_FAILED: i32 = 3;

fn main() {
    if let Ok(v) = std::env::var("PNORM_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n >= 1 => init_thread_cap(Some(n)),
            _ => {
                eprintln!("PNORM_THREADS must be a positive integer, got {v:?}");
                std::process::exit(EXIT_INPUT);
            }
        }
    }
    let cli = Cli::parse();
    let started = Instant::now();
    let code = match run(cli.cmd, started) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    };
    std::process::exit(code);
}

fn run(cmd: Cmd, started: Instant) -> Result<i32, Box<dyn std::error::Error>> {
    match cmd {
        Cmd::Norm(a) => cmd_norm(a, started),
        Cmd::Gap(a) => cmd_gap(a, started),
        Cmd::Verify(a) => cmd_verify(a, started),
        Cmd::Counterexample(a) => cmd_counterexample(a, started),
        Cmd::Sweep(a) => cmd_sweep(a, started),
    }
}

fn read_matrix(path: &PathBuf) -> Result<ComplexMatrix, Box<dyn std::error::Error>> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn emit<T: Serialize>(value: &T) -> Result<(), Box<dyn std::error::Error>> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

#[derive(Serialize)]
struct OracleOutput {
    value: f64,
    grid_value: f64,
    resolution: usize,
    gap_bound: f64,
    upper_bound: f64,
}

#[derive(Serialize)]
struct NormOutput {
    manifest: RunManifest,
    p: PExponent,
    q: PExponent,
    estimate: Option<NormEstimate>,
    oracle: Option<OracleOutput>,
}

fn cmd_norm(a: NormArgs, started: Instant) -> Result<i32, Box<dyn std::error::Error>> {
    let m = read_matrix(&a.matrix)?;
    let cfg = OptimizerConfig::default()
        .with_seed(a.seed)
        .with_restarts(a.restarts);

    let (estimate, oracle) = if a.oracle {
        let outcome = op_norm_oracle_with(&m, a.p, a.q, a.resolution, OracleOptions::default())?;
        let bound = oracle_gap_bound(&m, a.p, a.q, a.resolution);
        (
            None,
            Some(OracleOutput {
                value: outcome.value,
                grid_value: outcome.grid_value,
                resolution: a.resolution,
                gap_bound: bound,
                upper_bound: outcome.value + bound,
            }),
        )
    } else if a.exact {
        (Some(op_norm_exact(&m, a.p, a.q)?), None)
    } else {
        (Some(op_norm_estimate(&m, a.p, a.q, &cfg)), None)
    };

    let converged = estimate.as_ref().map(|e| e.converged).unwrap_or(true);
    let out = NormOutput {
        manifest: RunManifest::new("norm", a.seed, started),
        p: a.p,
        q: a.q,
        estimate,
        oracle,
    };
    emit(&out)?;
    Ok(if converged { 0 } else { EXIT_NONCONVERGED })
}

#[derive(Serialize)]
struct GapOutput {
    manifest: RunManifest,
    tolerance: f64,
    cstar_like: bool,
    report: GapReport,
}

fn cmd_gap(a: GapArgs, started: Instant) -> Result<i32, Box<dyn std::error::Error>> {
    let algebra: Algebra = serde_json::from_str(&std::fs::read_to_string(&a.algebra)?)?;
    let matrix = read_matrix(&a.element)?;
    let mut cfg = OptimizerConfig::default()
        .with_seed(a.seed)
        .with_restarts(a.restarts);
    cfg.oracle_resolution = a.oracle_resolution;

    let report = match a.side {
        SideArg::Column => {
            let el = ColumnModuleElement::from_matrix(algebra, matrix)?;
            cstar_gap_column(&el, a.p, &cfg)?
        }
        SideArg::Row => {
            let el = RowModuleElement::from_matrix(algebra, matrix)?;
            cstar_gap_row(&el, a.p, &cfg)?
        }
    };
    let cstar_like = report.gap <= a.tol;
    let out = GapOutput {
        manifest: RunManifest::new("gap", a.seed, started),
        tolerance: a.tol,
        cstar_like,
        report,
    };
    emit(&out)?;
    Ok(if cstar_like { 0 } else { EXIT_FAILED })
}

#[derive(Serialize)]
struct VerifyOutput {
    manifest: RunManifest,
    report: verify::SuiteReport,
}

fn cmd_verify(a: VerifyArgs, started: Instant) -> Result<i32, Box<dyn std::error::Error>> {
    let report = verify::run_suite(a.suite, a.trials, a.seed);
    let passed = report.passed;
    if !passed {
        for f in &report.failures {
            eprintln!(
                "property failure: {} trial {} (seed {}): residual {:e} > {:e}",
                f.property, f.trial, f.seed, f.residual, f.tolerance
            );
        }
    }
    let out = VerifyOutput {
        manifest: RunManifest::new("verify", a.seed, started),
        report,
    };
    emit(&out)?;
    Ok(if passed { 0 } else { EXIT_FAILED })
}

#[derive(Serialize)]
struct ClaimOracleOutput {
    cases: Vec<ClaimCase>,
    value: f64,
}

#[derive(Serialize)]
struct CounterexampleOutput {
    manifest: RunManifest,
    report: GapReport,
    /// Independent 1-D reduction value for the sd instance.
    claim_oracle: Option<ClaimOracleOutput>,
}

fn cmd_counterexample(
    a: CounterexampleArgs,
    started: Instant,
) -> Result<i32, Box<dyn std::error::Error>> {
    let cfg = OptimizerConfig::default()
        .with_seed(a.seed)
        .with_restarts(a.restarts);
    let (report, claim_oracle) = match a.name {
        CounterexampleName::UpperTriangular => (upper_triangular_example(a.p, a.n)?, None),
        CounterexampleName::Sd => (
            sd_counterexample_with(&cfg)?,
            Some(ClaimOracleOutput {
                cases: sd_claim_cases().to_vec(),
                value: sd_claim_oracle(),
            }),
        ),
    };
    let out = CounterexampleOutput {
        manifest: RunManifest::new("counterexample", a.seed, started),
        report,
        claim_oracle,
    };
    emit(&out)?;
    Ok(0)
}

#[derive(Serialize)]
struct SweepOutput {
    manifest: RunManifest,
    result: pnorm::experiments::SweepResult,
}

fn cmd_sweep(a: SweepArgs, started: Instant) -> Result<i32, Box<dyn std::error::Error>> {
    let grid: Vec<PExponent> = match &a.grid {
        Some(s) => s
            .split(',')
            .map(|tok| tok.trim().parse::<PExponent>())
            .collect::<Result<_, _>>()?,
        None => default_sweep_grid(),
    };
    let cfg = OptimizerConfig::default()
        .with_seed(a.seed)
        .with_restarts(a.restarts);
    let result = sd_sweep(&grid, &cfg)?;

    let manifest = RunManifest::new("sweep", a.seed, started);
    match &a.out {
        Some(path) => {
            let file = File::create(path)?;
            result.write_csv(file)?;
            emit(&SweepOutput { manifest, result })?;
        }
        None => {
            let mut buf = Vec::new();
            result.write_csv(&mut buf)?;
            std::io::stdout().lock().write_all(&buf)?;
            // CSV owns stdout here; the manifest goes to stderr
            eprintln!("{}", serde_json::to_string(&manifest)?);
        }
    }
    Ok(0)
}
