//! Command-line front end.
//!
//! Every command builds a [`RunConfig`] (or reads one with `run --config`),
//! executes it, and writes a JSON report that embeds the config, the tool
//! version and a pass/fail line per checked invariant. Wall-clock timings go
//! to a separate sink so reports are byte-identical across runs.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success, all invariants hold |
//! | 1 | completed, but a gating invariant failed |
//! | 2 | invalid symbol, config or arguments |
//! | 3 | numerical failure; the report carries a diagnostic |

mod bench;
mod commands;
mod config;

use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

pub use bench::{random_vector, BenchRow, MIN_RUNS};
pub use commands::{execute, Invariant, Outcome};
pub use config::{CommandKind, Options, Output, RunConfig, SymbolSpec, TOLERANCES};

use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVARIANT: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

pub const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (", env!("TOEPLITZ_SPECTRA_GIT"), ")");
pub const THREADS_ENV: &str = "TOEPLITZ_SPECTRA_THREADS";

#[derive(Debug, Parser)]
#[command(name = "toeplitz-spectra", version = VERSION, about = "Eigenvalues of Hermitian Toeplitz matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub json: Option<PathBuf>,
    /// Write timings here instead of stderr.
    #[arg(long, global = true)]
    pub timing: Option<PathBuf>,
    /// Override a tolerance, e.g. `--tol dense=1e-9`.
    #[arg(long = "tol", global = true, value_parser = parse_tol)]
    pub tol: Vec<(String, f64)>,
    /// Seed for randomized test vectors.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct SymbolArgs {
    /// tridiag, loop1, ar1, one, halpha:α[:one|cos]
    #[arg(long)]
    pub preset: Option<String>,
    /// JSON symbol file.
    #[arg(long)]
    pub symbol: Option<PathBuf>,
}

impl SymbolArgs {
    fn spec(&self) -> SymbolSpec {
        match (&self.preset, &self.symbol) {
            (Some(p), _) => SymbolSpec::Preset(p.clone()),
            (None, Some(f)) => SymbolSpec::File(f.clone()),
            (None, None) => unreachable!("clap enforces one of the two"),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues from the characteristic equation.
    Spectrum {
        #[command(flatten)]
        sym: SymbolArgs,
        #[arg(long = "N")]
        n: usize,
        /// Compare with a dense eigendecomposition.
        #[arg(long)]
        dense_check: bool,
        /// Only eigenvalues with root angle in (θ₁, θ₂).
        #[arg(long, num_args = 2, value_names = ["THETA1", "THETA2"])]
        local: Option<Vec<f64>>,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        dump_matrix: Option<PathBuf>,
    },
    /// Phase function ρ_N against its N → ∞ limit.
    Phase {
        #[command(flatten)]
        sym: SymbolArgs,
        #[arg(long = "N")]
        n: usize,
        /// Number of θ₀ points.
        #[arg(long, default_value_t = 256)]
        grid: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Predictor polynomial of degree M.
    Predictor {
        #[command(flatten)]
        sym: SymbolArgs,
        #[arg(long = "M")]
        m: usize,
    },
    /// Fractional-Laplacian eigenvalue and mode matching.
    Fraclap {
        #[arg(long)]
        alpha: f64,
        #[arg(long = "N")]
        n: usize,
        #[arg(long)]
        kmin: Option<usize>,
        #[arg(long)]
        kmax: Option<usize>,
        /// Regular factor: one or cos (1 + 0.3cos θ).
        #[arg(long, default_value = "one")]
        c: String,
        /// Override the eigenvector threshold L′_α.
        #[arg(long)]
        l_prime: Option<f64>,
        #[arg(long)]
        modes: Option<PathBuf>,
    },
    /// N^{2α} T_N(h_α) applied to a bump against the P.V. integral.
    FraclapApply {
        #[arg(long)]
        alpha: f64,
        #[arg(long = "N")]
        n: usize,
        #[arg(long, required = true)]
        bump: bool,
        #[arg(long, default_value = "one")]
        c: String,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// (T_N(f) − λ)⁻¹ at the (1,1) entry by the closed formula.
    Invert {
        #[command(flatten)]
        sym: SymbolArgs,
        #[arg(long = "N")]
        n: usize,
        #[arg(long)]
        lambda_prime: f64,
    },
    /// Timing table; medians over repeated runs.
    Bench {
        #[command(flatten)]
        sym: SymbolArgs,
        #[arg(long = "N")]
        n: usize,
        #[arg(long, default_value_t = MIN_RUNS)]
        runs: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Execute a JSON run config.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or("expected NAME=VALUE")?;
    let v: f64 = v.parse().map_err(|e| format!("{e}"))?;
    Ok((k.to_string(), v))
}

impl Cli {
    pub fn into_config(self) -> crate::Result<RunConfig> {
        use Command::*;
        let mut cfg = match self.command {
            Run { config } => return RunConfig::from_file(&config),
            Spectrum { sym, n, dense_check, local, csv, dump_matrix } => {
                let mut c = RunConfig::new(CommandKind::Spectrum, n);
                c.symbol = Some(sym.spec());
                c.options.dense_check = dense_check;
                c.options.local = local.map(|v| (v[0], v[1]));
                c.options.dump_matrix = dump_matrix;
                c.output.csv = csv;
                c
            }
            Phase { sym, n, grid, csv } => {
                let mut c = RunConfig::new(CommandKind::Phase, n);
                c.symbol = Some(sym.spec());
                c.options.grid = Some(grid);
                c.output.csv = csv;
                c
            }
            Predictor { sym, m } => {
                let mut c = RunConfig::new(CommandKind::Predictor, m);
                c.symbol = Some(sym.spec());
                c
            }
            Fraclap { alpha, n, kmin, kmax, c: factor, l_prime, modes } => {
                let mut c = RunConfig::new(CommandKind::Fraclap, n);
                c.options = Options { alpha: Some(alpha), kmin, kmax, c: Some(factor), l_prime, ..Options::default() };
                c.output.csv = modes;
                c
            }
            FraclapApply { alpha, n, bump, c: factor, csv } => {
                let mut c = RunConfig::new(CommandKind::FraclapApply, n);
                c.options = Options { alpha: Some(alpha), bump, c: Some(factor), ..Options::default() };
                c.output.csv = csv;
                c
            }
            Invert { sym, n, lambda_prime } => {
                let mut c = RunConfig::new(CommandKind::Invert, n);
                c.symbol = Some(sym.spec());
                c.options.lambda_prime = Some(lambda_prime);
                c
            }
            Bench { sym, n, runs, csv } => {
                let mut c = RunConfig::new(CommandKind::Bench, n);
                c.symbol = Some(sym.spec());
                c.options.runs = Some(runs);
                c.output.csv = csv;
                c
            }
        };
        cfg.seed = self.common.seed;
        cfg.tolerances.extend(self.common.tol);
        cfg.output.json = self.common.json;
        cfg.output.timing = self.common.timing;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Serialize)]
pub struct Report<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: &'a RunConfig,
    pub passed: bool,
    pub invariants: &'a [Invariant],
    pub result: &'a Value,
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::InvalidArgument(_) => "invalid_argument",
        Error::GridTooCoarse { .. } => "grid_too_coarse",
        Error::NonFinite(_) => "non_finite",
        Error::NotPositive { .. } => "not_positive",
        Error::NotSimpleLoop(_) => "not_simple_loop",
        Error::NotPositiveDefinite { .. } => "not_positive_definite",
        Error::DimensionMismatch { .. } => "dimension_mismatch",
        Error::Truncation { .. } => "truncation",
        Error::DenseCapExceeded { .. } => "dense_cap_exceeded",
        Error::Singular { .. } => "singular",
        Error::PredictorZero { .. } => "predictor_zero",
        Error::NoSignChange { .. } => "no_sign_change",
        Error::UnwrapFailed { .. } => "unwrap_failed",
        Error::TailTooLarge { .. } => "tail_too_large",
        Error::NearEigenvalue { .. } => "near_eigenvalue",
        Error::SymbolMismatch(_) => "symbol_mismatch",
        Error::Support(_) => "support",
        Error::Aborted { .. } => "aborted",
        Error::Io(_) => "io",
        Error::Json(_) => "json",
    }
}

fn diagnostic(e: &Error) -> Value {
    match e {
        Error::NoSignChange { k, lo, hi, trace } => json!({ "k": k, "bracket": [lo, hi], "trace": trace }),
        Error::UnwrapFailed { at, jump } => json!({ "lambda_prime": at, "jump": jump }),
        Error::NearEigenvalue { distance } => json!({ "distance": distance }),
        Error::Aborted { source, partial } => json!({
            "source_kind": error_kind(source),
            "source": diagnostic(source),
            "partial": serde_json::to_value(partial.as_ref()).unwrap_or(Value::Null),
        }),
        Error::NotPositiveDefinite { order, coefficient } => json!({ "order": order, "reflection": coefficient }),
        Error::TailTooLarge { tail, tolerance } => json!({ "tail": tail, "tolerance": tolerance }),
        _ => Value::Null,
    }
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_INVALID
    }
}

fn emit(path: Option<&PathBuf>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = raw.parse().ok().filter(|&n| n > 0).ok_or_else(|| format!("{THREADS_ENV}={raw} is not a positive integer"))?;
    // A second initialization (e.g. in tests) is harmless.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Runs a parsed config, writing the report and any artifacts; returns the exit code.
pub fn run(cfg: &RunConfig) -> i32 {
    let outcome = execute(cfg);
    let (body, code) = match &outcome {
        Ok(o) => {
            let passed = o.invariants.iter().all(|i| i.pass || !i.gating);
            let report = Report { tool: "toeplitz-spectra", version: VERSION, config: cfg, passed, invariants: &o.invariants, result: &o.result };
            let code = if passed { EXIT_OK } else { EXIT_INVARIANT };
            (serde_json::to_string_pretty(&report).expect("report serializes"), code)
        }
        Err(e) => {
            let code = exit_code(e);
            let body = json!({
                "tool": "toeplitz-spectra",
                "version": VERSION,
                "config": cfg,
                "passed": false,
                "error": { "kind": error_kind(e), "message": e.to_string(), "exit_code": code, "diagnostic": diagnostic(e) },
            });
            eprintln!("error: {e}");
            (serde_json::to_string_pretty(&body).expect("diagnostic serializes"), code)
        }
    };
    if let Err(e) = emit(cfg.output.json.as_ref(), &(body + "\n")) {
        eprintln!("error: cannot write report: {e}");
        return EXIT_INVALID;
    }
    let Ok(o) = outcome else { return code };
    if let (Some(path), Some(csv)) = (&cfg.output.csv, &o.csv) {
        if let Err(e) = std::fs::write(path, csv) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return EXIT_INVALID;
        }
    }
    let timing = serde_json::to_string(&json!({ "timing": o.timing })).expect("timing serializes");
    match &cfg.output.timing {
        Some(p) => {
            if let Err(e) = std::fs::write(p, timing + "\n") {
                eprintln!("error: cannot write {}: {e}", p.display());
                return EXIT_INVALID;
            }
        }
        None => eprintln!("{timing}"),
    }
    code
}

/// Entry point for the binary.
pub fn main() -> i32 {
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return EXIT_INVALID;
    }
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    match cli.into_config() {
        Ok(cfg) => run(&cfg),
        Err(e) => {
            eprintln!("error: {e}");
            let body = json!({ "tool": "toeplitz-spectra", "version": VERSION, "passed": false,
                "error": { "kind": error_kind(&e), "message": e.to_string(), "exit_code": exit_code(&e) } });
            let _ = emit(None, &(serde_json::to_string_pretty(&body).expect("serializes") + "\n"));
            exit_code(&e)
        }
    }
}
