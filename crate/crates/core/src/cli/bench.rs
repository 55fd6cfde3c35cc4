//! Wall-clock comparison of the characteristic-equation solver, the dense
//! oracle and the two matvec paths. Nothing here gates correctness except the
//! naive/FFT agreement check.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::commands::{load_symbol, Invariant, Outcome};
use super::config::RunConfig;
use crate::eigensolve::Solver;
use crate::toeplitz::{dense_eigh_with_cap, DEFAULT_DENSE_CAP};
use crate::{Error, MatvecMode, Result, ToeplitzMatrix};

pub const MIN_RUNS: usize = 5;
const SAMPLED_EIGENVALUES: usize = 16;

#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub metric: String,
    pub median_s: f64,
    pub min_s: f64,
    pub max_s: f64,
    pub runs: usize,
}

fn row(metric: &str, mut samples: Vec<f64>) -> BenchRow {
    samples.sort_by(f64::total_cmp);
    let m = samples.len();
    let median_s = if m % 2 == 1 { samples[m / 2] } else { 0.5 * (samples[m / 2 - 1] + samples[m / 2]) };
    BenchRow { metric: metric.into(), median_s, min_s: samples[0], max_s: samples[m - 1], runs: m }
}

fn time<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let t0 = Instant::now();
    let out = f();
    (out, t0.elapsed().as_secs_f64())
}

pub fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

pub(super) fn bench(cfg: &RunConfig) -> Result<Outcome> {
    let runs = cfg.options.runs.unwrap_or(MIN_RUNS);
    if runs < MIN_RUNS {
        return Err(Error::InvalidArgument(format!("--runs must be at least {MIN_RUNS}")));
    }
    let n = cfg.n;
    let sym = load_symbol(cfg)?;
    let f = sym.as_loop()?;
    let t = ToeplitzMatrix::build(sym.as_symbol(), n)?;
    let stride = ((n + 1) / SAMPLED_EIGENVALUES).max(1);
    let ks: Vec<usize> = (1..=n + 1).step_by(stride).collect();

    let mut sweep = Vec::new();
    let mut per_eig = Vec::new();
    for _ in 0..runs {
        let (solver, s) = time(|| Solver::new(&f, n));
        let solver = solver?;
        sweep.push(s);
        let (res, s) = time(|| ks.iter().map(|&k| solver.solve(k, None)).collect::<Result<Vec<_>>>());
        res?;
        per_eig.push(s / ks.len() as f64);
    }
    let mut rows = vec![row("phase_sweep", sweep), row("char_eq_per_eigenvalue", per_eig)];
    if t.size() <= DEFAULT_DENSE_CAP {
        let mut dense = Vec::new();
        for _ in 0..runs {
            let (d, s) = time(|| dense_eigh_with_cap(&t, DEFAULT_DENSE_CAP, false));
            d?;
            dense.push(s);
        }
        rows.push(row("dense_total", dense));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let x = random_vector(&mut rng, t.size());
    let reps = (4_000_000 / (t.size() * t.size())).clamp(1, 1000);
    let mut naive = Vec::new();
    let mut fast = Vec::new();
    let mut max_dev: f64 = 0.0;
    for _ in 0..runs {
        let (a, s) = time(|| (0..reps).map(|_| t.matvec(&x, MatvecMode::Naive)).last().expect("reps ≥ 1"));
        naive.push(s / reps as f64);
        let (b, s) = time(|| (0..reps).map(|_| t.matvec(&x, MatvecMode::Fft)).last().expect("reps ≥ 1"));
        fast.push(s / reps as f64);
        let (a, b) = (a?, b?);
        let scale = a.iter().map(|v| v.abs()).fold(1.0, f64::max);
        max_dev = a.iter().zip(&b).map(|(p, q)| (p - q).abs() / scale).fold(max_dev, f64::max);
    }
    rows.push(row("matvec_naive", naive));
    rows.push(row("matvec_fft", fast));

    let mut csv = String::from("metric,median_s,min_s,max_s,runs\n");
    for r in &rows {
        let _ = writeln!(csv, "{},{:.6e},{:.6e},{:.6e},{}", r.metric, r.median_s, r.min_s, r.max_s, r.runs);
    }
    let timing: BTreeMap<String, f64> = rows.iter().map(|r| (r.metric.clone(), r.median_s)).collect();
    let result = serde_json::json!({
        "N": n,
        "runs": runs,
        "sampled_eigenvalues": ks.len(),
        "matvec_repetitions": reps,
        "matvec_max_rel_dev": max_dev,
        "table": rows,
    });
    let inv = vec![Invariant::at_most("matvec_agreement", max_dev, cfg.tol("matvec"))];
    Ok(Outcome { result, invariants: inv, csv: Some(csv), timing })
}
