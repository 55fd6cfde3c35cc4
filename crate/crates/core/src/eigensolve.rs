//! Eigenvalues of `T_N(f)` from the characteristic equation
//! `Ψ_k(λ′) = 1 − cos((ρ_N(λ′) + kπ)/(N+2)) − λ′ = 0`, one root per
//! `k = 1..=N+1`, and the closed form of `(T_N(f) − λ)⁻¹_{1,1}`.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::phase::{chi, phase_grid_size, tau_from_predictor, PhaseEngine, DEFAULT_SWEEP};
use crate::rootfind::{bisect, sign_scan};
use crate::symbols::{SimpleLoopSymbol, Symbol};
use crate::toeplitz::DenseSpectrum;
use crate::{Error, Result};

const SCAN_INTERVALS: usize = 64;

#[derive(Debug, Clone, Serialize)]
pub struct EigenRecord {
    pub k: usize,
    pub lambda_prime: f64,
    pub lambda: f64,
    /// `γ_N(k) = ρ_N(λ′)` at the root.
    pub gamma: f64,
    /// `|Ψ_k(λ′)|`.
    pub residual: f64,
    /// Search bracket in `λ′`.
    pub bracket: (f64, f64),
    pub iterations: usize,
    /// Sign changes found by the scan; more than one is flagged.
    pub sign_changes: usize,
    /// Whether `kπ/(N+2)` itself lies in the requested interval (local spectra).
    pub lattice_admissible: bool,
}

impl EigenRecord {
    pub fn theta(&self) -> f64 {
        (1.0 - self.lambda_prime).acos()
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Timing {
    pub sweep_s: f64,
    pub solve_s: f64,
    pub dense_s: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Bijection {
    pub records: usize,
    pub dense_in_interval: usize,
    pub max_gap: f64,
    pub one_to_one: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    #[serde(rename = "N")]
    pub n: usize,
    pub records: Vec<EigenRecord>,
    pub m_cap: f64,
    pub max_abs_gamma: f64,
    pub max_residual: f64,
    pub strictly_increasing: bool,
    /// Records whose scan found several sign changes.
    pub ties: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dense_comparison: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dense_max_dev: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bijection: Option<Bijection>,
    #[serde(skip)]
    pub timing: Timing,
}

impl SpectrumReport {
    fn new(n: usize, records: Vec<EigenRecord>, m_cap: f64) -> Self {
        let max_abs_gamma = records.iter().map(|r| r.gamma.abs()).fold(0.0, f64::max);
        let max_residual = records.iter().map(|r| r.residual).fold(0.0, f64::max);
        let strictly_increasing = records.windows(2).all(|w| w[0].lambda < w[1].lambda);
        let ties = records.iter().filter(|r| r.sign_changes > 1).map(|r| r.k).collect();
        Self {
            n,
            records,
            m_cap,
            max_abs_gamma,
            max_residual,
            strictly_increasing,
            ties,
            dense_comparison: None,
            dense_max_dev: None,
            bijection: None,
            timing: Timing::default(),
        }
    }

    /// Per-record `|λ − λ_dense|` against the dense eigenvalue of the same index.
    pub fn compare_dense(&mut self, dense: &DenseSpectrum) {
        let devs: Vec<f64> = self
            .records
            .iter()
            .map(|r| dense.eigenvalues.get(r.k - 1).map_or(f64::INFINITY, |d| (r.lambda - d).abs()))
            .collect();
        self.dense_max_dev = Some(devs.iter().copied().fold(0.0, f64::max));
        self.dense_comparison = Some(devs);
    }
}

/// Solves the characteristic equation for individual `k` on one shared phase
/// sweep.
pub struct Solver<'a> {
    engine: PhaseEngine<'a>,
    m_cap: f64,
}

impl<'a> Solver<'a> {
    pub fn new(f: &'a SimpleLoopSymbol, n: usize) -> Result<Self> {
        Ok(Self::from_engine(PhaseEngine::new(f, n)?))
    }

    pub fn from_engine(engine: PhaseEngine<'a>) -> Self {
        // Headroom over the swept maximum, which may miss the true peak.
        let m_cap = 1.1 * engine.m_cap() + 0.05;
        Self { engine, m_cap }
    }

    pub fn engine(&self) -> &PhaseEngine<'a> {
        &self.engine
    }

    pub fn m_cap(&self) -> f64 {
        self.m_cap
    }

    fn n(&self) -> usize {
        self.engine.n()
    }

    /// `[1 − cos((kπ − M)/(N+2)), 1 − cos((kπ + π + M)/(N+2))]`, clipped.
    pub fn default_bracket(&self, k: usize) -> (f64, f64) {
        let m = (self.n() + 2) as f64;
        let lo = ((k as f64 * PI - self.m_cap) / m).max(0.0);
        let hi = ((k as f64 * PI + PI + self.m_cap) / m).min(PI);
        let eps = f64::EPSILON;
        ((1.0 - lo.cos()).max(eps), (1.0 - hi.cos()).min(2.0 - eps))
    }

    pub fn psi(&self, k: usize, lambda_prime: f64) -> Result<(f64, f64)> {
        let rho = self.engine.rho(lambda_prime)?;
        let m = (self.n() + 2) as f64;
        Ok((1.0 - ((rho + k as f64 * PI) / m).cos() - lambda_prime, rho))
    }

    pub fn solve(&self, k: usize, bracket: Option<(f64, f64)>) -> Result<EigenRecord> {
        let n = self.n();
        if k < 1 || k > n + 1 {
            return Err(Error::InvalidArgument(format!("k = {k} outside 1..={}", n + 1)));
        }
        let (lo, hi) = bracket.unwrap_or_else(|| self.default_bracket(k));
        if !(lo > 0.0 && hi < 2.0 && lo < hi) {
            return Err(Error::InvalidArgument(format!("bracket ({lo}, {hi}) must lie inside (0, 2)")));
        }
        // Scan and bisect in θ₀ so that small λ′ keep full relative precision.
        let (tlo, thi) = ((1.0 - lo).acos(), (1.0 - hi).acos());
        let lp = |t: f64| 1.0 - t.cos();
        let failure = RefCell::new(None);
        let eval = |t: f64| match self.psi(k, lp(t)) {
            Ok((v, _)) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        };
        let (brackets, trace) = sign_scan(eval, tlo, thi, SCAN_INTERVALS);
        if let Some(e) = failure.take() {
            return Err(e);
        }
        if brackets.is_empty() {
            return Err(Error::NoSignChange {
                k,
                lo,
                hi,
                trace: trace.into_iter().map(|(t, v)| (lp(t), v)).collect(),
            });
        }
        let mut best: Option<EigenRecord> = None;
        for &(a, b) in &brackets {
            let Some(root) = bisect(eval, a, b, 0.0) else { continue };
            if let Some(e) = failure.take() {
                return Err(e);
            }
            let lambda_prime = lp(root.x);
            let (residual, gamma) = self.psi(k, lambda_prime)?;
            let rec = EigenRecord {
                k,
                lambda_prime,
                lambda: self.engine.symbol().f1(lambda_prime),
                gamma,
                residual: residual.abs(),
                bracket: (lo, hi),
                iterations: root.iterations,
                sign_changes: brackets.len(),
                lattice_admissible: true,
            };
            if best.as_ref().is_none_or(|b| rec.gamma.abs() < b.gamma.abs()) {
                best = Some(rec);
            }
        }
        best.ok_or(Error::NoSignChange { k, lo, hi, trace: Vec::new() })
    }
}

/// One eigenvalue of `T_N(f)`. Builds its own phase sweep; use [`Solver`] to
/// share one across many `k`.
pub fn solve_k(f: &SimpleLoopSymbol, n: usize, k: usize, bracket: Option<(f64, f64)>) -> Result<EigenRecord> {
    Solver::new(f, n)?.solve(k, bracket)
}

/// All `N + 1` eigenvalues, solved concurrently after one shared sweep.
pub fn full_spectrum(f: &SimpleLoopSymbol, n: usize) -> Result<SpectrumReport> {
    let t0 = Instant::now();
    let solver = Solver::new(f, n)?;
    let sweep_s = t0.elapsed().as_secs_f64();
    let t1 = Instant::now();
    let results: Vec<Result<EigenRecord>> = (1..=n + 1).into_par_iter().map(|k| solver.solve(k, None)).collect();
    let solve_s = t1.elapsed().as_secs_f64();
    let mut records = Vec::with_capacity(n + 1);
    let mut failure = None;
    for r in results {
        match r {
            Ok(rec) => records.push(rec),
            Err(e) => {
                failure.get_or_insert(e);
            }
        }
    }
    let mut report = SpectrumReport::new(n, records, solver.m_cap());
    report.timing = Timing { sweep_s, solve_s, dense_s: 0.0 };
    match failure {
        Some(source) => Err(Error::Aborted { source: Box::new(source), partial: Box::new(report) }),
        None => Ok(report),
    }
}

/// Eigenvalues of `T_N(f)` whose root angle lies in `(θ₁, θ₂)`.
///
/// `f` only has to be increasing on `[θ₁, θ₂]` (and `f − λ` must change
/// sign only there); the phase is swept on a neighbourhood of the interval
/// and anchored at its left end. Records are produced for every `k` whose
/// root falls inside the interval; `lattice_admissible` marks those with
/// `kπ/(N+2) ∈ (θ₁, θ₂)`. When `dense` is given, the records are paired with
/// the dense eigenvalues in `(f(θ₁), f(θ₂))`.
pub fn local_spectrum(
    f: &SimpleLoopSymbol,
    n: usize,
    theta1: f64,
    theta2: f64,
    dense: Option<&DenseSpectrum>,
) -> Result<SpectrumReport> {
    if !(theta1 > 0.0 && theta1 < theta2 && theta2 <= PI) {
        return Err(Error::InvalidArgument(format!("need 0 < θ₁ < θ₂ ≤ π, got ({theta1}, {theta2})")));
    }
    f.check_monotone(theta1, theta2)?;
    let m = (n + 2) as f64;
    let lattice: Vec<usize> = (1..=n + 1)
        .filter(|&k| {
            let t = k as f64 * PI / m;
            t > theta1 && t < theta2
        })
        .collect();
    let (Some(&kmin), Some(&kmax)) = (lattice.first(), lattice.last()) else {
        return Ok(SpectrumReport::new(n, Vec::new(), 0.0));
    };

    let t0 = Instant::now();
    let margin = (4.0 * PI / m).min(theta1 / 2.0);
    let engine = PhaseEngine::on_interval(f, n, theta1 - margin, (theta2 + margin).min(PI), DEFAULT_SWEEP)?;
    let (sweep_lo, sweep_hi) = engine.theta_range();
    let solver = Solver::from_engine(engine);
    let sweep_s = t0.elapsed().as_secs_f64();

    let extra = (solver.m_cap() / PI).ceil() as usize + 1;
    let candidates: Vec<usize> = (kmin.saturating_sub(extra).max(1)..=(kmax + extra).min(n + 1)).collect();
    let t1 = Instant::now();
    let results: Vec<(usize, Result<EigenRecord>)> = candidates
        .par_iter()
        .map(|&k| {
            let (lo, hi) = solver.default_bracket(k);
            let lo = lo.max(1.0 - sweep_lo.cos());
            let hi = hi.min(1.0 - sweep_hi.cos());
            let r = if lo < hi {
                solver.solve(k, Some((lo, hi)))
            } else {
                Err(Error::NoSignChange { k, lo, hi, trace: Vec::new() })
            };
            (k, r)
        })
        .collect();
    let solve_s = t1.elapsed().as_secs_f64();

    let mut records = Vec::new();
    for (k, r) in results {
        let admissible = lattice.binary_search(&k).is_ok();
        match r {
            Ok(mut rec) => {
                let t = rec.theta();
                rec.lattice_admissible = admissible;
                if t > theta1 && t < theta2 {
                    records.push(rec);
                }
            }
            Err(Error::NoSignChange { .. }) if !admissible => {}
            Err(e) => return Err(e),
        }
    }
    records.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    let mut report = SpectrumReport::new(n, records, solver.m_cap());
    report.timing = Timing { sweep_s, solve_s, dense_s: 0.0 };
    if let Some(d) = dense {
        let (a, b) = (f.value(theta1), f.value(theta2));
        let inside: Vec<f64> = d.eigenvalues.iter().copied().filter(|&v| v > a && v < b).collect();
        let max_gap = if inside.len() == report.records.len() {
            inside.iter().zip(&report.records).map(|(v, r)| (v - r.lambda).abs()).fold(0.0, f64::max)
        } else {
            f64::INFINITY
        };
        report.bijection = Some(Bijection {
            records: report.records.len(),
            dense_in_interval: inside.len(),
            max_gap,
            one_to_one: max_gap <= 1e-5,
        });
    }
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct DenseGamma {
    pub gamma: Vec<f64>,
    /// Indices whose eigenvalue fell outside `[min f, max f]` and was clamped.
    pub clamped: Vec<usize>,
}

/// `γ_N(k) = (N+2)·θ(λ_k) − kπ` with `θ(λ) = arccos(1 − f1⁻¹(λ))`.
pub fn gamma_from_dense(f: &SimpleLoopSymbol, n: usize, dense: &DenseSpectrum) -> Result<DenseGamma> {
    if dense.eigenvalues.len() != n + 1 {
        return Err(Error::DimensionMismatch { expected: n + 1, got: dense.eigenvalues.len() });
    }
    let (lo, hi) = f.range();
    let mut clamped = Vec::new();
    let gamma = dense
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(i, &l)| {
            if l < lo || l > hi {
                clamped.push(i);
            }
            let lp = f.f1_inverse(l.clamp(lo, hi))?;
            Ok((n + 2) as f64 * (1.0 - lp).acos() - (i + 1) as f64 * PI)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DenseGamma { gamma, clamped })
}

#[derive(Debug, Clone, Serialize)]
pub struct InverseEntry {
    pub value: f64,
    /// Imaginary part left over after assembling the complex formula.
    pub imag_residual: f64,
    #[serde(serialize_with = "pair")]
    pub b1: Complex64,
    #[serde(serialize_with = "pair")]
    pub b2: Complex64,
    /// `χ̄₀^{2(N+2)} τ_N(χ₀)`; the formula has a pole where this equals 1.
    #[serde(serialize_with = "pair")]
    pub x: Complex64,
    #[serde(serialize_with = "pair")]
    pub tau: Complex64,
}

fn pair<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&z.re)?;
    t.serialize_element(&z.im)?;
    t.end()
}

/// `(T_N(f) − λI)⁻¹_{1,1}` for `λ = f1(λ′)`:
///
/// `((1 − X) B₂ − B₁) / (1 − X)` with `X = χ̄₀^{2(N+2)} τ_N`,
/// `B₂ = 2 χ₀ P(0)²` and `B₁ = B₂ (1 − χ̄₀²)`, where `P` is the degree-`N+1`
/// predictor of `H_{λ′}`.
///
/// The factor 2 comes from `(1 − cos θ) − λ′ = ½ χ₀ (1 − χ̄₀χ)(1 − χ̄₀χ̄)`.
pub fn invert_entry_11(f: &SimpleLoopSymbol, n: usize, lambda_prime: f64) -> Result<InverseEntry> {
    let h = crate::phase::h_factor(f, lambda_prime, phase_grid_size(n), n)?;
    let p = h.predictor(n)?;
    let c = chi(lambda_prime);
    let tau = tau_from_predictor(&p, c)?;
    let x = c.conj().powu(2 * (n as u32 + 2)) * tau;
    let distance = (1.0 - x).norm();
    if distance < 1e-10 {
        return Err(Error::NearEigenvalue { distance });
    }
    let b2 = 2.0 * c * p.coeffs[0] * p.coeffs[0];
    let b1 = b2 * (1.0 - c.conj() * c.conj());
    let v = ((1.0 - x) * b2 - b1) / (1.0 - x);
    Ok(InverseEntry { value: v.re, imag_residual: v.im, b1, b2, x, tau })
}
