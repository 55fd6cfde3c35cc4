//! The phase of the characteristic equation.
//!
//! For a simple loop `f = f1(1 − cos θ)` and `λ = f1(λ′)`,
//! `f(θ) − λ = ((1 − cos θ) − λ′)·H_{λ′}(θ)` with `H_{λ′} > 0`. With `P` the
//! degree-`N+1` predictor of `H_{λ′}` and `χ = e^{iθ₀}`, `θ₀ = arccos(1 − λ′)`,
//! `λ` is an eigenvalue of `T_N(f)` exactly when `χ^{2(N+2)} = τ_N` where
//! `τ_N = P(χ)² / P(χ̄)²`. Writing `τ_N = e^{iρ̃_N}` and `ρ_N = ρ̃_N/2`, this is
//! `(N+2)θ₀ = ρ_N + kπ`.
//!
//! `P` has real coefficients, so `τ_N = e^{4i·arg P(χ)}`; on the continuous
//! branch `ρ_N = 2·arg P(χ)`, which vanishes as `λ′ → 0⁺` because `P(1) > 0`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::predictor::{levinson, PredictorPolynomial};
use crate::symbols::{SimpleLoopSymbol, Symbol};
use crate::{fft, Error, Result};

/// Below this distance `|x − λ′|` the quotient defining `H` is replaced by
/// its Taylor expansion.
const SINGULAR_RADIUS: f64 = 1e-7;

pub const DEFAULT_SWEEP: usize = 512;

/// `χ_{λ′} = (1 − λ′) + i√(1 − (λ′ − 1)²)`.
pub fn chi(lambda_prime: f64) -> Complex64 {
    let re = 1.0 - lambda_prime;
    Complex64::new(re, (1.0 - re * re).max(0.0).sqrt())
}

/// Sampling grid for `H`: a power of two at least `max(16(N+2), 4096)`.
pub fn phase_grid_size(n: usize) -> usize {
    fft::next_pow2_at_least((16 * (n + 2)).max(4096))
}

#[derive(Debug, Clone, Serialize)]
pub struct HFactor {
    pub lambda_prime: f64,
    pub lambda: f64,
    pub theta0: f64,
    #[serde(skip)]
    pub samples: Vec<f64>,
    /// `Ĥ(0..grid/2)`.
    pub coeffs: Vec<f64>,
    pub min: f64,
}

impl HFactor {
    pub fn grid(&self) -> usize {
        self.samples.len()
    }

    /// `Ĥ(0..=N+1)`, the autocovariances behind the degree-`N+1` predictor.
    pub fn autocov(&self, n: usize) -> Result<&[f64]> {
        self.coeffs
            .get(..n + 2)
            .ok_or(Error::Truncation { available: self.coeffs.len() - 1, required: n + 1 })
    }

    pub fn predictor(&self, n: usize) -> Result<PredictorPolynomial> {
        levinson(self.autocov(n)?)
    }

    /// `max |((1 − cos θ) − λ′)·H(θ) − (f(θ) − λ)|` with `H` resynthesized
    /// from its Fourier coefficients.
    pub fn reconstruction_error(&self, f: &SimpleLoopSymbol) -> f64 {
        let m = self.grid();
        let h = fft::cosine_series_on_grid(&self.coeffs, m);
        let fv = f.sample(m);
        fft::grid(m)
            .zip(h.iter().zip(&fv))
            .map(|(t, (hv, fv))| (((1.0 - t.cos()) - self.lambda_prime) * hv - (fv - self.lambda)).abs())
            .fold(0.0, f64::max)
    }
}

fn check_lambda_prime(lambda_prime: f64) -> Result<()> {
    if !(lambda_prime > 0.0 && lambda_prime < 2.0) {
        return Err(Error::InvalidArgument(format!("λ′ = {lambda_prime} must lie in (0, 2)")));
    }
    Ok(())
}

/// Builds `H_{λ′}` on a uniform grid; `n` only fixes how many coefficients
/// the grid has to resolve.
pub fn h_factor(f: &SimpleLoopSymbol, lambda_prime: f64, grid: usize, n: usize) -> Result<HFactor> {
    let required = 2 * (n + 2) + 1;
    if grid < required {
        return Err(Error::GridTooCoarse { size: grid, required });
    }
    let f_grid = f.sample(grid);
    let x_grid: Vec<f64> = fft::grid(grid).map(|t| 1.0 - t.cos()).collect();
    h_factor_on(f, &f_grid, &x_grid, lambda_prime)
}

fn h_factor_on(f: &SimpleLoopSymbol, f_grid: &[f64], x_grid: &[f64], lambda_prime: f64) -> Result<HFactor> {
    check_lambda_prime(lambda_prime)?;
    let lambda = f.f1(lambda_prime);
    let d1 = f.df1(lambda_prime);
    let d2 = f.d2f1(lambda_prime);
    let samples: Vec<f64> = f_grid
        .iter()
        .zip(x_grid)
        .map(|(&fv, &x)| {
            let dx = x - lambda_prime;
            if dx.abs() < SINGULAR_RADIUS {
                d1 + 0.5 * d2 * dx
            } else {
                (fv - lambda) / dx
            }
        })
        .collect();
    let m = samples.len();
    let (imin, &min) = samples.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).expect("nonempty");
    if !(min > 0.0) {
        return Err(Error::NotPositive { min, theta: 2.0 * PI * imin as f64 / m as f64 });
    }
    let coeffs = fft::even_coefficients(&samples, m / 2 - 1);
    Ok(HFactor { lambda_prime, lambda, theta0: (1.0 - lambda_prime).acos(), samples, coeffs, min })
}

/// `τ = P(χ)²/P(χ̄)²` for a real-coefficient `P`, renormalized to modulus 1.
pub fn tau_from_predictor(p: &PredictorPolynomial, chi: Complex64) -> Result<Complex64> {
    let v = p.eval(chi);
    let scale = p.coeffs.iter().map(|c| c.abs()).sum::<f64>();
    if !(v.norm() > 1e-14 * scale) {
        return Err(Error::PredictorZero { re: chi.re, im: chi.im });
    }
    let t = (v / v.conj()).powi(2);
    Ok(t / t.norm())
}

pub fn tau_n(h: &HFactor, n: usize) -> Result<Complex64> {
    tau_from_predictor(&h.predictor(n)?, chi(h.lambda_prime))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PhaseSample {
    pub lambda_prime: f64,
    pub theta0: f64,
    #[serde(serialize_with = "complex_pair")]
    pub chi: Complex64,
    #[serde(serialize_with = "complex_pair")]
    pub tau: Complex64,
    /// Principal `arg τ_N ∈ (−π, π]`.
    pub rho_raw: f64,
    /// `ρ_N = ρ̃_N / 2` on the continuous branch.
    pub rho_n: f64,
}

fn complex_pair<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&z.re)?;
    t.serialize_element(&z.im)?;
    t.end()
}

impl PhaseSample {
    fn raw(lambda_prime: f64, tau: Complex64) -> Self {
        let rho_raw = tau.arg();
        Self {
            lambda_prime,
            theta0: (1.0 - lambda_prime).acos(),
            chi: chi(lambda_prime),
            tau,
            rho_raw,
            rho_n: rho_raw / 2.0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PhaseSweep {
    pub n: usize,
    pub samples: Vec<PhaseSample>,
    /// Indices where the principal value wrapped across ±π.
    pub wraps: Vec<usize>,
    pub max_abs_rho: f64,
}

fn wrap(a: f64) -> f64 {
    let r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// Nearest-branch unwrapping of `arg τ` along a sorted sweep, anchored at the
/// principal value of the first sample.
fn unwrap(samples: &mut [PhaseSample]) -> Result<Vec<usize>> {
    let mut wraps = Vec::new();
    let Some(first) = samples.first() else { return Ok(wraps) };
    let mut acc = first.rho_raw;
    for i in 1..samples.len() {
        let step = wrap(samples[i].rho_raw - samples[i - 1].rho_raw);
        if step.abs() >= PI / 2.0 {
            return Err(Error::UnwrapFailed { at: samples[i].lambda_prime, jump: step });
        }
        if (samples[i].rho_raw - samples[i - 1].rho_raw).abs() > PI {
            wraps.push(i);
        }
        acc += step;
        samples[i].rho_n = acc / 2.0;
    }
    samples[0].rho_n = samples[0].rho_raw / 2.0;
    Ok(wraps)
}

/// `ρ_N` along a sorted grid of `λ′ ∈ (0, 2)`.
pub fn rho_n(f: &SimpleLoopSymbol, n: usize, lambda_grid: &[f64]) -> Result<PhaseSweep> {
    if lambda_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidArgument("λ′ grid must be strictly increasing".into()));
    }
    let grid = phase_grid_size(n);
    let f_grid = f.sample(grid);
    let x_grid: Vec<f64> = fft::grid(grid).map(|t| 1.0 - t.cos()).collect();
    let mut samples = lambda_grid
        .par_iter()
        .map(|&lp| {
            let h = h_factor_on(f, &f_grid, &x_grid, lp)?;
            Ok(PhaseSample::raw(lp, tau_n(&h, n)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let wraps = unwrap(&mut samples)?;
    let max_abs_rho = samples.iter().map(|s| s.rho_n.abs()).fold(0.0, f64::max);
    Ok(PhaseSweep { n, samples, wraps, max_abs_rho })
}

/// `points` values of `λ′ = 1 − cos θ₀` with `θ₀` uniform in the open `(a, b)`.
pub fn theta_sweep(a: f64, b: f64, points: usize) -> Vec<f64> {
    (1..=points)
        .map(|i| 1.0 - (a + (b - a) * i as f64 / (points + 1) as f64).cos())
        .collect()
}

/// `ρ_N` evaluated anywhere on the branch fixed by a prior sweep.
pub struct PhaseEngine<'a> {
    f: &'a SimpleLoopSymbol,
    n: usize,
    f_grid: Vec<f64>,
    x_grid: Vec<f64>,
    sweep: PhaseSweep,
}

impl<'a> PhaseEngine<'a> {
    /// Sweep over all of `(0, π)`, anchored at `ρ_N(0⁺) = 0`.
    pub fn new(f: &'a SimpleLoopSymbol, n: usize) -> Result<Self> {
        Self::on_interval(f, n, 0.0, PI, DEFAULT_SWEEP)
    }

    /// Sweep over `θ₀ ∈ (a, b)`; the branch is anchored at the principal value
    /// at the left end.
    pub fn on_interval(f: &'a SimpleLoopSymbol, n: usize, a: f64, b: f64, points: usize) -> Result<Self> {
        let grid = phase_grid_size(n);
        let f_grid = f.sample(grid);
        let x_grid: Vec<f64> = fft::grid(grid).map(|t| 1.0 - t.cos()).collect();
        let sweep = rho_n(f, n, &theta_sweep(a, b, points.max(2)))?;
        Ok(Self { f, n, f_grid, x_grid, sweep })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn symbol(&self) -> &SimpleLoopSymbol {
        self.f
    }

    pub fn sweep(&self) -> &PhaseSweep {
        &self.sweep
    }

    /// `max |ρ_N|` seen along the sweep.
    pub fn m_cap(&self) -> f64 {
        self.sweep.max_abs_rho
    }

    pub fn theta_range(&self) -> (f64, f64) {
        let s = &self.sweep.samples;
        (s[0].theta0, s[s.len() - 1].theta0)
    }

    pub fn h_factor(&self, lambda_prime: f64) -> Result<HFactor> {
        h_factor_on(self.f, &self.f_grid, &self.x_grid, lambda_prime)
    }

    /// Linear interpolation of the swept branch in `θ₀`.
    fn reference(&self, theta0: f64) -> f64 {
        let s = &self.sweep.samples;
        let i = s.partition_point(|p| p.theta0 < theta0);
        if i == 0 {
            return s[0].rho_n;
        }
        if i == s.len() {
            return s[s.len() - 1].rho_n;
        }
        let (a, b) = (&s[i - 1], &s[i]);
        a.rho_n + (b.rho_n - a.rho_n) * (theta0 - a.theta0) / (b.theta0 - a.theta0)
    }

    pub fn sample(&self, lambda_prime: f64) -> Result<PhaseSample> {
        let h = self.h_factor(lambda_prime)?;
        let mut s = PhaseSample::raw(lambda_prime, tau_n(&h, self.n)?);
        let target = self.reference(s.theta0);
        let half = s.rho_raw / 2.0;
        s.rho_n = half + PI * ((target - half) / PI).round();
        Ok(s)
    }

    pub fn rho(&self, lambda_prime: f64) -> Result<f64> {
        Ok(self.sample(lambda_prime)?.rho_n)
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct RhoLimit {
    /// `ρ̃(λ′)/2`.
    pub value: f64,
    /// `Σ |L̂(k)|` over the upper half of the resolved coefficients.
    pub tail: f64,
    pub terms: usize,
}

pub fn rho_limit(f: &SimpleLoopSymbol, lambda_prime: f64) -> Result<RhoLimit> {
    rho_limit_with(f, lambda_prime, 1 << 16, 1e-8)
}

/// `ρ̃/2` with `ρ̃ = −4 Σ_{k≥1} L̂(k) sin(kθ₀)` and `L̂` the Fourier
/// coefficients of `ln H_{λ′}`.
pub fn rho_limit_with(f: &SimpleLoopSymbol, lambda_prime: f64, grid: usize, tolerance: f64) -> Result<RhoLimit> {
    let h = h_factor(f, lambda_prime, grid, 0)?;
    limit_from_log_coeffs(&log_coeffs(&h), h.theta0, tolerance)
}

fn log_coeffs(h: &HFactor) -> Vec<f64> {
    let logs: Vec<f64> = h.samples.iter().map(|v| v.ln()).collect();
    fft::even_coefficients(&logs, h.grid() / 2 - 1)
}

fn limit_from_log_coeffs(l: &[f64], theta0: f64, tolerance: f64) -> Result<RhoLimit> {
    let terms = l.len() - 1;
    let tail: f64 = l[terms / 2 + 1..].iter().map(|c| c.abs()).sum();
    if tail > tolerance {
        return Err(Error::TailTooLarge { tail, tolerance });
    }
    let sum: f64 = l.iter().enumerate().skip(1).map(|(k, c)| c * (k as f64 * theta0).sin()).sum();
    Ok(RhoLimit { value: -2.0 * sum, tail, terms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::FourierSymbol;

    fn loop1() -> SimpleLoopSymbol {
        SimpleLoopSymbol::from_fourier(FourierSymbol::new(vec![1.375, -0.75, 0.0625], 2.0).unwrap()).unwrap()
    }

    fn tridiag() -> SimpleLoopSymbol {
        SimpleLoopSymbol::from_fourier(FourierSymbol::new(vec![2.0, -1.0], 2.0).unwrap()).unwrap()
    }

    #[test]
    fn chi_on_circle() {
        for lp in [0.1, 1.0, 1.7] {
            let c = chi(lp);
            assert!((c.norm() - 1.0).abs() < 1e-15);
            assert!((c.re - (1.0 - lp)).abs() < 1e-15);
            assert!((c.im - (1.0 - (lp - 1.0) * (lp - 1.0)).sqrt()).abs() < 1e-15);
        }
        assert!((chi(1.0) - Complex64::i()).norm() < 1e-15);
    }

    #[test]
    fn linear_profile_gives_constant_factor() {
        let h = h_factor(&tridiag(), 0.7, 4096, 30).unwrap();
        // Samples next to θ₀ divide roundoff by |x − λ′|; the coefficients average it out.
        assert!(h.samples.iter().all(|v| (v - 2.0).abs() < 1e-8));
        assert!((h.coeffs[0] - 2.0).abs() < 1e-12 && h.coeffs[1..].iter().all(|c| c.abs() < 1e-12));
        assert!((tau_n(&h, 30).unwrap() - 1.0).norm() < 1e-12);
    }

    #[test]
    fn removable_singularity() {
        // λ′ = 1 puts θ₀ = π/2 exactly on a grid of size divisible by 4.
        let h = h_factor(&loop1(), 1.0, 4096, 8).unwrap();
        assert_eq!(h.samples[1024], 1.5);
        // H = 1.5 − 0.25 cos θ for this profile.
        assert!((h.coeffs[0] - 1.5).abs() < 1e-14 && (h.coeffs[1] + 0.125).abs() < 1e-14);
        assert!(h.coeffs[2..].iter().all(|c| c.abs() < 1e-14));
    }

    #[test]
    fn reconstruction() {
        let h = h_factor(&loop1(), 0.5, 4096, 8).unwrap();
        assert!(h.reconstruction_error(&loop1()) < 1e-10);
        assert!(h_factor(&loop1(), 0.0, 4096, 8).is_err());
        assert!(h_factor(&loop1(), 2.0, 4096, 8).is_err());
    }

    #[test]
    fn autoregressive_tau() {
        let ar: Vec<f64> = (0..40).map(|k| 4.0 / 3.0 * 0.5f64.powi(k)).collect();
        let p = levinson(&ar).unwrap();
        let tau = tau_from_predictor(&p, Complex64::i()).unwrap();
        let a = Complex64::new(1.0, -0.5);
        assert!((tau - (a / a.conj()).powi(2)).norm() < 1e-12);
        assert!((tau.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tridiagonal_phase_vanishes() {
        let sweep = rho_n(&tridiag(), 32, &theta_sweep(0.0, PI, 64)).unwrap();
        assert!(sweep.samples.iter().all(|s| s.rho_n.abs() < 1e-12 && (s.tau - 1.0).norm() < 1e-12));
    }

    #[test]
    fn sweep_branch_consistency() {
        let sweep = rho_n(&loop1(), 32, &theta_sweep(0.0, PI, 512)).unwrap();
        for s in &sweep.samples {
            assert!((Complex64::from_polar(1.0, 2.0 * s.rho_n) - s.tau).norm() < 1e-8);
            assert!((s.tau.norm() - 1.0).abs() < 1e-10);
        }
        assert!(sweep.samples[0].rho_n.abs() < 1e-2);
        assert!(rho_n(&loop1(), 32, &[0.5, 0.4]).is_err());
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let mut s = vec![
            PhaseSample::raw(0.1, Complex64::new(1.0, 0.0)),
            PhaseSample::raw(0.2, Complex64::from_polar(1.0, 2.0)),
        ];
        assert!(matches!(unwrap(&mut s), Err(Error::UnwrapFailed { .. })));
    }

    #[test]
    fn limit_for_moving_average() {
        // H = |1 − 0.5χ|²: L̂(k) = −0.5^k/k, so ρ̃(1) = 4·arctan(0.5).
        let l: Vec<f64> = (0..200).map(|k| if k == 0 { 0.0 } else { -0.5f64.powi(k) / k as f64 }).collect();
        let r = limit_from_log_coeffs(&l, PI / 2.0, 1e-12).unwrap();
        assert!((2.0 * r.value - 4.0 * 0.5f64.atan()).abs() < 1e-14);
        let psi = |z: Complex64| (1.0 - 0.5 * z).ln();
        let direct = psi(Complex64::from_polar(1.0, -PI / 2.0)).im - psi(Complex64::i()).im;
        assert!((2.0 * r.value - 2.0 * direct).abs() < 1e-14);
        assert!(limit_from_log_coeffs(&[0.0; 64], 1.0, 1e-12).unwrap().value == 0.0);
    }

    #[test]
    fn converges_to_limit() {
        let f = loop1();
        for lp in [0.5, 1.0, 1.5] {
            let limit = rho_limit(&f, lp).unwrap().value;
            let e64 = (PhaseEngine::new(&f, 64).unwrap().rho(lp).unwrap() - limit).abs();
            let e256 = (PhaseEngine::new(&f, 256).unwrap().rho(lp).unwrap() - limit).abs();
            assert!(e256 <= e64, "λ′={lp}: {e256} vs {e64}");
        }
    }
}
