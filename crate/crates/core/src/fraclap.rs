//! Fractional-Laplacian asymptotics for `T_N(h_α)`.
//!
//! Small eigenvalues of `T_N(|1 − e^{iθ}|^{2α} c)` behave like
//! `c(0)·(kπ/N − (1−α)π/(2N))^{2α}`, and the matching eigenvectors are
//! sampled shifted sines and cosines. This module evaluates the constants,
//! the approximations and their explicit bounds, matches them against a
//! dense eigendecomposition, and checks that `N^{2α} T_N(h_α)` applied to a
//! grid function converges to `c(0)(−Δ)^α` on `(0, 1)`.

use std::f64::consts::PI;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::Serialize;
use statrs::function::gamma::gamma;

use crate::quadrature::{integrate_piecewise, Estimate};
use crate::symbols::{halpha_coeffs, halpha_constant, halpha_constant_printed, FourierSymbol, SingularSymbol};
use crate::toeplitz::{dense_eigh_with_cap, DenseSpectrum, DEFAULT_DENSE_CAP};
use crate::{Error, MatvecMode, Result, ToeplitzMatrix};

/// Core radius of the principal-value oracle.
pub const PV_CORE: f64 = 1e-4;

#[derive(Debug, Clone, Serialize)]
pub struct FracConstants {
    pub alpha: f64,
    /// Normalizing constant of `(−Δ)^α`, equal to the tail constant of `ĥ_α`.
    pub c_alpha: f64,
    /// Same expression with `|Γ(α)|` in place of `|Γ(−α)|`; reported only.
    pub c_alpha_printed: f64,
    pub c0: f64,
    pub c1: f64,
    /// `C(α)`; the `N^{−α}` term is included only when `n` is set.
    pub c_of_alpha: f64,
    pub n: Option<usize>,
    /// The larger of the two readings below.
    pub l_alpha: f64,
    /// `(C·(2α)^{−3/2})^{1/(2α)}` and `((C·2α)^{−3/2})^{1/(2α)}`.
    pub l_alpha_readings: [f64; 2],
    pub l_prime_alpha: f64,
}

fn validate_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) || alpha == 0.5 {
        return Err(Error::InvalidArgument(format!("α = {alpha} must lie in (0, 1) and differ from 1/2")));
    }
    Ok(())
}

/// Constants with `C(α)` taken in the `N → ∞` limit.
pub fn constants(alpha: f64) -> Result<FracConstants> {
    build_constants(alpha, None)
}

/// Constants with the finite-`N` term of `C(α)` kept.
pub fn constants_at(alpha: f64, n: usize) -> Result<FracConstants> {
    if n < 1 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    build_constants(alpha, Some(n))
}

fn build_constants(alpha: f64, n: Option<usize>) -> Result<FracConstants> {
    validate_alpha(alpha)?;
    let a = alpha;
    let c0 = 1.5f64.powf(3.0 + 2.0 * a) + 0.75f64.powf(3.0 + 2.0 * a);
    let c1 = (4.0 / PI).powf(-2.0 * a) * c0 * (5.0 / 3.0 + 2f64.powf(1.0 - 2.0 * a) + (1.0 - a) / a);
    let finite = n.map_or(0.0, |n| (n as f64).powf(-a) * c1 * 2.0 * a * gamma(2.0 * a) / PI);
    let c = 4.0 / PI * (a + 2.0 * a.sqrt() / PI * c0 + finite + a * PI / 16.0 * 3f64.powf(a + 2.0) + a);
    let e = 1.0 / (2.0 * a);
    let l_alpha_readings = [(c * (2.0 * a).powf(-1.5)).powf(e), (c * 2.0 * a).powf(-1.5).powf(e)];
    let l_alpha = l_alpha_readings[0].max(l_alpha_readings[1]);
    let kk = 5.0 / 8.0 * PI.powf(2.0 * a - 1.0);
    let proof = (c * 2f64.powf(2.0 * a + 2.0) * a.powf(-1.5) / (kk * PI)).powf(e);
    Ok(FracConstants {
        alpha,
        c_alpha: halpha_constant(alpha),
        c_alpha_printed: halpha_constant_printed(alpha),
        c0,
        c1,
        c_of_alpha: c,
        n,
        l_alpha,
        l_alpha_readings,
        l_prime_alpha: l_alpha.max(proof),
    })
}

impl FracConstants {
    /// Override the eigenvector threshold `L′_α`.
    pub fn with_l_prime(mut self, l_prime: f64) -> Self {
        self.l_prime_alpha = l_prime;
        self
    }

    /// `2^{2α+1} C(α)(1−α)/(√α k) · N^{−2α}`.
    pub fn bound(&self, k: usize, n: usize) -> f64 {
        let a = self.alpha;
        2f64.powf(2.0 * a + 1.0) * self.c_of_alpha * (1.0 - a) / (a.sqrt() * k as f64) * (n as f64).powf(-2.0 * a)
    }

    /// The alternative arrangement `C(α)(2−2α)/(√(2α) k) · N^{−2α}`.
    pub fn bound_variant(&self, k: usize, n: usize) -> f64 {
        let a = self.alpha;
        self.c_of_alpha * (2.0 - 2.0 * a) / ((2.0 * a).sqrt() * k as f64) * (n as f64).powf(-2.0 * a)
    }
}

/// `μ_k = kπ/2 − (1−α)π/4`.
pub fn mu(alpha: f64, k: usize) -> f64 {
    k as f64 * PI / 2.0 - (1.0 - alpha) * PI / 4.0
}

/// `μ̃_k = 2^{2α} μ_k^{2α}`.
pub fn mu_tilde(alpha: f64, k: usize) -> f64 {
    2f64.powf(2.0 * alpha) * mu(alpha, k).powf(2.0 * alpha)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EigApprox {
    pub approx: f64,
    pub bound: f64,
    /// `k < L_α`: the bound is not guaranteed there.
    pub below_threshold: bool,
}

/// `c0·(kπ/N − (1−α)π/(2N))^{2α}` and its error bound.
pub fn eig_approx(consts: &FracConstants, c0: f64, n: usize, k: usize) -> Result<EigApprox> {
    let a = consts.alpha;
    if k < 1 || n < 1 || k as f64 >= n as f64 {
        return Err(Error::InvalidArgument(format!("need 1 ≤ k < N, got k = {k}, N = {n}")));
    }
    let nf = n as f64;
    let approx = (k as f64 * PI / nf - (1.0 - a) * PI / (2.0 * nf)).powf(2.0 * a) * c0;
    Ok(EigApprox { approx, bound: consts.bound(k, n), below_threshold: (k as f64) < consts.l_alpha })
}

/// `φ*_k(x)`: by `k mod 4`, `−sin`, `−cos`, `+sin`, `+cos` of `μ_k(1 − 2x)`.
pub fn phi_star(alpha: f64, k: usize, x: f64) -> f64 {
    let arg = mu(alpha, k) * (1.0 - 2.0 * x);
    match k % 4 {
        0 => -arg.sin(),
        1 => -arg.cos(),
        2 => arg.sin(),
        _ => arg.cos(),
    }
}

#[derive(Debug, Clone)]
pub struct ModeVector {
    /// `(Z)_{m+1} = φ*_k(m/N)·c0/√N`, `m = 0..=N`.
    pub raw: Vec<f64>,
    pub normalized: Vec<f64>,
}

pub fn mode_vector(alpha: f64, c0: f64, n: usize, k: usize) -> ModeVector {
    let scale = c0 / (n as f64).sqrt();
    let raw: Vec<f64> = (0..=n).map(|m| phi_star(alpha, k, m as f64 / n as f64) * scale).collect();
    let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
    let normalized = raw.iter().map(|v| v / norm).collect();
    ModeVector { raw, normalized }
}

#[derive(Debug, Clone, Serialize)]
pub struct FracMode {
    pub k: usize,
    pub mu_k: f64,
    pub mu_tilde_k: f64,
    pub approx_eig: f64,
    pub bound: f64,
    pub bound_variant: f64,
    #[serde(skip)]
    pub mode_vector: Vec<f64>,
    pub matched_dense_index: Option<usize>,
    pub matched_lambda: Option<f64>,
    pub eig_gap: Option<f64>,
    /// `|⟨Ẑ, y⟩|` for unit `Ẑ` and the matched unit eigenvector `y`.
    pub overlap: Option<f64>,
    pub within_bound: Option<bool>,
    pub below_l_prime: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct MatchReport {
    pub alpha: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub c0: f64,
    pub constants: FracConstants,
    pub modes: Vec<FracMode>,
    /// `(k₁, k₂, dense index)` for modes matched to the same eigenvalue.
    pub collisions: Vec<(usize, usize, usize)>,
    pub warnings: Vec<String>,
}

/// Dense eigendecomposition of `T_N(h_α)` followed by [`match_modes_with`].
pub fn match_modes(alpha: f64, c: FourierSymbol, n: usize, ks: RangeInclusive<usize>) -> Result<MatchReport> {
    let sym = halpha_coeffs(alpha, c, n)?;
    let t = ToeplitzMatrix::build(&sym, n)?;
    let dense = dense_eigh_with_cap(&t, DEFAULT_DENSE_CAP, true)?;
    match_modes_with(&constants(alpha)?, &sym, n, ks, &dense)
}

/// Nearest-eigenvalue matching; eigenvector overlaps need `dense` to carry
/// vectors.
pub fn match_modes_with(
    consts: &FracConstants,
    sym: &SingularSymbol,
    n: usize,
    ks: RangeInclusive<usize>,
    dense: &DenseSpectrum,
) -> Result<MatchReport> {
    if dense.eigenvalues.len() != n + 1 {
        return Err(Error::DimensionMismatch { expected: n + 1, got: dense.eigenvalues.len() });
    }
    if *ks.start() < 1 || *ks.end() > n + 1 {
        return Err(Error::InvalidArgument(format!("k range {ks:?} must lie in [1, N+1]")));
    }
    let alpha = sym.alpha();
    let c0 = sym.c().at_zero();
    let mut warnings = Vec::new();
    let threshold = consts.l_prime_alpha.ceil() as usize;
    if *ks.start() < threshold {
        warnings.push(format!(
            "k < {threshold} (L′_α = {:.3}): the theorem does not cover these modes",
            consts.l_prime_alpha
        ));
    }
    let modes: Vec<FracMode> = ks
        .into_par_iter()
        .map(|k| {
            let approx = eig_approx(consts, c0, n, k)?;
            let z = mode_vector(alpha, c0, n, k);
            let idx = dense.nearest(approx.approx);
            let lambda = dense.eigenvalues[idx];
            let gap = (lambda - approx.approx).abs();
            let overlap = dense.eigenvectors.as_ref().map(|v| {
                v[idx].iter().zip(&z.normalized).map(|(a, b)| a * b).sum::<f64>().abs()
            });
            Ok(FracMode {
                k,
                mu_k: mu(alpha, k),
                mu_tilde_k: mu_tilde(alpha, k),
                approx_eig: approx.approx,
                bound: approx.bound,
                bound_variant: consts.bound_variant(k, n),
                mode_vector: z.raw,
                matched_dense_index: Some(idx),
                matched_lambda: Some(lambda),
                eig_gap: Some(gap),
                overlap,
                within_bound: Some(gap <= approx.bound),
                below_l_prime: (k as f64) < consts.l_prime_alpha,
            })
        })
        .collect::<Result<_>>()?;
    let mut collisions = Vec::new();
    for (i, a) in modes.iter().enumerate() {
        for b in &modes[i + 1..] {
            if a.matched_dense_index == b.matched_dense_index {
                collisions.push((a.k, b.k, a.matched_dense_index.unwrap_or_default()));
            }
        }
    }
    if !collisions.is_empty() {
        warnings.push(format!("{} pairs of modes share a dense eigenvalue", collisions.len()));
    }
    Ok(MatchReport { alpha, n, c0, constants: consts.clone(), modes, collisions, warnings })
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let m = logs.len() as f64;
    let (sx, sy) = logs.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let (num, den) = logs
        .iter()
        .fold((0.0, 0.0), |(n, d), &(x, y)| (n + (x - mx) * (y - my), d + (x - mx).powi(2)));
    num / den
}

/// Smooth bump `exp(−1/(1 − s²))`, `s = (x − 0.5)/0.3`, supported in `[0.2, 0.8]`.
pub fn bump(x: f64) -> f64 {
    let s = (x - 0.5) / 0.3;
    if s.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - s * s)).exp()
    }
}

fn check_support<F: Fn(f64) -> f64>(f: &F, n: usize) -> Result<()> {
    let outside = |x: f64| !(0.1..=0.9).contains(&x);
    let grid = (0..=n).map(|m| m as f64 / n as f64);
    let fine = (0..=4000).map(|m| m as f64 / 4000.0);
    for x in grid.chain(fine).filter(|&x| outside(x)) {
        let v = f(x);
        if !v.is_finite() || v.abs() >= 1e-14 {
            return Err(Error::Support(format!("f({x}) = {v:e} outside [0.1, 0.9]")));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct ApplyRow {
    pub x: f64,
    pub discrete: f64,
    pub oracle: f64,
    pub abs_err: f64,
}

/// `x_m ↦ N^{2α}(T_N(h_α) f(·/N))_m` for the grid points `x_m = m/N` in `[0.2, 0.8]`.
pub fn discrete_fraclap_apply<F: Fn(f64) -> f64>(sym: &SingularSymbol, n: usize, f: F) -> Result<Vec<(f64, f64)>> {
    check_support(&f, n)?;
    let sym = if sym.order() < n { sym.with_order(n) } else { sym.clone() };
    let t = ToeplitzMatrix::build(&sym, n)?;
    let grid: Vec<f64> = (0..=n).map(|m| f(m as f64 / n as f64)).collect();
    let tf = t.matvec(&grid, MatvecMode::Fft)?;
    let scale = (n as f64).powf(2.0 * sym.alpha());
    Ok((0..=n)
        .filter_map(|m| {
            let x = m as f64 / n as f64;
            (0.2..=0.8).contains(&x).then(|| (x, scale * tf[m]))
        })
        .collect())
}

/// `C_α P.V.∫ (f(x) − f(y))/|x − y|^{1+2α} dy` for `f` supported in `(0, 1)`.
///
/// Folding the integral at `y = x` gives `∫_0^∞ (2f(x) − f(x+t) − f(x−t)) t^{−1−2α} dt`.
/// On `t > 1` only `2f(x)` survives and integrates in closed form; on
/// `t < ε` the integrand is `−f″(x) t^{1−2α}` to leading order.
pub fn fraclap_pv_oracle<F: Fn(f64) -> f64>(alpha: f64, f: &F, x: f64) -> Result<Estimate> {
    pv_oracle_with_core(alpha, f, x, PV_CORE)
}

pub fn pv_oracle_with_core<F: Fn(f64) -> f64>(alpha: f64, f: &F, x: f64, eps: f64) -> Result<Estimate> {
    validate_alpha(alpha)?;
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::InvalidArgument(format!("x = {x} must lie in (0, 1)")));
    }
    let fx = f(x);
    let d = 1e-9;
    let (l, r) = (f(x - d), f(x + d));
    if !fx.is_finite() || (l - fx).abs().max((r - fx).abs()) > 1e-6 * (1.0 + fx.abs()) {
        return Err(Error::Support(format!("f is not continuous at x = {x}")));
    }
    let a2 = 2.0 * alpha;
    let h = eps.max(1e-4);
    let f2 = (f(x + h) - 2.0 * fx + f(x - h)) / (h * h);
    let core = -f2 * eps.powf(2.0 - a2) / (2.0 - a2);
    let tail = 2.0 * fx / a2;
    let g = |t: f64| (2.0 * fx - f(x + t) - f(x - t)) * t.powf(-1.0 - a2);
    let mut breaks = vec![eps];
    breaks.extend([1e-3, 1e-2, 0.1, x, 1.0 - x].into_iter().filter(|&b| b > eps && b < 1.0));
    breaks.push(1.0);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let body = integrate_piecewise(g, &breaks, 1e-12, 1e-12);
    let c = halpha_constant(alpha);
    Ok(Estimate { value: c * (core + body.value + tail), error: c * body.error })
}

#[derive(Debug, Clone, Serialize)]
pub struct ApplyReport {
    pub alpha: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub c0: f64,
    pub rows: Vec<ApplyRow>,
    pub sup_error: f64,
}

/// Discrete operator against `c(0)` times the P.V. oracle on every grid point.
pub fn compare_with_oracle<F: Fn(f64) -> f64 + Sync>(sym: &SingularSymbol, n: usize, f: F) -> Result<ApplyReport> {
    let discrete = discrete_fraclap_apply(sym, n, &f)?;
    let c0 = sym.c().at_zero();
    let rows: Vec<ApplyRow> = discrete
        .into_par_iter()
        .map(|(x, v)| {
            let oracle = c0 * fraclap_pv_oracle(sym.alpha(), &f, x)?.value;
            Ok(ApplyRow { x, discrete: v, oracle, abs_err: (v - oracle).abs() })
        })
        .collect::<Result<_>>()?;
    let sup_error = rows.iter().map(|r| r.abs_err).fold(0.0, f64::max);
    Ok(ApplyReport { alpha: sym.alpha(), n, c0, rows, sup_error })
}

/// C¹ cutoff rising from 0 at `t = −1/3` to 1 at `t = 1/3`.
pub fn cutoff_q(t: f64) -> f64 {
    const THIRD: f64 = 1.0 / 3.0;
    if t <= -THIRD {
        0.0
    } else if t <= 0.0 {
        4.5 * (t + THIRD).powi(2)
    } else if t < THIRD {
        1.0 - 4.5 * (t - THIRD).powi(2)
    } else {
        1.0
    }
}

pub fn cutoff_q_derivative(t: f64) -> f64 {
    const THIRD: f64 = 1.0 / 3.0;
    if t <= -THIRD || t >= THIRD {
        0.0
    } else if t <= 0.0 {
        9.0 * (t + THIRD)
    } else {
        -9.0 * (t - THIRD)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate;

    #[test]
    fn constants_examples() {
        let c = constants(0.75).unwrap();
        assert!((c.c0 - (1.5f64.powf(4.5) + 0.75f64.powf(4.5))).abs() < 1e-12);
        let q = constants(0.25).unwrap();
        // |Γ(−1/4)| = 4Γ(3/4).
        let expect = 2f64.sqrt() * gamma(0.75) / (PI.sqrt() * 4.0 * gamma(0.75));
        assert!((q.c_alpha - expect).abs() < 1e-12);
        let printed = 2f64.sqrt() * gamma(0.75) / (PI.sqrt() * gamma(0.25));
        assert!((q.c_alpha_printed - printed).abs() < 1e-12);
        for r in c.l_alpha_readings {
            assert!(r.is_finite() && r > 0.0);
        }
        assert!(c.l_prime_alpha >= c.l_alpha);
        assert!(constants(0.5).is_err() && constants(1.0).is_err());
        let finite = constants_at(0.75, 100).unwrap();
        assert!(finite.c_of_alpha > c.c_of_alpha);
        let far = constants_at(0.75, 1 << 40).unwrap();
        assert!((far.c_of_alpha - c.c_of_alpha).abs() < 1e-6 * c.c_of_alpha);
    }

    #[test]
    fn approximation_identities() {
        let c = constants(0.75).unwrap();
        let e = eig_approx(&c, 1.0, 100, 2).unwrap();
        assert!((e.approx - (2.0 * PI / 100.0 - PI / 800.0).powf(1.5)).abs() < 1e-15);
        assert!((mu(0.75, 2) - 15.0 * PI / 16.0).abs() < 1e-15);
        for (a, k, n) in [(0.75, 2, 100), (0.25, 7, 512), (0.6, 30, 2048)] {
            let c = constants(a).unwrap();
            let e = eig_approx(&c, 1.0, n, k).unwrap();
            let lhs = e.approx * (n as f64).powf(2.0 * a);
            assert!((lhs - mu_tilde(a, k)).abs() < 1e-14 * mu_tilde(a, k));
        }
        assert!(c.bound(10, 512) < c.bound(9, 512) && c.bound(10, 1024) < c.bound(10, 512));
        assert!(eig_approx(&c, 1.0, 10, 10).is_err());
    }

    #[test]
    fn phi_star_branches() {
        assert_eq!(phi_star(0.75, 1, 0.5), -1.0);
        assert_eq!(phi_star(0.75, 2, 0.5), 0.0);
        let mu4 = 2.0 * PI - 0.25 * PI / 4.0;
        assert!((phi_star(0.75, 4, 0.0) + mu4.sin()).abs() < 1e-15);
        assert!((phi_star(0.3, 3, 0.5) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mode_vector_properties() {
        let z = mode_vector(0.75, 1.0, 4, 1);
        for (m, v) in z.raw.iter().enumerate() {
            let want = 0.5 * -(mu(0.75, 1) * (1.0 - 2.0 * m as f64 / 4.0)).cos();
            assert!((v - want).abs() < 1e-15);
        }
        for k in [3, 8, 13] {
            let z = mode_vector(0.75, 1.0, 4096, k);
            let norm2: f64 = z.raw.iter().map(|v| v * v).sum();
            let l2 = integrate(|x| phi_star(0.75, k, x).powi(2), 0.0, 1.0, 1e-12, 1e-12).value;
            assert!((norm2 - l2).abs() < 2e-3, "k = {k}: {norm2} vs {l2}");
            assert!((l2 - 0.5).abs() < 0.1);
        }
        let (a, b) = (mode_vector(0.4, 1.0, 64, 5), mode_vector(0.4, 2.0, 64, 5));
        assert!(a.raw.iter().zip(&b.raw).all(|(x, y)| *y == 2.0 * x));
        assert_eq!(a.normalized, b.normalized);
    }

    #[test]
    fn overlaps_and_sign_invariance() {
        let r = match_modes(0.75, FourierSymbol::constant(1.0), 256, 6..=10).unwrap();
        for m in &r.modes {
            assert!(m.overlap.unwrap() > 0.95, "k = {}: {:?}", m.k, m.overlap);
        }
        assert!(r.collisions.is_empty());

        let sym = halpha_coeffs(0.75, FourierSymbol::constant(1.0), 64).unwrap();
        let t = ToeplitzMatrix::build(&sym, 64).unwrap();
        let mut dense = dense_eigh_with_cap(&t, 4096, true).unwrap();
        let c = constants(0.75).unwrap();
        let before = match_modes_with(&c, &sym, 64, 3..=5, &dense).unwrap();
        for v in dense.eigenvectors.as_mut().unwrap() {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        let after = match_modes_with(&c, &sym, 64, 3..=5, &dense).unwrap();
        for (a, b) in before.modes.iter().zip(&after.modes) {
            assert_eq!(a.overlap, b.overlap);
        }
        assert!(!before.warnings.is_empty());
    }

    #[test]
    fn collisions_are_reported() {
        let sym = halpha_coeffs(0.75, FourierSymbol::constant(1.0), 16).unwrap();
        let dense = DenseSpectrum {
            eigenvalues: vec![1e3; 17],
            eigenvectors: None,
            residual_norm: 0.0,
            orthogonality: 0.0,
        };
        let r = match_modes_with(&constants(0.75).unwrap(), &sym, 16, 1..=3, &dense).unwrap();
        assert_eq!(r.collisions.len(), 3);
        assert!(r.modes[0].overlap.is_none());
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = [64.0, 128.0, 256.0].iter().map(|&n: &f64| (n, 3.0 * n.powf(-1.5))).collect();
        assert!((loglog_slope(&pts) + 1.5).abs() < 1e-12);
    }

    #[test]
    fn apply_basics() {
        let sym = halpha_coeffs(0.75, FourierSymbol::constant(1.0), 128).unwrap();
        let zero = discrete_fraclap_apply(&sym, 128, |_| 0.0).unwrap();
        assert!(zero.iter().all(|&(_, v)| v == 0.0));
        let one = discrete_fraclap_apply(&sym, 128, bump).unwrap();
        let two = discrete_fraclap_apply(&sym, 128, |x| 2.0 * bump(x)).unwrap();
        assert!(one.iter().zip(&two).all(|(a, b)| b.1 == 2.0 * a.1));
        assert!(one.first().unwrap().0 >= 0.2 && one.last().unwrap().0 <= 0.8);
        assert!(matches!(discrete_fraclap_apply(&sym, 128, |_| 1.0), Err(Error::Support(_))));
    }

    fn bump_prime(x: f64) -> f64 {
        let s = (x - 0.5) / 0.3;
        if s.abs() >= 1.0 {
            0.0
        } else {
            bump(x) * (-2.0 * s / (1.0 - s * s).powi(2)) / 0.3
        }
    }

    /// Independent scheme: one integration by parts turns the folded integral
    /// into `(1/2α)∫_0^1 (f′(x−t) − f′(x+t)) t^{−2α} dt` (the boundary term
    /// cancels the `t > 1` tail), and `t = u²` removes the endpoint singularity.
    fn by_parts_oracle(alpha: f64, df: impl Fn(f64) -> f64, x: f64) -> f64 {
        let g = |u: f64| {
            let t = u * u;
            if t == 0.0 {
                return 0.0;
            }
            (df(x - t) - df(x + t)) * t.powf(-2.0 * alpha) * 2.0 * u
        };
        let body = integrate(g, 0.0, 1.0, 1e-13, 1e-13).value;
        halpha_constant(alpha) * body / (2.0 * alpha)
    }

    #[test]
    fn pv_oracle_cross_checks() {
        assert_eq!(fraclap_pv_oracle(0.75, &|_| 0.0, 0.4).unwrap().value, 0.0);
        for x in [0.5, 0.37, 0.61] {
            let a = fraclap_pv_oracle(0.75, &bump, x).unwrap().value;
            let b = by_parts_oracle(0.75, bump_prime, x);
            assert!((a - b).abs() < 1e-6, "x = {x}: {a} vs {b}");
            let twice = fraclap_pv_oracle(0.75, &|y| 2.0 * bump(y), x).unwrap().value;
            assert!((twice - 2.0 * a).abs() < 1e-12 * a.abs().max(1.0));
            let half = pv_oracle_with_core(0.75, &bump, x, PV_CORE / 2.0).unwrap().value;
            assert!((half - a).abs() < 1e-6);
        }
        let a = fraclap_pv_oracle(0.25, &bump, 0.45).unwrap().value;
        assert!((a - by_parts_oracle(0.25, bump_prime, 0.45)).abs() < 1e-6);
        assert!(fraclap_pv_oracle(0.75, &bump, 1.0).is_err());
        let step = |y: f64| if y < 0.5 { 1.0 } else { 0.0 };
        assert!(matches!(fraclap_pv_oracle(0.75, &step, 0.5), Err(Error::Support(_))));
    }

    #[test]
    fn discrete_operator_converges() {
        let sym = halpha_coeffs(0.75, FourierSymbol::constant(1.0), 512).unwrap();
        let errs: Vec<f64> = [128, 256, 512]
            .iter()
            .map(|&n| compare_with_oracle(&sym, n, bump).unwrap().sup_error)
            .collect();
        assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
    }

    #[test]
    fn cutoff_shape() {
        assert_eq!(cutoff_q(-1.0 / 3.0), 0.0);
        assert_eq!(cutoff_q(1.0 / 3.0), 1.0);
        assert!((cutoff_q(0.0) - 0.5).abs() < 1e-15);
        assert!((1.0 - 4.5 * (1.0f64 / 3.0).powi(2) - 0.5).abs() < 1e-15);
        assert!((cutoff_q_derivative(-1e-300) - 3.0).abs() < 1e-12);
        assert!((cutoff_q_derivative(1e-300) - 3.0).abs() < 1e-12);
        let ts: Vec<f64> = (0..=600).map(|i| -0.5 + i as f64 / 600.0).collect();
        assert!(ts.windows(2).all(|w| cutoff_q(w[1]) >= cutoff_q(w[0])));
        assert_eq!(cutoff_q(-3.0), 0.0);
        assert_eq!(cutoff_q(5.0), 1.0);
    }
}
