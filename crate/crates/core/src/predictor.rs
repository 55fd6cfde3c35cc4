//! Predictor polynomials `K_M(χ) = Σ_k β_{k,M} χ^k` with
//! `β_{k,M} = (T_M⁻¹)_{k+1,1} / √((T_M⁻¹)_{1,1})`, by the Levinson–Durbin
//! recursion.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::symbols::SzegoFactor;
use crate::{fft, Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct PredictorPolynomial {
    /// `β_{0..=M}`.
    pub coeffs: Vec<f64>,
    /// Innovation variance `E_M = 1/(T_M⁻¹)_{1,1}`.
    pub prediction_error: f64,
    /// Reflection coefficients `k_1..k_M`.
    pub reflection: Vec<f64>,
    /// `E_0, …, E_M`.
    pub errors_by_order: Vec<f64>,
}

impl PredictorPolynomial {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `K_M(z)`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &b| acc * z + b)
    }

    /// First column of `T_M⁻¹`, i.e. `β·β_0`.
    pub fn inverse_first_column(&self) -> Vec<f64> {
        let b0 = self.coeffs[0];
        self.coeffs.iter().map(|b| b * b0).collect()
    }

    /// Zero-freeness of `K_M` on the closed unit disc: the minimum modulus on
    /// a circle grid and the winding number of `K_M(e^{iθ})` about 0.
    pub fn zero_free_check(&self, grid: usize) -> ZeroFreeReport {
        let grid = grid.max(8 * (self.degree() + 1));
        let mut buf = vec![Complex64::new(0.0, 0.0); fft::next_pow2_at_least(grid)];
        let m = buf.len();
        for (k, &b) in self.coeffs.iter().enumerate() {
            buf[k % m].re += b;
        }
        fft::inverse(&mut buf);
        let min_modulus = buf.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
        let mut total = 0.0;
        for i in 0..m {
            let (a, b) = (buf[i], buf[(i + 1) % m]);
            total += (b / a).arg();
        }
        let winding = (total / (2.0 * PI)).round() as i64;
        ZeroFreeReport { min_modulus, winding, grid: m, zero_free: min_modulus > 0.0 && winding == 0 }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ZeroFreeReport {
    pub min_modulus: f64,
    pub winding: i64,
    pub grid: usize,
    pub zero_free: bool,
}

/// Levinson–Durbin on `ĥ(0..=M)`. Fails as soon as a reflection coefficient
/// reaches modulus 1, i.e. `T_M` is not positive definite.
pub fn levinson(autocov: &[f64]) -> Result<PredictorPolynomial> {
    let Some(&r0) = autocov.first() else {
        return Err(Error::InvalidArgument("empty autocovariance".into()));
    };
    if !(r0 > 0.0) {
        return Err(Error::NotPositiveDefinite { order: 0, coefficient: r0 });
    }
    let m = autocov.len() - 1;
    let mut a = Vec::with_capacity(m + 1);
    a.push(1.0);
    let mut err = r0;
    let mut reflection = Vec::with_capacity(m);
    let mut errors_by_order = Vec::with_capacity(m + 1);
    errors_by_order.push(err);
    let mut prev = Vec::with_capacity(m + 1);
    for order in 1..=m {
        let acc: f64 = (0..order).map(|j| a[j] * autocov[order - j]).sum();
        let k = -acc / err;
        if !(k.abs() < 1.0) {
            return Err(Error::NotPositiveDefinite { order, coefficient: k });
        }
        prev.clear();
        prev.extend_from_slice(&a);
        a.push(0.0);
        for j in 1..=order {
            a[j] += k * prev[order - j];
        }
        err *= 1.0 - k * k;
        reflection.push(k);
        errors_by_order.push(err);
    }
    let scale = 1.0 / err.sqrt();
    Ok(PredictorPolynomial {
        coeffs: a.into_iter().map(|v| v * scale).collect(),
        prediction_error: err,
        reflection,
        errors_by_order,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralMatch {
    pub max_deviation: f64,
    pub grid: usize,
    pub deviations: Vec<f64>,
}

/// Fourier coefficients of `1/|K_M|²` against `ĥ(0..=M)`.
pub fn verify_spectral_match(k: &PredictorPolynomial, autocov: &[f64]) -> Result<SpectralMatch> {
    verify_spectral_match_on(k, autocov, fft::next_pow2_at_least(16 * (k.degree() + 1)))
}

pub fn verify_spectral_match_on(k: &PredictorPolynomial, autocov: &[f64], grid: usize) -> Result<SpectralMatch> {
    let m = k.degree();
    if autocov.len() < m + 1 {
        return Err(Error::Truncation { available: autocov.len().saturating_sub(1), required: m });
    }
    let required = 16 * m.max(1);
    if grid < required {
        return Err(Error::GridTooCoarse { size: grid, required });
    }
    let mut buf = vec![Complex64::new(0.0, 0.0); grid];
    for (j, &b) in k.coeffs.iter().enumerate() {
        buf[j].re = b;
    }
    fft::inverse(&mut buf);
    let inv: Vec<f64> = buf.iter().map(|z| 1.0 / z.norm_sqr()).collect();
    let coeffs = fft::even_coefficients(&inv, m);
    let deviations: Vec<f64> = coeffs.iter().zip(autocov).map(|(a, b)| (a - b).abs()).collect();
    let max_deviation = deviations.iter().copied().fold(0.0, f64::max);
    Ok(SpectralMatch { max_deviation, grid, deviations })
}

#[derive(Debug, Clone, Serialize)]
pub struct SzegoComparison {
    pub n: usize,
    /// `max_k |(T_N⁻¹)_{k+1,1} − ĝ⁻¹(0)·ĝ⁻¹(k)|`.
    pub e_n: f64,
    /// `max_k |β_{k,N} − ĝ⁻¹(k)|`, the same comparison on normalized predictors.
    pub e_normalized: f64,
    pub per_k: Vec<f64>,
}

/// Compares a degree-`N` predictor with the Szegő factor of the same symbol.
///
/// `T_N⁻¹ e₁ = β_0 β` tends to `ĝ⁻¹(0) ĝ⁻¹`, and `β` itself to `ĝ⁻¹`; both
/// errors are reported.
pub fn predictor_vs_szego(k: &PredictorPolynomial, fac: &SzegoFactor, n: usize) -> Result<SzegoComparison> {
    if k.degree() != n {
        return Err(Error::SymbolMismatch(format!("predictor has degree {}, expected {n}", k.degree())));
    }
    if fac.inv_outer.len() < n + 1 {
        return Err(Error::Truncation { available: fac.inv_outer.len() - 1, required: n });
    }
    let g0 = fac.inv_outer[0];
    // A predictor from a different symbol disagrees already at k = 0.
    if (k.coeffs[0] - g0).abs() > 1e-3 * g0.abs().max(1.0) {
        return Err(Error::SymbolMismatch(format!(
            "β_0 = {} but 1/g(0) = {g0}; predictor and factor come from different symbols",
            k.coeffs[0]
        )));
    }
    let col = k.inverse_first_column();
    let per_k: Vec<f64> = col.iter().zip(&fac.inv_outer).map(|(c, gi)| (c - g0 * gi).abs()).collect();
    let e_n = per_k.iter().copied().fold(0.0, f64::max);
    let e_normalized = k.coeffs.iter().zip(&fac.inv_outer).map(|(b, gi)| (b - gi).abs()).fold(0.0, f64::max);
    Ok(SzegoComparison { n, e_n, e_normalized, per_k })
}
