use serde::{Deserialize, Serialize};

use super::Symbol;
use crate::{fft, Error, Result};

/// A real even trigonometric series truncated at order `J`.
///
/// Coefficients beyond `J` are zero by definition, so a `FourierSymbol` can
/// fill Toeplitz matrices of any order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierSymbol {
    coeffs: Vec<f64>,
    /// Declared Wiener-weight exponent.
    s: f64,
    name: String,
    /// Aliasing estimate when the coefficients came from samples.
    quadrature_error: f64,
}

impl FourierSymbol {
    pub fn new(coeffs: Vec<f64>, s: f64) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("empty coefficient list".into()));
        }
        if let Some(i) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        if !(s >= 0.0) {
            return Err(Error::InvalidArgument(format!("decay exponent s = {s} must be nonnegative")));
        }
        Ok(Self { coeffs, s, name: "fourier".into(), quadrature_error: 0.0 })
    }

    pub fn constant(c: f64) -> Self {
        Self { coeffs: vec![c], s: f64::INFINITY, name: format!("const({c})"), quadrature_error: 0.0 }
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn decay_exponent(&self) -> f64 {
        self.s
    }

    pub fn quadrature_error(&self) -> f64 {
        self.quadrature_error
    }

    /// `|ĥ(J)|·J^s`, the proxy for the Wiener-weight tail.
    pub fn tail_estimate(&self) -> f64 {
        let j = self.order();
        if j == 0 {
            return 0.0;
        }
        let s = if self.s.is_finite() { self.s } else { 0.0 };
        self.coeffs[j].abs() * (j as f64).powf(s)
    }

    /// Weighted partial sums `Σ_{|j|≤m} |ĥ(j)|(|j|+1)^s` for `m = 0..=J`.
    pub fn weighted_partial_sums(&self) -> Vec<f64> {
        let s = if self.s.is_finite() { self.s } else { 0.0 };
        let mut acc = 0.0;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let w = c.abs() * ((j + 1) as f64).powf(s);
                acc += if j == 0 { w } else { 2.0 * w };
                acc
            })
            .collect()
    }

    /// `c(0) = Σ_j ĥ(j)`.
    pub fn at_zero(&self) -> f64 {
        self.coeffs[0] + 2.0 * self.coeffs[1..].iter().sum::<f64>()
    }
}

impl Symbol for FourierSymbol {
    fn name(&self) -> &str {
        &self.name
    }

    fn coeff(&self, j: usize) -> Option<f64> {
        Some(self.coeffs.get(j).copied().unwrap_or(0.0))
    }

    fn value(&self, theta: f64) -> f64 {
        cosine_sum(&self.coeffs, theta)
    }

    fn sample(&self, n: usize) -> Vec<f64> {
        fft::cosine_series_on_grid(&self.coeffs, n)
    }
}

/// `ĥ(0) + 2 Σ ĥ(j) cos(jθ)` by Clenshaw's recurrence in `cos θ`.
pub fn cosine_sum(coeffs: &[f64], theta: f64) -> f64 {
    let t = theta.cos();
    let (mut b1, mut b2) = (0.0, 0.0);
    for &c in coeffs[1..].iter().rev() {
        let b0 = 2.0 * c + 2.0 * t * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    coeffs[0] + t * b1 - b2
}

/// Coefficients `ĥ(0..=J)` of an even real symbol from uniform samples on
/// `[0, 2π)`, symmetrised. The aliasing estimate is the largest coefficient
/// the grid resolves beyond `J`.
pub fn fourier_coeffs(samples: &[f64], order: usize) -> Result<FourierSymbol> {
    let required = 2 * order + 1;
    if samples.len() < required {
        return Err(Error::GridTooCoarse { size: samples.len(), required });
    }
    if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    let half = samples.len() / 2;
    let all = fft::even_coefficients(samples, half);
    let quadrature_error = all[order + 1..].iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let mut coeffs = all;
    coeffs.truncate(order + 1);
    Ok(FourierSymbol { coeffs, s: 0.0, name: "sampled".into(), quadrature_error })
}
