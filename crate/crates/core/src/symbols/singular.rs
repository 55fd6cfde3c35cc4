use std::f64::consts::PI;

use statrs::function::gamma::gamma;

use super::{FourierSymbol, Symbol};
use crate::{Error, Result};

/// `h_α(θ) = |1 − e^{iθ}|^{2α} c(θ) = (2 − 2cos θ)^α c(θ)`.
#[derive(Debug, Clone)]
pub struct SingularSymbol {
    alpha: f64,
    c: FourierSymbol,
    coeffs: Vec<f64>,
    truncation_error: f64,
    name: String,
}

impl SingularSymbol {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn c(&self) -> &FourierSymbol {
        &self.c
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Error bound carried over from truncating `c`.
    pub fn truncation_error(&self) -> f64 {
        self.truncation_error
    }

    /// Same symbol with coefficients through a different order.
    pub fn with_order(&self, order: usize) -> Self {
        halpha_coeffs(self.alpha, self.c.clone(), order).expect("parameters were validated")
    }
}

impl Symbol for SingularSymbol {
    fn name(&self) -> &str {
        &self.name
    }

    fn coeff(&self, j: usize) -> Option<f64> {
        self.coeffs.get(j).copied()
    }

    fn value(&self, theta: f64) -> f64 {
        (2.0 - 2.0 * theta.cos()).max(0.0).powf(self.alpha) * self.c.value(theta)
    }
}

/// Coefficients `d(0..=order)` of `(2 − 2cos θ)^α` for any `α > −1/2`:
/// `d(0) = Γ(1+2α)/Γ(1+α)²` and `d(u+1) = d(u)·(u − α)/(u + 1 + α)`.
pub fn pure_halpha_coeffs(alpha: f64, order: usize) -> Vec<f64> {
    let mut d = Vec::with_capacity(order + 1);
    let mut cur = gamma(1.0 + 2.0 * alpha) / gamma(1.0 + alpha).powi(2);
    for u in 0..=order {
        d.push(cur);
        cur *= (u as f64 - alpha) / (u as f64 + 1.0 + alpha);
    }
    d
}

fn validate_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) || alpha == 0.5 {
        return Err(Error::InvalidArgument(format!("α = {alpha} must lie in (0, 1) and differ from 1/2")));
    }
    Ok(())
}

/// `ĥ_α(0..=order)` for `h_α = (2 − 2cos θ)^α c(θ)`: the closed-form pure
/// part convolved with `ĉ`, which is exact for a finite `c`.
pub fn halpha_coeffs(alpha: f64, c: FourierSymbol, order: usize) -> Result<SingularSymbol> {
    validate_alpha(alpha)?;
    let (min, theta) = crate::fft::grid(4096)
        .map(|t| (c.value(t), t))
        .fold((f64::INFINITY, 0.0), |a, b| if b.0 < a.0 { b } else { a });
    if !(min > 0.0) {
        return Err(Error::NotPositive { min, theta });
    }
    let jc = c.order();
    let d = pure_halpha_coeffs(alpha, order + jc);
    let ch = c.coeffs();
    let coeffs = (0..=order)
        .map(|u| {
            (-(jc as isize)..=jc as isize)
                .map(|m| ch[m.unsigned_abs()] * d[(u as isize - m).unsigned_abs()])
                .sum()
        })
        .collect();
    let truncation_error = c.tail_estimate() * d[0];
    let name = format!("halpha({alpha})*{}", c.name());
    Ok(SingularSymbol { alpha, c, coeffs, truncation_error, name })
}

/// Tail constant of Lemma 1, `ĥ_α(u) ~ −C_α c(0) |u|^{−2α−1}`:
/// `C_α = 2^{2α} Γ((1+2α)/2) / (√π |Γ(−α)|)`.
///
/// This is the constant the closed-form coefficients actually approach; the
/// same expression with `|Γ(α)|` in the denominator is kept as
/// [`halpha_constant_printed`] for reporting.
pub fn halpha_constant(alpha: f64) -> f64 {
    2f64.powf(2.0 * alpha) * gamma(0.5 + alpha) / (PI.sqrt() * gamma(-alpha).abs())
}

/// `2^{2α} Γ((1+2α)/2) / (√π |Γ(α)|)`.
pub fn halpha_constant_printed(alpha: f64) -> f64 {
    2f64.powf(2.0 * alpha) * gamma(0.5 + alpha) / (PI.sqrt() * gamma(alpha).abs())
}

/// Signed ratio `ĥ_α(u)·u^{2α+1}/c(0)`; tends to `−C_α`.
pub fn halpha_tail_constant(sym: &SingularSymbol, u: usize) -> Result<f64> {
    if u == 0 {
        return Err(Error::InvalidArgument("u must be at least 1".into()));
    }
    if u > sym.order() {
        return Err(Error::Truncation { available: sym.order(), required: u });
    }
    let c0 = sym.c.at_zero();
    Ok(sym.coeffs[u] * (u as f64).powf(2.0 * sym.alpha + 1.0) / c0)
}
