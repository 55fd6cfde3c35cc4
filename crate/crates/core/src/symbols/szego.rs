use num_complex::Complex64;

use super::Symbol;
use crate::{fft, Error, Result};

/// Outer factorization `h = g·ḡ` with `g = exp(L̂(0)/2 + Σ_{k≥1} L̂(k) χ^k)`.
#[derive(Debug, Clone)]
pub struct SzegoFactor {
    /// `L̂(0..=J)`, Fourier coefficients of `ln h`.
    pub log_coeffs: Vec<f64>,
    /// `ĝ(0..=J)`; `ĝ(j) = 0` for `j < 0` by construction.
    pub outer_plus: Vec<f64>,
    /// Coefficients of `1/g`, `(1/g)^(0..=J)`.
    pub inv_outer: Vec<f64>,
    /// `max |ĝ(j)|` over the negative indices the grid resolves.
    pub negative_leak: f64,
    /// `max_θ ||g(e^{iθ})|² − h(θ)|` on the factorization grid.
    pub reconstruction_error: f64,
    pub grid: usize,
    pub symbol: String,
}

impl SzegoFactor {
    /// `g(e^{iθ})` from the truncated series.
    pub fn g_at(&self, theta: f64) -> Complex64 {
        horner(&self.outer_plus, Complex64::from_polar(1.0, theta))
    }
}

fn horner(c: &[f64], z: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
}

/// Factorizes a strictly positive symbol on a grid of at least `8J` points.
pub fn szego_factorize(h: &dyn Symbol, order: usize) -> Result<SzegoFactor> {
    let m = fft::next_pow2_at_least((8 * order).max(1024));
    let samples = h.sample(m);
    if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    let (imin, &min) = samples
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty grid");
    if !(min > 0.0) {
        return Err(Error::NotPositive { min, theta: 2.0 * std::f64::consts::PI * imin as f64 / m as f64 });
    }
    let logs: Vec<f64> = samples.iter().map(|v| v.ln()).collect();
    let all = fft::even_coefficients(&logs, m / 2 - 1);

    // ψ(e^{iθ}) = L̂(0)/2 + Σ_{1≤k<m/2} L̂(k) e^{ikθ} on the grid, then g = e^{ψ}.
    let mut psi = vec![Complex64::new(0.0, 0.0); m];
    psi[0] = Complex64::new(all[0] / 2.0, 0.0);
    for (k, &l) in all.iter().enumerate().skip(1) {
        psi[k] = Complex64::new(l, 0.0);
    }
    fft::inverse(&mut psi);
    let mut g: Vec<Complex64> = psi.iter().map(|z| z.exp()).collect();
    let mut ginv: Vec<Complex64> = psi.iter().map(|z| (-z).exp()).collect();
    fft::forward(&mut g);
    fft::forward(&mut ginv);
    let scale = 1.0 / m as f64;
    let negative_leak = (m / 2 + 1..m).map(|j| g[j].norm() * scale).fold(0.0, f64::max);
    let outer_plus: Vec<f64> = (0..=order).map(|j| g[j].re * scale).collect();
    let inv_outer: Vec<f64> = (0..=order).map(|j| ginv[j].re * scale).collect();

    let fac = SzegoFactor {
        log_coeffs: all[..=order.min(all.len() - 1)].to_vec(),
        outer_plus,
        inv_outer,
        negative_leak,
        reconstruction_error: 0.0,
        grid: m,
        symbol: h.name().to_string(),
    };
    let reconstruction_error = fft::grid(m)
        .zip(&samples)
        .step_by((m / (4 * order.max(1))).max(1))
        .map(|(t, v)| (fac.g_at(t).norm_sqr() - v).abs())
        .fold(0.0, f64::max);
    Ok(SzegoFactor { reconstruction_error, ..fac })
}
