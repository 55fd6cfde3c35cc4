//! Thin helpers over `rustfft` for even, real, 2π-periodic functions.
//!
//! Grids are always uniform, `θ_m = 2πm/n` for `m = 0..n`.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

pub(crate) fn forward_plan(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n))
}

pub(crate) fn inverse_plan(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n))
}

/// In-place forward DFT, `X_j = Σ_m x_m e^{−2πijm/n}`.
pub fn forward(buf: &mut [Complex64]) {
    forward_plan(buf.len()).process(buf);
}

/// In-place unnormalised inverse DFT.
pub fn inverse(buf: &mut [Complex64]) {
    inverse_plan(buf.len()).process(buf);
}

/// Uniform grid `θ_m = 2πm/n`.
pub fn grid(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |m| 2.0 * PI * m as f64 / n as f64)
}

/// Cosine coefficients `ĥ(0..=order)` of an even function sampled on the
/// uniform grid, by the trapezoidal rule. The `j` and `n − j` bins are
/// averaged so that the result is exactly even.
pub fn even_coefficients(samples: &[f64], order: usize) -> Vec<f64> {
    let n = samples.len();
    assert!(n > 0);
    let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    forward(&mut buf);
    let scale = 1.0 / n as f64;
    (0..=order)
        .map(|j| {
            let a = buf[j % n].re;
            let b = buf[(n - j % n) % n].re;
            0.5 * (a + b) * scale
        })
        .collect()
}

/// Values of `ĥ(0) + 2 Σ_{j≥1} ĥ(j) cos(jθ_m)` on the `n`-point grid.
///
/// Coefficients beyond `n/2` are folded (aliased) into the grid exactly as
/// sampling would fold them.
pub fn cosine_series_on_grid(coeffs: &[f64], n: usize) -> Vec<f64> {
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for (j, &c) in coeffs.iter().enumerate() {
        if j == 0 {
            buf[0].re += c;
        } else {
            buf[j % n].re += c;
            buf[(n - j % n) % n].re += c;
        }
    }
    inverse(&mut buf);
    buf.into_iter().map(|z| z.re).collect()
}

pub fn next_pow2_at_least(n: usize) -> usize {
    n.max(1).next_power_of_two()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trigonometric_polynomial_is_recovered() {
        let n = 64;
        let samples: Vec<f64> = grid(n).map(|t| 3.0 - 2.0 * t.cos() + 0.5 * (3.0 * t).cos()).collect();
        let c = even_coefficients(&samples, 5);
        let expect = [3.0, -1.0, 0.0, 0.25, 0.0, 0.0];
        for (a, b) in c.iter().zip(expect) {
            assert!((a - b).abs() < 1e-14, "{a} vs {b}");
        }
        let back = cosine_series_on_grid(&c, n);
        for (a, b) in back.iter().zip(&samples) {
            assert!((a - b).abs() < 1e-13);
        }
    }
}
