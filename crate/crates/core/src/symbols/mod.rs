//! Even real symbols and the transforms the spectral methods need.
//!
//! Coefficients are stored one-sided: `coeffs[j] = ĥ(j) = ĥ(−j)`, and the
//! symbol is `h(θ) = ĥ(0) + 2 Σ_{j≥1} ĥ(j) cos(jθ)`.

mod fourier;
mod io;
mod simple_loop;
mod singular;
mod szego;

pub use fourier::{cosine_sum, fourier_coeffs, FourierSymbol};
pub use io::{parse_preset, AnySymbol, SymbolDoc, SymbolKind};
pub use simple_loop::{invert_simple_loop, LoopSource, SimpleLoopSymbol};
pub use singular::{halpha_coeffs, halpha_constant, halpha_constant_printed, halpha_tail_constant, pure_halpha_coeffs, SingularSymbol};
pub use szego::{szego_factorize, SzegoFactor};

use crate::Result;

pub trait Symbol: Send + Sync {
    fn name(&self) -> &str;

    /// `ĥ(j)` for `j ≥ 0`; `None` when `j` is beyond what is known.
    fn coeff(&self, j: usize) -> Option<f64>;

    /// Pointwise value `h(θ)`.
    fn value(&self, theta: f64) -> f64;

    /// `ĥ(0..=n)`, or a truncation error.
    fn first_column(&self, n: usize) -> Result<Vec<f64>> {
        (0..=n)
            .map(|j| {
                self.coeff(j).ok_or(crate::Error::Truncation {
                    available: j.saturating_sub(1),
                    required: n,
                })
            })
            .collect()
    }

    /// Values on the uniform grid `2πm/n`.
    fn sample(&self, n: usize) -> Vec<f64> {
        crate::fft::grid(n).map(|t| self.value(t)).collect()
    }
}
