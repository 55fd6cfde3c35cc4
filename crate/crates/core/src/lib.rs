//! Eigenvalues and eigenvectors of Hermitian Toeplitz matrices `T_N(h)`.
//!
//! Two symbol families are supported:
//!
//! * regular simple-loop symbols `f(θ) = f1(1 − cos θ)` with `f1` strictly
//!   increasing on `[0, 2]`, whose full spectrum is obtained from a scalar
//!   characteristic equation `λ′ = 1 − cos((ρ_N(λ′) + kπ)/(N + 2))` driven by
//!   the phase of a predictor polynomial;
//! * singular symbols `h_α(θ) = |1 − e^{iθ}|^{2α} c(θ)`, for which small
//!   eigenvalues and eigenvectors are approximated from the spectrum of the
//!   fractional Laplacian on `(0, 1)`.
//!
//! Every fast path ships with an independent dense or quadrature oracle so the
//! two can be cross-checked.

pub mod cli;
pub mod eigensolve;
mod error;
pub mod fft;
pub mod fraclap;
pub mod phase;
pub mod predictor;
pub mod quadrature;
pub mod rootfind;
pub mod symbols;
pub mod toeplitz;

pub use error::{Error, Result};
pub use symbols::{FourierSymbol, SimpleLoopSymbol, SingularSymbol, Symbol, SzegoFactor};
pub use toeplitz::{DenseSpectrum, MatvecMode, ToeplitzMatrix};
