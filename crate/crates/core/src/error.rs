use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("grid of {size} points is too coarse (need at least {required})")]
    GridTooCoarse { size: usize, required: usize },

    #[error("non-finite sample at index {0}")]
    NonFinite(usize),

    #[error("symbol is not strictly positive: min {min:e} at θ = {theta}")]
    NotPositive { min: f64, theta: f64 },

    #[error("symbol is not a simple loop: {0}")]
    NotSimpleLoop(String),

    #[error("Toeplitz matrix is not positive definite: reflection coefficient {coefficient} at order {order}")]
    NotPositiveDefinite { order: usize, coefficient: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("truncation order {available} is below the required {required}")]
    Truncation { available: usize, required: usize },

    #[error("dense size {size} exceeds the cap {cap}; use the characteristic-equation solver instead")]
    DenseCapExceeded { size: usize, cap: usize },

    #[error("matrix is numerically singular (smallest |eigenvalue| {smallest:e})")]
    Singular { smallest: f64 },

    #[error("predictor polynomial vanishes at χ = {re} + {im}i")]
    PredictorZero { re: f64, im: f64 },

    #[error("no sign change of the characteristic function for k = {k} on [{lo}, {hi}]")]
    NoSignChange {
        k: usize,
        lo: f64,
        hi: f64,
        /// `(λ′, Ψ_k(λ′))` pairs visited by the scan.
        trace: Vec<(f64, f64)>,
    },

    #[error("phase jump {jump:.3} rad between λ′ = {at} and its neighbour exceeds π/2; refine the λ′ grid")]
    UnwrapFailed { at: f64, jump: f64 },

    #[error("series tail {tail:e} exceeds tolerance {tolerance:e}; increase the truncation order")]
    TailTooLarge { tail: f64, tolerance: f64 },

    #[error("λ is within {distance:e} of an eigenvalue; the (1,1) entry formula has a pole there")]
    NearEigenvalue { distance: f64 },

    #[error("symbols do not match: {0}")]
    SymbolMismatch(String),

    #[error("function is not supported inside (0, 1): {0}")]
    Support(String),

    #[error("spectrum aborted after {} eigenvalues: {source}", partial.records.len())]
    Aborted {
        source: Box<Error>,
        partial: Box<crate::eigensolve::SpectrumReport>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Numerical failures (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        if let Error::Aborted { source, .. } = self {
            return source.is_numerical();
        }
        matches!(
            self,
            Error::NoSignChange { .. }
                | Error::UnwrapFailed { .. }
                | Error::NotPositiveDefinite { .. }
                | Error::PredictorZero { .. }
                | Error::Singular { .. }
                | Error::NearEigenvalue { .. }
                | Error::TailTooLarge { .. }
        )
    }
}
