//! `T_N(h)`: the `(N+1)×(N+1)` symmetric Toeplitz matrix with entries
//! `ĥ(k − l)`, its products, and a dense oracle.

mod dense;
mod export;

pub use dense::{dense_eigh, dense_eigh_with_cap, inverse_entry_dense, symmetric_eigen, DenseSpectrum, DEFAULT_DENSE_CAP};
pub use export::{dump_matrix, spectrum_csv};

use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rustfft::Fft;
use serde::{Deserialize, Serialize};

use crate::symbols::Symbol;
use crate::{fft, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatvecMode {
    Naive,
    Fft,
}

struct Embedding {
    size: usize,
    /// DFT of the circulant's first column.
    eigen: Vec<Complex64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

pub struct ToeplitzMatrix {
    column: Vec<f64>,
    symbol: String,
    embedding: OnceLock<Embedding>,
}

impl Clone for ToeplitzMatrix {
    fn clone(&self) -> Self {
        Self::from_column(self.column.clone(), self.symbol.clone())
    }
}

impl std::fmt::Debug for ToeplitzMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ToeplitzMatrix")
            .field("size", &self.size())
            .field("symbol", &self.symbol)
            .finish_non_exhaustive()
    }
}

impl ToeplitzMatrix {
    /// `T_N(h)` for `N ≥ 1`, i.e. size `N + 1`.
    pub fn build(sym: &dyn Symbol, n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidArgument("N must be at least 1".into()));
        }
        Ok(Self::from_column(sym.first_column(n)?, sym.name().to_string()))
    }

    pub fn from_column(column: Vec<f64>, symbol: impl Into<String>) -> Self {
        assert!(!column.is_empty());
        Self { column, symbol: symbol.into(), embedding: OnceLock::new() }
    }

    /// Matrix dimension `N + 1`.
    pub fn size(&self) -> usize {
        self.column.len()
    }

    pub fn order(&self) -> usize {
        self.column.len() - 1
    }

    pub fn column(&self) -> &[f64] {
        &self.column
    }

    pub fn symbol_name(&self) -> &str {
        &self.symbol
    }

    /// Zero-based entry `(i, j)`.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.column[i.abs_diff(j)]
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.size();
        let mut a = Vec::with_capacity(n * n);
        for i in 0..n {
            a.extend((0..n).map(|j| self.entry(i, j)));
        }
        a
    }

    /// `T − λI`, which is `T_N(h − λ)`.
    pub fn shifted(&self, lambda: f64) -> Self {
        let mut c = self.column.clone();
        c[0] -= lambda;
        Self::from_column(c, format!("{} - {lambda}", self.symbol))
    }

    /// `‖T‖_∞`, the largest absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        let n = self.size();
        // Row i sums |ĥ(0..=i)| and |ĥ(1..n−i)|; the middle row is the largest.
        let abs: Vec<f64> = self.column.iter().map(|c| c.abs()).collect();
        let mut prefix = vec![0.0; n + 1];
        for i in 0..n {
            prefix[i + 1] = prefix[i] + abs[i];
        }
        (0..n).map(|i| prefix[i + 1] + prefix[n - i] - abs[0]).fold(0.0, f64::max)
    }

    pub fn matvec(&self, x: &[f64], mode: MatvecMode) -> Result<Vec<f64>> {
        if x.len() != self.size() {
            return Err(Error::DimensionMismatch { expected: self.size(), got: x.len() });
        }
        Ok(match mode {
            MatvecMode::Naive => self.matvec_naive(x),
            MatvecMode::Fft => self.matvec_fft(x),
        })
    }

    fn matvec_naive(&self, x: &[f64]) -> Vec<f64> {
        let n = self.size();
        (0..n)
            .map(|i| {
                let lower: f64 = (0..=i).map(|j| self.column[i - j] * x[j]).sum();
                let upper: f64 = (i + 1..n).map(|j| self.column[j - i] * x[j]).sum();
                lower + upper
            })
            .collect()
    }

    fn embedding(&self) -> &Embedding {
        self.embedding.get_or_init(|| {
            let n = self.size();
            let size = fft::next_pow2_at_least(2 * n);
            // First column of the circulant: ĥ(0..n), zeros, then ĥ(n−1..1).
            let mut c = vec![Complex64::new(0.0, 0.0); size];
            for (j, &v) in self.column.iter().enumerate() {
                c[j].re = v;
                if j > 0 {
                    c[size - j].re = v;
                }
            }
            let forward = fft::forward_plan(size);
            forward.process(&mut c);
            Embedding { size, eigen: c, forward, inverse: fft::inverse_plan(size) }
        })
    }

    fn matvec_fft(&self, x: &[f64]) -> Vec<f64> {
        let e = self.embedding();
        let mut buf = vec![Complex64::new(0.0, 0.0); e.size];
        for (b, &v) in buf.iter_mut().zip(x) {
            b.re = v;
        }
        e.forward.process(&mut buf);
        for (b, l) in buf.iter_mut().zip(&e.eigen) {
            *b *= l;
        }
        e.inverse.process(&mut buf);
        let scale = 1.0 / e.size as f64;
        buf[..x.len()].iter().map(|z| z.re * scale).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::{halpha_coeffs, FourierSymbol};
    use rand::{Rng, SeedableRng};

    #[test]
    fn tridiagonal_rows() {
        let t = ToeplitzMatrix::build(&FourierSymbol::new(vec![2.0, -1.0], 2.0).unwrap(), 2).unwrap();
        assert_eq!(t.to_dense(), vec![2.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 2.0]);
        assert_eq!(t.matvec(&[1.0, 0.0, 0.0], MatvecMode::Naive).unwrap(), vec![2.0, -1.0, 0.0]);
        assert_eq!(t.norm_inf(), 4.0);
    }

    #[test]
    fn identity() {
        let t = ToeplitzMatrix::build(&FourierSymbol::constant(1.0), 5).unwrap();
        let x = [1.0, -2.0, 3.0, 0.5, 0.0, 7.0];
        for mode in [MatvecMode::Naive, MatvecMode::Fft] {
            let y = t.matvec(&x, mode).unwrap();
            for (a, b) in y.iter().zip(x) {
                assert!((a - b).abs() < 1e-14);
            }
        }
        assert!(matches!(t.matvec(&x[..3], MatvecMode::Fft), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn singular_truncation_is_enforced() {
        let h = halpha_coeffs(0.25, FourierSymbol::constant(1.0), 16).unwrap();
        assert!(matches!(ToeplitzMatrix::build(&h, 32), Err(Error::Truncation { .. })));
        assert_eq!(ToeplitzMatrix::build(&h, 16).unwrap().column(), h.coeffs());
    }

    #[test]
    fn fft_matches_naive() {
        let h = halpha_coeffs(0.75, FourierSymbol::constant(1.0), 512).unwrap();
        let t = ToeplitzMatrix::build(&h, 512).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let x: Vec<f64> = (0..513).map(|_| rng.random_range(-1.0..1.0)).collect();
            let a = t.matvec(&x, MatvecMode::Naive).unwrap();
            let b = t.matvec(&x, MatvecMode::Fft).unwrap();
            let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let dev = a.iter().zip(&b).fold(0.0f64, |m, (p, q)| m.max((p - q).abs()));
            assert!(dev <= 1e-10 * scale);
        }
    }
}
