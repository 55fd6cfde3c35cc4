//! Householder tridiagonalization followed by implicit QL (the EISPACK
//! `tred2`/`tql2` pair), working on the transposed basis so that every inner
//! loop and every Givens rotation runs along a contiguous row.

use rayon::prelude::*;
use serde::Serialize;

use super::{MatvecMode, ToeplitzMatrix};
use crate::{Error, Result};

pub const DEFAULT_DENSE_CAP: usize = 4096;

#[derive(Debug, Clone, Serialize)]
pub struct DenseSpectrum {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// `eigenvectors[k]` is the unit eigenvector for `eigenvalues[k]`.
    #[serde(skip)]
    pub eigenvectors: Option<Vec<Vec<f64>>>,
    /// `max_k ‖T y_k − λ_k y_k‖₂`; zero when vectors were not requested.
    pub residual_norm: f64,
    /// `max_{i≠j} |⟨y_i, y_j⟩|` (over a sample of pairs for large sizes).
    pub orthogonality: f64,
}

impl DenseSpectrum {
    /// Smallest gap between consecutive eigenvalues.
    pub fn min_gap(&self) -> f64 {
        self.eigenvalues.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    }

    /// Index of the eigenvalue nearest to `x`.
    pub fn nearest(&self, x: f64) -> usize {
        let i = self.eigenvalues.partition_point(|&v| v < x);
        match i {
            0 => 0,
            i if i == self.eigenvalues.len() => i - 1,
            i if (self.eigenvalues[i] - x).abs() < (x - self.eigenvalues[i - 1]).abs() => i,
            i => i - 1,
        }
    }
}

/// Eigen-decomposition of a dense symmetric row-major matrix of order `n`.
/// Returns ascending eigenvalues and, if requested, eigenvectors as rows.
pub fn symmetric_eigen(mut w: Vec<f64>, n: usize, vectors: bool) -> (Vec<f64>, Option<Vec<f64>>) {
    assert_eq!(w.len(), n * n);
    if n == 0 {
        return (Vec::new(), vectors.then(Vec::new));
    }
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut w, n, &mut d, &mut e, vectors);
    tql2(&mut w, n, &mut d, &mut e, vectors);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values = order.iter().map(|&i| d[i]).collect();
    let vecs = vectors.then(|| {
        let mut out = Vec::with_capacity(n * n);
        for &i in &order {
            out.extend_from_slice(&w[i * n..(i + 1) * n]);
        }
        out
    });
    (values, vecs)
}

// `w` holds Vᵀ: row j of `w` is column j of the accumulated transform.
fn tred2(w: &mut [f64], n: usize, d: &mut [f64], e: &mut [f64], vectors: bool) {
    for j in 0..n {
        d[j] = w[j * n + n - 1];
    }
    for i in (1..n).rev() {
        let scale: f64 = d[..i].iter().map(|v| v.abs()).sum();
        let mut h = 0.0;
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = w[j * n + i - 1];
                w[j * n + i] = 0.0;
                w[i * n + j] = 0.0;
            }
        } else {
            for v in &mut d[..i] {
                *v /= scale;
                h += *v * *v;
            }
            let f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            e[..i].fill(0.0);
            for j in 0..i {
                let f = d[j];
                w[i * n + j] = f;
                let row = &w[j * n..j * n + i];
                let mut g = e[j] + row[j] * f;
                for k in j + 1..i {
                    g += row[k] * d[k];
                    e[k] += row[k] * f;
                }
                e[j] = g;
            }
            let mut f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                let (f, g) = (d[j], e[j]);
                let row = &mut w[j * n..j * n + i];
                for k in j..i {
                    row[k] -= f * e[k] + g * d[k];
                }
                d[j] = w[j * n + i - 1];
                w[j * n + i] = 0.0;
            }
        }
        d[i] = h;
    }

    if !vectors {
        for i in 0..n {
            d[i] = w[i * n + i];
        }
        e[0] = 0.0;
        return;
    }

    for i in 0..n - 1 {
        w[i * n + n - 1] = w[i * n + i];
        w[i * n + i] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = w[(i + 1) * n + k] / h;
            }
            let (head, tail) = w.split_at_mut((i + 1) * n);
            let u = &tail[..=i];
            for j in 0..=i {
                let row = &mut head[j * n..j * n + i + 1];
                let g: f64 = u.iter().zip(row.iter()).map(|(a, b)| a * b).sum();
                for (r, dk) in row.iter_mut().zip(&d[..=i]) {
                    *r -= g * dk;
                }
            }
        }
        w[(i + 1) * n..(i + 1) * n + i + 1].fill(0.0);
    }
    for j in 0..n {
        d[j] = w[j * n + n - 1];
        w[j * n + n - 1] = 0.0;
    }
    w[(n - 1) * n + n - 1] = 1.0;
    e[0] = 0.0;
}

fn tql2(w: &mut [f64], n: usize, d: &mut [f64], e: &mut [f64], vectors: bool) {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            loop {
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for v in &mut d[l + 2..n] {
                    *v -= h;
                }
                f += h;

                p = d[m];
                let (mut c, mut c2, mut c3) = (1.0, 1.0, 1.0);
                let el1 = e[l + 1];
                let (mut s, mut s2) = (0.0, 0.0);
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if vectors {
                        let (a, b) = w.split_at_mut((i + 1) * n);
                        let vi = &mut a[i * n..];
                        let vj = &mut b[..n];
                        for (x, y) in vi.iter_mut().zip(vj.iter_mut()) {
                            let h = *y;
                            *y = s * *x + c * h;
                            *x = c * *x - s * h;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
}

/// Full eigendecomposition with the default size cap.
pub fn dense_eigh(t: &ToeplitzMatrix) -> Result<DenseSpectrum> {
    dense_eigh_with_cap(t, DEFAULT_DENSE_CAP, true)
}

pub fn dense_eigh_with_cap(t: &ToeplitzMatrix, cap: usize, vectors: bool) -> Result<DenseSpectrum> {
    let n = t.size();
    if n > cap {
        return Err(Error::DenseCapExceeded { size: n, cap });
    }
    let (eigenvalues, vecs) = symmetric_eigen(t.to_dense(), n, vectors);
    let Some(flat) = vecs else {
        return Ok(DenseSpectrum { eigenvalues, eigenvectors: None, residual_norm: 0.0, orthogonality: 0.0 });
    };
    let eigenvectors: Vec<Vec<f64>> = flat.chunks(n).map(<[f64]>::to_vec).collect();
    let mode = if n > 256 { MatvecMode::Fft } else { MatvecMode::Naive };
    let residual_norm = eigenvectors
        .par_iter()
        .zip(&eigenvalues)
        .map(|(y, &l)| {
            let ty = t.matvec(y, mode).expect("dimension matches");
            ty.iter().zip(y).map(|(a, b)| (a - l * b).powi(2)).sum::<f64>().sqrt()
        })
        .reduce(|| 0.0, f64::max);
    // All pairs up to 1024; beyond that, every vector against a fixed sample.
    let probes: Vec<usize> = if n <= 1024 { (0..n).collect() } else { (0..n).step_by(n / 64).collect() };
    let orthogonality = probes
        .par_iter()
        .map(|&i| {
            eigenvectors
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, y)| y.iter().zip(&eigenvectors[i]).map(|(a, b)| a * b).sum::<f64>().abs())
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    Ok(DenseSpectrum { eigenvalues, eigenvectors: Some(eigenvectors), residual_norm, orthogonality })
}

/// Zero-based entry `(i, j)` of `T⁻¹`, by Gaussian elimination with partial
/// pivoting on `T x = e_j`.
pub fn inverse_entry_dense(t: &ToeplitzMatrix, i: usize, j: usize) -> Result<f64> {
    let n = t.size();
    for idx in [i, j] {
        if idx >= n {
            return Err(Error::DimensionMismatch { expected: n, got: idx + 1 });
        }
    }
    let eig = dense_eigh_with_cap(t, DEFAULT_DENSE_CAP, false)?;
    let smallest = eig.eigenvalues.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
    if smallest <= 1e-12 * t.norm_inf() {
        return Err(Error::Singular { smallest });
    }
    let mut a = t.to_dense();
    let mut b = vec![0.0; n];
    b[j] = 1.0;
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&p, &q| a[p * n + col].abs().total_cmp(&a[q * n + col].abs()))
            .expect("nonempty");
        if piv != col {
            for k in 0..n {
                a.swap(piv * n + k, col * n + k);
            }
            b.swap(piv, col);
        }
        let pivot = a[col * n + col];
        let (upper, lower) = a.split_at_mut((col + 1) * n);
        let prow = &upper[col * n..];
        for r in col + 1..n {
            let row = &mut lower[(r - col - 1) * n..(r - col) * n];
            let factor = row[col] / pivot;
            if factor != 0.0 {
                for k in col..n {
                    row[k] -= factor * prow[k];
                }
                b[r] -= factor * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r * n + k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r * n + r];
    }
    Ok(x[i])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::FourierSymbol;
    use std::f64::consts::PI;

    fn tridiag(n: usize) -> ToeplitzMatrix {
        ToeplitzMatrix::build(&FourierSymbol::new(vec![2.0, -1.0], 2.0).unwrap(), n).unwrap()
    }

    #[test]
    fn tridiagonal_closed_form() {
        let s = dense_eigh(&tridiag(62)).unwrap();
        for (k, v) in s.eigenvalues.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * PI / 64.0).cos();
            assert!((v - exact).abs() < 1e-10, "k={k}");
        }
        assert!(s.orthogonality < 1e-10);
        assert!(s.residual_norm < 1e-8 * 4.0);
        assert!(s.min_gap() > 0.0);
    }

    #[test]
    fn small_cases() {
        let t = ToeplitzMatrix::build(&FourierSymbol::constant(1.0), 7).unwrap();
        assert!(dense_eigh(&t).unwrap().eigenvalues.iter().all(|v| (v - 1.0).abs() < 1e-15));
        let t = ToeplitzMatrix::from_column(vec![3.0, 0.5], "2x2");
        let s = dense_eigh(&t).unwrap();
        assert!((s.eigenvalues[0] - 2.5).abs() < 1e-15 && (s.eigenvalues[1] - 3.5).abs() < 1e-15);
        let t = ToeplitzMatrix::from_column(vec![4.0], "1x1");
        assert_eq!(dense_eigh(&t).unwrap().eigenvalues, vec![4.0]);
    }

    #[test]
    fn values_only_agrees() {
        let col: Vec<f64> = (0..40).map(|k| 1.0 / (1.0 + k as f64).powi(2)).collect();
        let t = ToeplitzMatrix::from_column(col, "decay");
        let a = dense_eigh(&t).unwrap();
        let b = dense_eigh_with_cap(&t, 100, false).unwrap();
        for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
            assert!((x - y).abs() < 1e-13);
        }
        assert!(a.residual_norm < 1e-12);
        let trace: f64 = a.eigenvalues.iter().sum();
        assert!((trace - 40.0).abs() < 1e-12);
    }

    #[test]
    fn cap() {
        assert!(matches!(dense_eigh_with_cap(&tridiag(10), 5, false), Err(Error::DenseCapExceeded { .. })));
    }

    #[test]
    fn inverse_entries() {
        assert!((inverse_entry_dense(&tridiag(2), 0, 0).unwrap() - 0.75).abs() < 1e-15);
        let id = ToeplitzMatrix::build(&FourierSymbol::constant(1.0), 4).unwrap();
        assert_eq!(inverse_entry_dense(&id, 2, 2).unwrap(), 1.0);
        assert_eq!(inverse_entry_dense(&id, 1, 3).unwrap(), 0.0);
        let singular = ToeplitzMatrix::from_column(vec![1.0, 1.0], "ones");
        assert!(matches!(inverse_entry_dense(&singular, 0, 0), Err(Error::Singular { .. })));
    }
}
