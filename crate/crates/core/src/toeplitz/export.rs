use std::fmt::Write as _;
use std::path::Path;

use super::ToeplitzMatrix;
use crate::Result;

/// `k,lambda,residual` rows, `k` one-based.
pub fn spectrum_csv(rows: impl IntoIterator<Item = (usize, f64, f64)>) -> String {
    let mut out = String::from("k,lambda,residual\n");
    for (k, l, r) in rows {
        let _ = writeln!(out, "{k},{l:.17e},{r:.3e}");
    }
    out
}

/// Dense CSV dump, one matrix row per line.
pub fn dump_matrix(t: &ToeplitzMatrix, path: &Path) -> Result<()> {
    let n = t.size();
    let mut out = String::with_capacity(n * n * 24);
    for i in 0..n {
        for j in 0..n {
            if j > 0 {
                out.push(',');
            }
            let _ = write!(out, "{:.17e}", t.entry(i, j));
        }
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}
