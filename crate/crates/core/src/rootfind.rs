//! Bracketing root finders. Everything here is bisection; the callers
//! deal with functions whose smoothness is not guaranteed.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub fx: f64,
    pub lo: f64,
    pub hi: f64,
    pub iterations: usize,
}

/// Bisection on `[lo, hi]`, which must bracket a sign change. Stops when the
/// bracket is narrower than `x_tol` or stops shrinking in floating point.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, x_tol: f64) -> Option<Root> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Some(Root { x: lo, fx: 0.0, lo, hi: lo, iterations: 0 });
    }
    if fhi == 0.0 {
        return Some(Root { x: hi, fx: 0.0, lo: hi, hi, iterations: 0 });
    }
    if flo.signum() == fhi.signum() || !flo.is_finite() || !fhi.is_finite() {
        return None;
    }
    let mut best = if flo.abs() < fhi.abs() { (lo, flo) } else { (hi, fhi) };
    let mut iterations = 0;
    while (hi - lo).abs() > x_tol && iterations < 200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo.min(hi) || mid >= lo.max(hi) {
            break;
        }
        let fm = f(mid);
        iterations += 1;
        if fm.abs() < best.1.abs() {
            best = (mid, fm);
        }
        if fm == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some(Root { x: best.0, fx: best.1, lo, hi, iterations })
}

/// Evaluate `f` at `intervals + 1` uniform points of `[lo, hi]` and return
/// every sub-interval whose endpoint values change sign, plus the trace.
pub fn sign_scan<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    intervals: usize,
) -> (Vec<(f64, f64)>, Vec<(f64, f64)>) {
    let intervals = intervals.max(1);
    let trace: Vec<(f64, f64)> = (0..=intervals)
        .map(|i| {
            let x = lo + (hi - lo) * i as f64 / intervals as f64;
            (x, f(x))
        })
        .collect();
    let brackets = trace
        .windows(2)
        .filter(|w| w[0].1 == 0.0 || w[0].1.signum() != w[1].1.signum())
        .map(|w| (w[0].0, w[1].0))
        .collect();
    (brackets, trace)
}

/// Inverse of a nondecreasing function on `[lo, hi]` by bisection.
pub fn invert_monotone<F: Fn(f64) -> f64>(f: F, target: f64, lo: f64, hi: f64) -> f64 {
    let (mut a, mut b) = (lo, hi);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if f(m) < target {
            a = m;
        } else {
            b = m;
        }
    }
    let (fa, fb) = (f(a), f(b));
    if (fa - target).abs() <= (fb - target).abs() {
        a
    } else {
        b
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r.x - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn no_bracket() {
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_none());
    }

    #[test]
    fn scan_finds_all() {
        let (b, trace) = sign_scan(|x: f64| (3.0 * x).sin(), 0.1, 6.0, 64);
        assert_eq!(b.len(), 5);
        assert_eq!(trace.len(), 65);
    }

    #[test]
    fn monotone_inverse() {
        let x = invert_monotone(|x| x + x * x / 4.0, 3.0, 0.0, 2.0);
        assert_eq!(x, 2.0);
        let y = invert_monotone(|x| x.powi(3), 0.125, 0.0, 2.0);
        assert!((y - 0.5).abs() < 1e-15);
    }
}
