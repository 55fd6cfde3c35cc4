use super::{FourierSymbol, SingularSymbol, Symbol};
use crate::rootfind::invert_monotone;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub enum LoopSource {
    Fourier(FourierSymbol),
    Singular(SingularSymbol),
}

impl LoopSource {
    fn symbol(&self) -> &dyn Symbol {
        match self {
            LoopSource::Fourier(f) => f,
            LoopSource::Singular(h) => h,
        }
    }
}

/// An even symbol written as `f(θ) = f1(1 − cos θ)`.
///
/// Every even trigonometric series is a Chebyshev series in `t = cos θ`, so
/// `f1(x) = Σ' a_j T_j(1 − x)` with `a_j = 2ĥ(j)`, and its derivatives come
/// from the Chebyshev derivative recurrence. Singular symbols contribute the
/// factor `(2x)^α` in front of the series for `c`.
#[derive(Debug, Clone)]
pub struct SimpleLoopSymbol {
    source: LoopSource,
    cheb: [Vec<f64>; 3],
}

impl SimpleLoopSymbol {
    /// Wraps a symbol without checking any shape condition.
    pub fn new(source: LoopSource) -> Self {
        let smooth = match &source {
            LoopSource::Fourier(f) => f.coeffs(),
            LoopSource::Singular(h) => h.c().coeffs(),
        };
        let c0: Vec<f64> = smooth.iter().map(|c| 2.0 * c).collect();
        let c1 = cheb_derivative(&c0);
        let c2 = cheb_derivative(&c1);
        Self { source, cheb: [c0, c1, c2] }
    }

    /// A regular simple loop: `f′ > 0` on `(0, π)`, `f″(0) > 0`, `f″(π) < 0`.
    pub fn from_fourier(f: FourierSymbol) -> Result<Self> {
        let s = Self::new(LoopSource::Fourier(f));
        s.validate_simple_loop()?;
        Ok(s)
    }

    /// `h_α` as a loop; only monotonicity on `(0, π)` is required.
    pub fn from_singular(h: SingularSymbol) -> Result<Self> {
        let s = Self::new(LoopSource::Singular(h));
        s.check_monotone(0.0, std::f64::consts::PI)?;
        Ok(s)
    }

    pub fn source(&self) -> &LoopSource {
        &self.source
    }

    pub fn is_regular(&self) -> bool {
        matches!(self.source, LoopSource::Fourier(_))
    }

    pub fn validate_simple_loop(&self) -> Result<()> {
        self.check_monotone(0.0, std::f64::consts::PI)?;
        let (d0, dpi) = self.second_derivatives();
        if !(d0 > 0.0 && d0.is_finite()) {
            return Err(Error::NotSimpleLoop(format!("f″(0) = {d0} is not a positive real")));
        }
        if !(dpi < 0.0 && dpi.is_finite()) {
            return Err(Error::NotSimpleLoop(format!("f″(π) = {dpi} is not a negative real")));
        }
        Ok(())
    }

    /// `f′(θ) > 0` on a 4096-point grid of the open interval `(θ1, θ2)`.
    pub fn check_monotone(&self, theta1: f64, theta2: f64) -> Result<()> {
        let n = 4096;
        for i in 1..n {
            let t = theta1 + (theta2 - theta1) * i as f64 / n as f64;
            let d = self.derivative(t);
            if !(d > 0.0) {
                return Err(Error::NotSimpleLoop(format!("f′({t}) = {d:e} is not positive")));
            }
        }
        Ok(())
    }

    fn smooth(&self, order: usize, x: f64) -> f64 {
        let v = cheb_eval(&self.cheb[order], 1.0 - x);
        if order == 1 {
            -v
        } else {
            v
        }
    }

    pub fn f1(&self, x: f64) -> f64 {
        match &self.source {
            LoopSource::Fourier(_) => self.smooth(0, x),
            LoopSource::Singular(h) => (2.0 * x).max(0.0).powf(h.alpha()) * self.smooth(0, x),
        }
    }

    pub fn df1(&self, x: f64) -> f64 {
        match &self.source {
            LoopSource::Fourier(_) => self.smooth(1, x),
            LoopSource::Singular(h) => {
                let a = h.alpha();
                let g = (2.0 * x).powf(a);
                let dg = 2.0 * a * (2.0 * x).powf(a - 1.0);
                dg * self.smooth(0, x) + g * self.smooth(1, x)
            }
        }
    }

    pub fn d2f1(&self, x: f64) -> f64 {
        match &self.source {
            LoopSource::Fourier(_) => self.smooth(2, x),
            LoopSource::Singular(h) => {
                let a = h.alpha();
                let g = (2.0 * x).powf(a);
                let dg = 2.0 * a * (2.0 * x).powf(a - 1.0);
                let d2g = 4.0 * a * (a - 1.0) * (2.0 * x).powf(a - 2.0);
                d2g * self.smooth(0, x) + 2.0 * dg * self.smooth(1, x) + g * self.smooth(2, x)
            }
        }
    }

    /// `f′(θ) = f1′(1 − cos θ)·sin θ`.
    pub fn derivative(&self, theta: f64) -> f64 {
        self.df1(1.0 - theta.cos()) * theta.sin()
    }

    /// `(f″(0), f″(π)) = (f1′(0), −f1′(2))`; `+∞` at 0 for singular symbols.
    pub fn second_derivatives(&self) -> (f64, f64) {
        let d0 = match &self.source {
            LoopSource::Fourier(_) => self.df1(0.0),
            LoopSource::Singular(_) => f64::INFINITY,
        };
        (d0, -self.df1(2.0))
    }

    /// `[f1(0), f1(2)] = [min f, max f]`.
    pub fn range(&self) -> (f64, f64) {
        (self.f1(0.0), self.f1(2.0))
    }

    pub fn f1_inverse(&self, lambda: f64) -> Result<f64> {
        invert_simple_loop(self, lambda)
    }
}

impl Symbol for SimpleLoopSymbol {
    fn name(&self) -> &str {
        self.source.symbol().name()
    }

    fn coeff(&self, j: usize) -> Option<f64> {
        self.source.symbol().coeff(j)
    }

    fn value(&self, theta: f64) -> f64 {
        self.source.symbol().value(theta)
    }

    fn sample(&self, n: usize) -> Vec<f64> {
        self.source.symbol().sample(n)
    }
}

/// `λ′ = f1⁻¹(λ)` by bisection on the increasing `f1`.
pub fn invert_simple_loop(f: &SimpleLoopSymbol, lambda: f64) -> Result<f64> {
    let (lo, hi) = f.range();
    if !(lambda >= lo && lambda <= hi) {
        return Err(Error::InvalidArgument(format!("λ = {lambda} lies outside [{lo}, {hi}]")));
    }
    let x = invert_monotone(|x| f.f1(x), lambda, 0.0, 2.0);
    let miss = (f.f1(x) - lambda).abs();
    if miss > 1e-13 * lambda.abs().max(1.0) {
        return Err(Error::NotSimpleLoop(format!("f1 is not invertible at λ = {lambda} (residual {miss:e})")));
    }
    Ok(x)
}

/// Chebyshev series with the first coefficient halved: `Σ' c_j T_j(t)`.
fn cheb_eval(c: &[f64], t: f64) -> f64 {
    let (mut d, mut dd) = (0.0, 0.0);
    for &cj in c[1..].iter().rev() {
        let sv = d;
        d = 2.0 * t * d - dd + cj;
        dd = sv;
    }
    t * d - dd + 0.5 * c[0]
}

fn cheb_derivative(c: &[f64]) -> Vec<f64> {
    let n = c.len();
    if n <= 1 {
        return vec![0.0];
    }
    let mut d = vec![0.0; n];
    d[n - 2] = 2.0 * (n - 1) as f64 * c[n - 1];
    for j in (0..n.saturating_sub(2)).rev() {
        d[j] = d[j + 2] + 2.0 * (j + 1) as f64 * c[j + 1];
    }
    d.truncate(n - 1);
    d
}
