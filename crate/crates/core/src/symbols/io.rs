use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{halpha_coeffs, FourierSymbol, LoopSource, SimpleLoopSymbol, SingularSymbol, Symbol};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SymbolKind {
    Fourier,
    Singular,
}

/// On-disk form. For `singular` symbols `coeffs` describes `c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolDoc {
    pub kind: SymbolKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub coeffs: Vec<(i64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

#[derive(Debug, Clone)]
pub enum AnySymbol {
    Fourier(FourierSymbol),
    Singular(SingularSymbol),
}

impl AnySymbol {
    /// Singular symbols get closed-form coefficients through `order`.
    pub fn from_doc(doc: &SymbolDoc, order: usize) -> Result<Self> {
        let max = doc.coeffs.iter().map(|(j, _)| j.unsigned_abs() as usize).max().unwrap_or(0);
        let mut coeffs = vec![0.0; max + 1];
        let mut seen = vec![None::<f64>; max + 1];
        for &(j, v) in &doc.coeffs {
            let i = j.unsigned_abs() as usize;
            match seen[i] {
                Some(prev) if prev != v => {
                    return Err(Error::InvalidArgument(format!("ĥ({j}) = {v} but ĥ({}) = {prev}: symbol is not even", -j)));
                }
                Some(_) => {}
                None => {
                    seen[i] = Some(v);
                    coeffs[i] = v;
                }
            }
        }
        let c = FourierSymbol::new(coeffs, doc.s.unwrap_or(0.0))?;
        let c = match &doc.name {
            Some(n) => c.named(n.clone()),
            None => c,
        };
        match doc.kind {
            SymbolKind::Fourier => {
                if doc.alpha.is_some() {
                    return Err(Error::InvalidArgument("`alpha` is only meaningful for singular symbols".into()));
                }
                Ok(AnySymbol::Fourier(c))
            }
            SymbolKind::Singular => {
                let alpha = doc
                    .alpha
                    .ok_or_else(|| Error::InvalidArgument("singular symbol needs `alpha`".into()))?;
                Ok(AnySymbol::Singular(halpha_coeffs(alpha, c, order)?))
            }
        }
    }

    pub fn load(path: &Path, order: usize) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let doc: SymbolDoc = serde_json::from_str(&text)?;
        Self::from_doc(&doc, order)
    }

    pub fn to_doc(&self) -> SymbolDoc {
        let (kind, alpha, c) = match self {
            AnySymbol::Fourier(f) => (SymbolKind::Fourier, None, f),
            AnySymbol::Singular(h) => (SymbolKind::Singular, Some(h.alpha()), h.c()),
        };
        SymbolDoc {
            kind,
            alpha,
            coeffs: c.coeffs().iter().enumerate().map(|(j, &v)| (j as i64, v)).collect(),
            s: Some(c.decay_exponent()).filter(|s| s.is_finite()),
            name: Some(c.name().to_string()),
        }
    }

    pub fn as_symbol(&self) -> &dyn Symbol {
        match self {
            AnySymbol::Fourier(f) => f,
            AnySymbol::Singular(h) => h,
        }
    }

    /// Makes sure coefficients are known through `order`.
    pub fn ensure_order(&mut self, order: usize) {
        if let AnySymbol::Singular(h) = self {
            if h.order() < order {
                *h = h.with_order(order);
            }
        }
    }

    pub fn as_loop(&self) -> Result<SimpleLoopSymbol> {
        match self {
            AnySymbol::Fourier(f) => SimpleLoopSymbol::from_fourier(f.clone()),
            AnySymbol::Singular(h) => SimpleLoopSymbol::from_singular(h.clone()),
        }
    }

    /// Wraps as a loop without checking shape.
    pub fn as_loop_unchecked(&self) -> SimpleLoopSymbol {
        SimpleLoopSymbol::new(match self {
            AnySymbol::Fourier(f) => LoopSource::Fourier(f.clone()),
            AnySymbol::Singular(h) => LoopSource::Singular(h.clone()),
        })
    }
}

/// Builtin symbols:
///
/// * `tridiag`: `2 − 2cos θ`
/// * `loop1`: `f1(x) = x + x²/4`
/// * `ar1`: `1/|1 − 0.5χ|²`, coefficients `(4/3)·0.5^{|k|}`
/// * `one`: the constant 1
/// * `halpha:α[:one|cos]`: `(2 − 2cos θ)^α c(θ)` with `c = 1` or `1 + 0.3cos θ`
pub fn parse_preset(spec: &str, order: usize) -> Result<AnySymbol> {
    let bad = || Error::InvalidArgument(format!("unknown preset `{spec}`"));
    let fourier = |c: Vec<f64>, s: f64, name: &str| -> Result<AnySymbol> {
        Ok(AnySymbol::Fourier(FourierSymbol::new(c, s)?.named(name)))
    };
    match spec {
        "tridiag" => fourier(vec![2.0, -1.0], f64::INFINITY, "tridiag"),
        "loop1" => fourier(vec![1.375, -0.75, 0.0625], f64::INFINITY, "loop1"),
        "one" => fourier(vec![1.0], f64::INFINITY, "one"),
        "ar1" => {
            let c = (0..=80).map(|k| 4.0 / 3.0 * 0.5f64.powi(k)).collect();
            fourier(c, f64::INFINITY, "ar1")
        }
        _ => {
            let rest = spec.strip_prefix("halpha:").ok_or_else(bad)?;
            let mut parts = rest.split(':');
            let alpha: f64 = parts.next().and_then(|a| a.parse().ok()).ok_or_else(bad)?;
            let c = match parts.next() {
                None | Some("one") => FourierSymbol::constant(1.0).named("one"),
                Some("cos") => FourierSymbol::new(vec![1.0, 0.15], f64::INFINITY)?.named("1+0.3cos"),
                Some(_) => return Err(bad()),
            };
            if parts.next().is_some() {
                return Err(bad());
            }
            Ok(AnySymbol::Singular(halpha_coeffs(alpha, c, order)?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets() {
        let t = parse_preset("tridiag", 0).unwrap();
        assert_eq!(t.as_symbol().first_column(3).unwrap(), vec![2.0, -1.0, 0.0, 0.0]);
        let l = parse_preset("loop1", 0).unwrap().as_loop().unwrap();
        assert!((l.f1(1.0) - 1.25).abs() < 1e-15);
        let h = parse_preset("halpha:0.75:cos", 64).unwrap();
        assert!(matches!(h, AnySymbol::Singular(ref s) if s.order() == 64 && s.alpha() == 0.75));
        let ar = parse_preset("ar1", 0).unwrap();
        assert!((ar.as_symbol().value(0.0) - 4.0).abs() < 1e-12);
        for bad in ["nope", "halpha:x", "halpha:0.5", "halpha:0.3:sin", "halpha:0.3:one:x"] {
            assert!(parse_preset(bad, 8).is_err(), "{bad}");
        }
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"kind": "singular", "alpha": 0.25, "coeffs": [[-1, 0.15], [0, 1.0], [1, 0.15]], "s": 3}"#;
        let doc: SymbolDoc = serde_json::from_str(text).unwrap();
        let sym = AnySymbol::from_doc(&doc, 32).unwrap();
        let again = AnySymbol::from_doc(&sym.to_doc(), 32).unwrap();
        assert_eq!(sym.as_symbol().first_column(32).unwrap(), again.as_symbol().first_column(32).unwrap());
    }

    #[test]
    fn json_rejections() {
        let odd = r#"{"kind": "fourier", "coeffs": [[-1, 0.2], [0, 1.0], [1, 0.15]]}"#;
        assert!(AnySymbol::from_doc(&serde_json::from_str(odd).unwrap(), 8).is_err());
        let unknown = r#"{"kind": "fourier", "coeffs": [[0, 1.0]], "extra": 1}"#;
        assert!(serde_json::from_str::<SymbolDoc>(unknown).is_err());
        let no_alpha = r#"{"kind": "singular", "coeffs": [[0, 1.0]]}"#;
        assert!(AnySymbol::from_doc(&serde_json::from_str(no_alpha).unwrap(), 8).is_err());
    }
}
