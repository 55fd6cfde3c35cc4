use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::symbols::{parse_preset, AnySymbol};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Spectrum,
    Phase,
    Predictor,
    Fraclap,
    FraclapApply,
    Invert,
    Bench,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum SymbolSpec {
    Preset(String),
    File(PathBuf),
}

impl SymbolSpec {
    /// Loads the symbol with `ĥ` resolved through `order` where that applies.
    pub fn load(&self, order: usize) -> Result<AnySymbol> {
        match self {
            SymbolSpec::Preset(p) => parse_preset(p, order),
            SymbolSpec::File(path) => AnySymbol::load(path, order),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    /// Report destination; stdout when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub json: Option<PathBuf>,
    /// The command's table (spectrum, phase curve, modes, apply grid).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    /// Wall-clock timings; stderr when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<PathBuf>,
}

/// Command-specific settings; each command ignores the ones it does not use.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    #[serde(default)]
    pub dense_check: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub local: Option<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dump_matrix: Option<PathBuf>,
    /// Number of `θ₀` points in the phase curve.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kmin: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kmax: Option<usize>,
    /// `one` or `cos` for the regular factor of `h_α`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l_prime: Option<f64>,
    #[serde(default)]
    pub bump: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_prime: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runs: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: CommandKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbol: Option<SymbolSpec>,
    /// Matrix index `N` (size `N + 1`); the predictor degree `M` for `predictor`.
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub output: Output,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub options: Options,
}

/// Recognised tolerance keys and their defaults.
pub const TOLERANCES: &[(&str, f64)] = &[
    ("dense", 1e-8),
    ("residual", 1e-12),
    ("bijection", 1e-5),
    ("spectral", 1e-8),
    ("overlap", 0.95),
    ("invert", 1e-8),
    ("matvec", 1e-10),
];

impl RunConfig {
    pub fn new(command: CommandKind, n: usize) -> Self {
        Self {
            command,
            symbol: None,
            n,
            tolerances: BTreeMap::new(),
            output: Output::default(),
            seed: 0,
            options: Options::default(),
        }
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let cfg: Self = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidArgument(format!("N = {} must be at least 2", self.n)));
        }
        for (k, &v) in &self.tolerances {
            if !TOLERANCES.iter().any(|(name, _)| name == k) {
                let known: Vec<&str> = TOLERANCES.iter().map(|t| t.0).collect();
                return Err(Error::InvalidArgument(format!("unknown tolerance `{k}` (known: {})", known.join(", "))));
            }
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!("tolerance `{k}` = {v} must be positive")));
            }
        }
        let needs_symbol = matches!(
            self.command,
            CommandKind::Spectrum | CommandKind::Phase | CommandKind::Predictor | CommandKind::Invert | CommandKind::Bench
        );
        if needs_symbol && self.symbol.is_none() {
            return Err(Error::InvalidArgument("a symbol (preset or file) is required".into()));
        }
        Ok(())
    }

    pub fn tol(&self, key: &str) -> f64 {
        self.tolerances.get(key).copied().unwrap_or_else(|| {
            TOLERANCES.iter().find(|t| t.0 == key).map(|t| t.1).expect("known tolerance key")
        })
    }
}
