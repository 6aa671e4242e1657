//! TOML case files.
//!
//! ```toml
//! threads = 2
//! rtol = 1e-8
//!
//! [[case]]
//! k = 6.283185307179586
//! ppw = 10
//! solver = "hx:precond"
//!
//! [[case]]
//! k = 1.0
//! n = 8
//! solver = "gmres"
//! expect_convergence = false
//! ```

use std::path::Path;

use maxlab_core::bench::BenchCase;
use maxlab_core::krylov::KrylovConfig;
use maxlab_core::{Error, Result};
use serde::Deserialize;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub threads: Option<usize>,
    pub rtol: Option<f64>,
    pub max_iter: Option<usize>,
    pub restart: Option<usize>,
    #[serde(default, rename = "case")]
    pub cases: Vec<CaseEntry>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseEntry {
    pub k: f64,
    pub ppw: Option<f64>,
    pub n: Option<usize>,
    #[serde(default = "one")]
    pub scale: f64,
    pub solver: String,
    #[serde(default = "yes")]
    pub scatterer: bool,
    #[serde(default = "yes")]
    pub expect_convergence: bool,
    pub rtol: Option<f64>,
    pub max_iter: Option<usize>,
    pub label: Option<String>,
}

fn one() -> f64 {
    1.0
}

fn yes() -> bool {
    true
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("case file: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Cases with file-level Krylov settings applied beneath per-case ones.
    pub fn to_cases(&self) -> Result<Vec<BenchCase>> {
        let mut base = KrylovConfig::default();
        if let Some(r) = self.rtol {
            base.rtol = r;
        }
        if let Some(m) = self.max_iter {
            base.max_iter = m;
        }
        base.restart = self.restart.or(base.restart);
        self.cases
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let mut case = match (c.n, c.ppw) {
                    (Some(n), _) => BenchCase::with_n(c.k, n, c.scale, &c.solver),
                    (None, Some(ppw)) => BenchCase::new(c.k, ppw, c.scale, &c.solver),
                    (None, None) => return Err(Error::Config(format!("case {i}: give either n or ppw"))),
                };
                case.scatterer = c.scatterer;
                case.expect_convergence = c.expect_convergence;
                case.krylov = base.clone();
                if let Some(r) = c.rtol {
                    case.krylov.rtol = r;
                }
                if let Some(m) = c.max_iter {
                    case.krylov.max_iter = m;
                }
                case.krylov.validate()?;
                case.row = c.label.clone().unwrap_or_else(|| format!("case {i}"));
                Ok(case)
            })
            .collect()
    }
}
