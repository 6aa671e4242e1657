//! Preconditioners: sparse approximate inverse, restricted additive
//! Schwarz, Hiptmair-Xu auxiliary space and block low-rank LU.

pub mod blr;
pub mod hx;
pub mod ras;
pub mod spai;

/// Key/value statistics gathered while building a preconditioner.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SetupReport {
    pub setup_time: f64,
    pub stats: Vec<(String, String)>,
}

impl SetupReport {
    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.stats.push((key.to_string(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.stats.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}
