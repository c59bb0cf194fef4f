use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ExperimentConfig;
use crate::error::{Error, Result};
use crate::model::Warning;
use crate::oracle::StateDiagnostics;

pub const CODE_VERSION: &str = concat!("qrsim ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub code_version: String,
    pub config: ExperimentConfig,
    /// Resolved configuration file contents, when the run came from one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub settings: Option<serde_json::Value>,
}

/// Column names, numeric rows, and everything needed to reproduce them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub provenance: Provenance,
    pub warnings: Vec<String>,
    /// Scalars extracted from the rows (peak positions, fitted rates, ...).
    #[serde(default)]
    pub summary: BTreeMap<String, f64>,
}

impl ResultTable {
    pub fn new(columns: &[&str], config: &ExperimentConfig) -> Self {
        ResultTable {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            provenance: Provenance {
                code_version: CODE_VERSION.to_string(),
                config: config.clone(),
                settings: None,
            },
            warnings: Vec::new(),
            summary: BTreeMap::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::DimensionMismatch {
                expected: self.columns.len(),
                got: row.len(),
            });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn summary_value(&self, key: &str) -> Option<f64> {
        self.summary.get(key).copied()
    }

    pub fn set_summary(&mut self, key: &str, value: f64) {
        self.summary.insert(key.to_string(), value);
    }

    /// Adds warnings not already present, in order.
    pub fn add_warnings<I, W>(&mut self, warnings: I)
    where
        I: IntoIterator<Item = W>,
        W: Into<WarningText>,
    {
        for w in warnings {
            let text = w.into().0;
            if !self.warnings.contains(&text) {
                self.warnings.push(text);
            }
        }
    }

    pub fn record_diagnostics(&mut self, d: &StateDiagnostics) {
        let pairs = [
            ("max_trace_error", d.trace_error, f64::max as fn(f64, f64) -> f64),
            ("max_hermiticity_error", d.hermiticity_error, f64::max),
            ("min_eigenvalue", d.min_eigenvalue, f64::min),
            ("max_top_fock_population", d.top_fock_population, f64::max),
        ];
        for (key, value, combine) in pairs {
            if !value.is_finite() {
                continue;
            }
            let merged = self.summary.get(key).map_or(value, |&old| combine(old, value));
            self.summary.insert(key.to_string(), merged);
        }
    }

    /// Rectangular, and every entry finite unless a `warning` column exists.
    pub fn check(&self) -> Result<()> {
        let has_warning_column = self.column_index("warning").is_some();
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != self.columns.len() {
                return Err(Error::DimensionMismatch {
                    expected: self.columns.len(),
                    got: row.len(),
                });
            }
            if !has_warning_column && row.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidExperiment(format!(
                    "row {i} holds a non-finite value without a warning column"
                )));
            }
        }
        if self.summary.values().any(|v| !v.is_finite()) {
            return Err(Error::InvalidExperiment("non-finite summary value".into()));
        }
        Ok(())
    }
}

/// Display form of a warning as stored in tables.
pub struct WarningText(pub String);

impl From<Warning> for WarningText {
    fn from(w: Warning) -> Self {
        WarningText(w.to_string())
    }
}

impl From<&Warning> for WarningText {
    fn from(w: &Warning) -> Self {
        WarningText(w.to_string())
    }
}

impl From<String> for WarningText {
    fn from(s: String) -> Self {
        WarningText(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{ExperimentKind, ExperimentConfig};
    use crate::model::{SystemParams, TimeGrid};

    fn table() -> ResultTable {
        let p = SystemParams {
            omega_q: 5400.0,
            omega_r: 5000.0,
            omega_d: 5000.0,
            g: 20.0,
            kappa: 1.0,
            epsilon: 0.0,
            n_th: 0.2,
            temperature_ratio: None,
        };
        let cfg = ExperimentConfig::new(
            ExperimentKind::RateEquationDemo,
            p,
            TimeGrid::new(0.0, 1.0, 4).unwrap(),
        );
        ResultTable::new(&["a", "b"], &cfg)
    }

    #[test]
    fn rows_must_be_rectangular() {
        let mut t = table();
        t.push_row(vec![1.0, 2.0]).unwrap();
        assert!(t.push_row(vec![1.0]).is_err());
        assert_eq!(t.column("b").unwrap(), vec![2.0]);
        assert!(t.column("c").is_none());
    }

    #[test]
    fn non_finite_needs_warning_column() {
        let mut t = table();
        t.push_row(vec![f64::NAN, 2.0]).unwrap();
        assert!(t.check().is_err());
    }

    #[test]
    fn warnings_are_deduplicated() {
        let mut t = table();
        t.add_warnings([Warning::Other("x".into()), Warning::Other("x".into())]);
        t.add_warnings(vec!["y".to_string()]);
        assert_eq!(t.warnings, vec!["x".to_string(), "y".to_string()]);
    }

    #[test]
    fn diagnostics_merge_worst_case() {
        let mut t = table();
        let a = StateDiagnostics {
            trace_error: 1e-12,
            hermiticity_error: 1e-14,
            min_eigenvalue: -1e-12,
            top_fock_population: 1e-7,
        };
        let b = StateDiagnostics {
            trace_error: 1e-11,
            min_eigenvalue: 1e-3,
            ..a
        };
        t.record_diagnostics(&a);
        t.record_diagnostics(&b);
        assert_eq!(t.summary_value("max_trace_error"), Some(1e-11));
        assert_eq!(t.summary_value("min_eigenvalue"), Some(-1e-12));
    }
}
