//! Physicality audit of stored state snapshots.

use std::collections::BTreeMap;

use num_complex::Complex;
use serde::Serialize;

use qwalk_core::linalg::CMatrix;
use qwalk_core::{validate_state, DensityMatrix64, Tolerances};

use crate::error::{ExperimentError, Result};
use crate::table::ResultTable;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditViolation {
    pub k: f64,
    pub eta: f64,
    pub t: f64,
    pub failed: Vec<String>,
    pub min_eigenvalue: f64,
    pub trace_deviation: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct AuditReport {
    pub states_checked: usize,
    pub violations: Vec<AuditViolation>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Rebuilds every `(k, eta, t)` snapshot of a `states` table and validates it.
pub fn audit_states(table: &ResultTable, tol: &Tolerances<f64>) -> Result<AuditReport> {
    let idx = |name: &str| {
        table
            .column_index(name)
            .ok_or_else(|| ExperimentError::Config(format!("table {} has no {name} column", table.name)))
    };
    let [k, eta, t, i, j, re, im] = ["k", "eta", "t", "i", "j", "re", "im"].map(idx);
    let (k, eta, t, i, j, re, im) = (k?, eta?, t?, i?, j?, re?, im?);

    let mut groups: BTreeMap<(u64, u64, u64), Vec<(usize, usize, Complex<f64>)>> = BTreeMap::new();
    for row in &table.rows {
        let key = (row[k].to_bits(), row[eta].to_bits(), row[t].to_bits());
        groups.entry(key).or_default().push((row[i] as usize, row[j] as usize, Complex::new(row[re], row[im])));
    }

    let mut report = AuditReport::default();
    for ((kb, eb, tb), entries) in groups {
        let dim = entries.iter().map(|e| e.0.max(e.1)).max().unwrap_or(0);
        if dim < 2 || entries.len() != dim * dim || entries.iter().any(|e| e.0 == 0 || e.1 == 0) {
            return Err(ExperimentError::Config(format!(
                "incomplete snapshot at k={}, eta={}, t={}",
                f64::from_bits(kb),
                f64::from_bits(eb),
                f64::from_bits(tb)
            )));
        }
        let mut m = CMatrix::zeros(dim);
        for (a, b, z) in entries {
            m[(a - 1, b - 1)] = z;
        }
        let r = validate_state(&DensityMatrix64::from_matrix(m), tol);
        report.states_checked += 1;
        if !r.is_valid() {
            report.violations.push(AuditViolation {
                k: f64::from_bits(kb),
                eta: f64::from_bits(eb),
                t: f64::from_bits(tb),
                failed: r.violations().into_iter().map(String::from).collect(),
                min_eigenvalue: r.min_eigenvalue,
                trace_deviation: r.trace_deviation,
            });
        }
    }
    Ok(report)
}
