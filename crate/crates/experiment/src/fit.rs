//! Straight-line fits of the maximal mean coherence: power law in `k`,
//! exponential in `eta`.

use serde::Serialize;

use crate::error::{ExperimentError, Result};
use crate::table::ResultTable;

/// Fewer points than this in a restricted range skip the fit.
pub const MIN_POINTS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitRanges {
    /// Power-law fits use `k >= k_min`.
    pub k_min: f64,
    /// Exponential fits use `eta <= eta_max`.
    pub eta_max: f64,
}

impl Default for FitRanges {
    fn default() -> Self {
        Self { k_min: 1.0, eta_max: 0.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Ordinary least squares `y = slope x + intercept`.
pub fn least_squares(x: &[f64], y: &[f64]) -> LineFit {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x.iter().zip(y).map(|(a, b)| (b - slope * a - intercept).powi(2)).sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    LineFit { slope, intercept, r_squared, points: x.len() }
}

/// `C ~ 1 / k^exponent` at fixed `eta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub eta: f64,
    pub exponent: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// `C ~ exp(rate * eta)` at fixed `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentialFit {
    pub k: f64,
    pub rate: f64,
    pub r_squared: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct FitReport {
    pub power_laws: Vec<PowerLawFit>,
    pub exponentials: Vec<ExponentialFit>,
    /// Skipped fits and dropped points.
    pub notices: Vec<String>,
}

fn distinct(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Fits every `eta` slice in `k` and every `k` slice in `eta` of a table with
/// `k`, `eta` and `cn_max` columns.
pub fn fit_scalings(table: &ResultTable, ranges: FitRanges) -> Result<FitReport> {
    let col = |name: &str| {
        table
            .column(name)
            .ok_or_else(|| ExperimentError::Config(format!("table {} has no {name} column", table.name)))
    };
    let (k, eta, c) = (col("k")?, col("eta")?, col("cn_max")?);
    let points: Vec<(f64, f64, f64)> = k.into_iter().zip(eta).zip(c).map(|((k, e), c)| (k, e, c)).collect();
    let mut report = FitReport::default();

    let points: Vec<(f64, f64, f64)> = points
        .into_iter()
        .filter(|&(k, e, c)| {
            let ok = c > 0.0 && c.is_finite();
            if !ok {
                report.notices.push(format!("dropped non-positive cn_max {c} at k={k}, eta={e}"));
            }
            ok
        })
        .collect();

    for e in distinct(points.iter().map(|p| p.1).collect()) {
        let (mut x, mut y) = (Vec::new(), Vec::new());
        for &(k, pe, c) in &points {
            if pe == e && k >= ranges.k_min {
                x.push(k.ln());
                y.push(c.ln());
            }
        }
        if x.len() < MIN_POINTS {
            report.notices.push(format!("power-law fit at eta={e} skipped: {} points with k >= {}", x.len(), ranges.k_min));
            continue;
        }
        let f = least_squares(&x, &y);
        report.power_laws.push(PowerLawFit { eta: e, exponent: -f.slope, r_squared: f.r_squared, points: f.points });
    }

    for k in distinct(points.iter().map(|p| p.0).collect()) {
        let (mut x, mut y) = (Vec::new(), Vec::new());
        for &(pk, e, c) in &points {
            if pk == k && e <= ranges.eta_max {
                x.push(e);
                y.push(c.ln());
            }
        }
        if x.len() < MIN_POINTS {
            report.notices.push(format!("exponential fit at k={k} skipped: {} points with eta <= {}", x.len(), ranges.eta_max));
            continue;
        }
        let f = least_squares(&x, &y);
        report.exponentials.push(ExponentialFit { k, rate: f.slope, r_squared: f.r_squared, points: f.points });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::Column;

    fn table(f: impl Fn(f64, f64) -> f64, ks: &[f64], etas: &[f64]) -> ResultTable {
        let mut t = ResultTable::new("cn_max", vec![Column::new("k", "J"), Column::new("eta", "1"), Column::new("cn_max", "1")]);
        for &k in ks {
            for &e in etas {
                t.push(vec![k, e, f(k, e)]);
            }
        }
        t
    }

    #[test]
    fn exact_power_law() {
        let t = table(|k, _| 5.0 / (k * k), &[0.5, 1.0, 2.0, 4.0, 8.0], &[0.3]);
        let r = fit_scalings(&t, FitRanges::default()).unwrap();
        assert_eq!(r.power_laws.len(), 1);
        assert!((r.power_laws[0].exponent - 2.0).abs() < 1e-10);
        assert!((r.power_laws[0].r_squared - 1.0).abs() < 1e-12);
        assert_eq!(r.power_laws[0].points, 4);
    }

    #[test]
    fn exact_exponential() {
        let t = table(|_, e| 0.1 * (3.0 * e).exp(), &[2.0], &[0.1, 0.2, 0.3, 0.4, 0.5, 0.9]);
        let r = fit_scalings(&t, FitRanges::default()).unwrap();
        assert_eq!(r.exponentials.len(), 1);
        assert!((r.exponentials[0].rate - 3.0).abs() < 1e-10);
        assert_eq!(r.exponentials[0].points, 5);
    }

    #[test]
    fn sparse_ranges_are_skipped_with_a_notice() {
        let t = table(|k, e| e / k, &[0.5, 1.0, 2.0], &[0.1, 0.9]);
        let r = fit_scalings(&t, FitRanges::default()).unwrap();
        assert!(r.power_laws.is_empty() && r.exponentials.is_empty());
        assert_eq!(r.notices.len(), 5);
    }

    #[test]
    fn missing_column_is_reported() {
        let t = ResultTable::new("x", vec![Column::new("k", "J")]);
        assert!(fit_scalings(&t, FitRanges::default()).is_err());
    }
}
