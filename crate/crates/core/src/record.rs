//! Sampled observables along a trajectory (or their ensemble statistics).

use crate::scalar::Real;
use crate::two_site::BlochVector;

/// Which built-in observables a run records at every sample.
///
/// The mean coherence and the purity are always recorded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Recording {
    pub densities: bool,
    pub bond_coherence: bool,
    /// Only honoured for `L = 2`.
    pub bloch: bool,
    /// Position variance around the initial site.
    pub variance: bool,
    pub states: bool,
}

impl Recording {
    pub fn all() -> Self {
        Self { densities: true, bond_coherence: true, bloch: true, variance: true, states: true }
    }
}

/// Observables sampled at `times`. Per-sample vectors are indexed by sample
/// first; empty vectors mean "not recorded".
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TimeSeriesRecord<T> {
    pub times: Vec<T>,
    pub mean_coherence: Vec<T>,
    pub purity: Vec<T>,
    /// `densities[s][i - 1]` is `<n_i>` at sample `s`.
    pub densities: Vec<Vec<T>>,
    /// `bond_coherence[s][b - 1]` is `C_N(rho, b)` at sample `s`.
    pub bond_coherence: Vec<Vec<T>>,
    pub bloch: Vec<BlochVector<T>>,
    pub variance: Vec<T>,
    /// Named scalar series from user observers.
    pub custom: Vec<(String, Vec<T>)>,
}

impl<T: Real> TimeSeriesRecord<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn custom_series(&self, name: &str) -> Option<&[T]> {
        self.custom.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    /// All observable values (not the times) in a fixed order.
    pub(crate) fn flatten(&self) -> Vec<T> {
        let mut out = Vec::new();
        out.extend_from_slice(&self.mean_coherence);
        out.extend_from_slice(&self.purity);
        self.densities.iter().for_each(|v| out.extend_from_slice(v));
        self.bond_coherence.iter().for_each(|v| out.extend_from_slice(v));
        self.bloch.iter().for_each(|b| out.extend_from_slice(&[b.x, b.y, b.z]));
        out.extend_from_slice(&self.variance);
        self.custom.iter().for_each(|(_, v)| out.extend_from_slice(v));
        out
    }

    /// Inverse of [`flatten`](Self::flatten) using `self` as the shape template.
    pub(crate) fn with_values(&self, flat: &[T]) -> Self {
        let mut it = flat.iter().copied();
        let mut take = |n: usize| -> Vec<T> { it.by_ref().take(n).collect() };
        let mean_coherence = take(self.mean_coherence.len());
        let purity = take(self.purity.len());
        let densities = self.densities.iter().map(|v| take(v.len())).collect();
        let bond_coherence = self.bond_coherence.iter().map(|v| take(v.len())).collect();
        let bloch = (0..self.bloch.len())
            .map(|_| {
                let v = take(3);
                BlochVector::new(v[0], v[1], v[2])
            })
            .collect();
        let variance = take(self.variance.len());
        let custom = self.custom.iter().map(|(n, v)| (n.clone(), take(v.len()))).collect();
        Self {
            times: self.times.clone(),
            mean_coherence,
            purity,
            densities,
            bond_coherence,
            bloch,
            variance,
            custom,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flatten_roundtrip() {
        let r = TimeSeriesRecord::<f64> {
            times: vec![0.0, 0.5],
            mean_coherence: vec![0.1, 0.2],
            purity: vec![1.0, 0.9],
            densities: vec![vec![1.0, 0.0], vec![0.6, 0.4]],
            bond_coherence: vec![vec![0.1], vec![0.2]],
            bloch: vec![BlochVector::new(0.0, 0.0, 1.0), BlochVector::new(0.0, 0.3, 0.2)],
            variance: vec![0.0, 0.24],
            custom: vec![("x".into(), vec![3.0, 4.0])],
        };
        let flat = r.flatten();
        assert_eq!(flat.len(), 2 + 2 + 4 + 2 + 6 + 2 + 2);
        assert_eq!(r.with_values(&flat), r);
        assert_eq!(r.custom_series("x"), Some(&[3.0, 4.0][..]));
    }
}
