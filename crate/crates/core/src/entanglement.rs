//! Configuration coherence: a mixed-state entanglement measure for a
//! bipartition of the chain at a bond.

use crate::error::{Error, Result};
use crate::record::TimeSeriesRecord;
use crate::scalar::Real;
use crate::state::DensityMatrix;

/// Per-bond configuration coherence and its bond average.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceProfile<T> {
    /// Element `b - 1` holds bond `b`, the cut between sites `b` and `b + 1`.
    pub per_bond: Vec<T>,
    pub mean: T,
}

/// `C_N(rho, b) = 2 sum_{i <= b < j} |<i|rho|j>|^2` for a 1-based bond `b`.
pub fn config_coherence<T: Real>(rho: &DensityMatrix<T>, bond: usize) -> Result<T> {
    let n = rho.dim();
    if bond == 0 || bond >= n {
        return Err(Error::InvalidArgument(format!("bond {bond} outside 1..={}", n - 1)));
    }
    let m = rho.matrix();
    let mut acc = T::zero();
    for i in 0..bond {
        for j in bond..n {
            acc += m[(i, j)].norm_sqr();
        }
    }
    Ok(T::of(2.0) * acc)
}

/// All bonds at once in `O(L^2)`.
///
/// Moving the cut from bond `b - 1` to `b` moves site `b` to the left block:
/// its couplings to sites `< b` leave the cross block and its couplings to
/// sites `> b` enter it.
pub fn coherence_profile<T: Real>(rho: &DensityMatrix<T>) -> CoherenceProfile<T> {
    let n = rho.dim();
    let m = rho.matrix();
    let two = T::of(2.0);
    let mut per_bond = Vec::with_capacity(n.saturating_sub(1));
    let mut block = T::zero();
    for s in 0..n - 1 {
        let leaving: T = (0..s).map(|i| m[(i, s)].norm_sqr()).sum();
        let entering: T = (s + 1..n).map(|j| m[(s, j)].norm_sqr()).sum();
        block = block - leaving + entering;
        per_bond.push(two * block.max(T::zero()));
    }
    let mean = per_bond.iter().copied().sum::<T>() / T::from_usize_lossy(per_bond.len());
    CoherenceProfile { per_bond, mean }
}

/// Bond average of [`config_coherence`].
pub fn mean_coherence<T: Real>(rho: &DensityMatrix<T>) -> T {
    coherence_profile(rho).mean
}

/// Negativity of a single-particle state from its configuration coherence,
/// `N = sqrt(C_N / 2)`.
pub fn negativity_from_coherence<T: Real>(cn: T) -> Result<T> {
    if cn < T::zero() || cn.is_nan() {
        return Err(Error::InvalidArgument(format!("coherence must be >= 0, got {cn}")));
    }
    Ok((cn * T::of(0.5)).sqrt())
}

/// Time and value of the largest sampled mean coherence; ties go to the
/// earliest sample.
pub fn max_mean_coherence<T: Real>(series: &TimeSeriesRecord<T>) -> Result<(T, T)> {
    argmax_series(&series.times, &series.mean_coherence)
}

pub(crate) fn argmax_series<T: Real>(times: &[T], values: &[T]) -> Result<(T, T)> {
    if values.is_empty() || times.len() != values.len() {
        return Err(Error::InvalidArgument("empty or misaligned series".into()));
    }
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    Ok((times[best], values[best]))
}
