//! Quantum trajectories and their ensemble averages.
//!
//! A trajectory is a pure function of `(params, trajectory index)`: its random
//! stream is seeded from [`trajectory_seed`], so ensembles are bit-identical
//! regardless of how many threads evaluate them.

use rayon::prelude::*;

use crate::entanglement::coherence_profile;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::params::SimulationParams;
use crate::record::{Recording, TimeSeriesRecord};
use crate::scalar::Real;
use crate::sme::{fill_wiener, trajectory_rng, trajectory_seed, KrausStepper, WienerIncrements};
use crate::state::{init_localized, local_densities, position_variance, DensityMatrix};
use crate::two_site::bloch_from_rho;

/// Scalar observable evaluated at every sample.
pub trait Observer<T>: Sync {
    fn name(&self) -> &str;
    fn observe(&self, rho: &DensityMatrix<T>) -> T;
}

/// Wraps a closure as an [`Observer`].
pub struct FnObserver<F> {
    name: String,
    f: F,
}

impl<F> FnObserver<F> {
    pub fn new(name: impl Into<String>, f: F) -> Self {
        Self { name: name.into(), f }
    }
}

impl<T, F> Observer<T> for FnObserver<F>
where
    F: Fn(&DensityMatrix<T>) -> T + Sync,
{
    fn name(&self) -> &str {
        &self.name
    }

    fn observe(&self, rho: &DensityMatrix<T>) -> T {
        (self.f)(rho)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryResult<T> {
    pub index: usize,
    pub seed: u64,
    pub observables: TimeSeriesRecord<T>,
    pub states: Option<Vec<DensityMatrix<T>>>,
}

impl<T> TrajectoryResult<T> {
    pub fn times(&self) -> &[T] {
        &self.observables.times
    }
}

struct Sampler<'a, T> {
    recording: Recording,
    observers: &'a [&'a dyn Observer<T>],
    origin: usize,
    record: TimeSeriesRecord<T>,
    states: Vec<DensityMatrix<T>>,
}

impl<'a, T: Real> Sampler<'a, T> {
    fn new(recording: Recording, observers: &'a [&'a dyn Observer<T>], origin: usize, capacity: usize) -> Self {
        let mut record = TimeSeriesRecord {
            times: Vec::with_capacity(capacity),
            mean_coherence: Vec::with_capacity(capacity),
            purity: Vec::with_capacity(capacity),
            ..Default::default()
        };
        record.custom = observers.iter().map(|o| (o.name().to_string(), Vec::with_capacity(capacity))).collect();
        Self { recording, observers, origin, record, states: Vec::new() }
    }

    fn sample(&mut self, t: T, rho: &DensityMatrix<T>) {
        let r = &mut self.record;
        r.times.push(t);
        let profile = coherence_profile(rho);
        r.mean_coherence.push(profile.mean);
        r.purity.push(rho.purity());
        if self.recording.bond_coherence {
            r.bond_coherence.push(profile.per_bond);
        }
        if self.recording.densities {
            r.densities.push(local_densities(rho));
        }
        if self.recording.bloch && rho.dim() == 2 {
            r.bloch.push(bloch_from_rho(rho).expect("two sites"));
        }
        if self.recording.variance {
            r.variance.push(position_variance(rho, self.origin));
        }
        for (slot, obs) in r.custom.iter_mut().zip(self.observers) {
            slot.1.push(obs.observe(rho));
        }
        if self.recording.states {
            self.states.push(rho.clone());
        }
    }
}

/// Runs trajectory 0 of `params`.
pub fn run_trajectory<T: Real>(
    params: &SimulationParams<T>,
    recording: Recording,
    observers: &[&dyn Observer<T>],
) -> Result<TrajectoryResult<T>> {
    run_trajectory_indexed(params, 0, recording, observers)
}

/// Runs trajectory `index`: Kraus steps from the localized initial state for
/// `params.n_steps()` steps, sampling every `sample_stride` steps and at the
/// final step.
pub fn run_trajectory_indexed<T: Real>(
    params: &SimulationParams<T>,
    index: usize,
    recording: Recording,
    observers: &[&dyn Observer<T>],
) -> Result<TrajectoryResult<T>> {
    params.validate()?;
    let mut stepper = KrausStepper::new(params)?;
    run_with_stepper(params, &mut stepper, index, recording, observers)
}

fn run_with_stepper<T: Real>(
    params: &SimulationParams<T>,
    stepper: &mut KrausStepper<T>,
    index: usize,
    recording: Recording,
    observers: &[&dyn Observer<T>],
) -> Result<TrajectoryResult<T>> {
    let n = params.chain_length;
    let n_steps = params.n_steps();
    let stride = params.sample_stride;
    let seed = trajectory_seed(params.seed, index);
    let mut rng = trajectory_rng(seed);
    let mut rho = init_localized(n, params.init_site)?;
    let mut sampler = Sampler::new(recording, observers, params.init_site, n_steps / stride + 2);
    sampler.sample(T::zero(), &rho);

    let mut dw = WienerIncrements::zeros(n, params.dt);
    for step in 1..=n_steps {
        fill_wiener(&mut rng, &mut dw);
        stepper
            .step(&mut rho, &dw)
            .map_err(|e| Error::StepFailed { step, source: Box::new(e) })?;
        if step % stride == 0 || step == n_steps {
            sampler.sample(T::from_usize_lossy(step) * params.dt, &rho);
        }
    }

    let Sampler { record, states, .. } = sampler;
    Ok(TrajectoryResult {
        index,
        seed,
        observables: record,
        states: recording.states.then_some(states),
    })
}

/// Ensemble means and standard errors of the mean over `n_traj` trajectories.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleResult<T> {
    pub n_traj: usize,
    pub master_seed: u64,
    pub mean: TimeSeriesRecord<T>,
    pub std_error: TimeSeriesRecord<T>,
    /// Element-wise mean state at every sample (when states are recorded).
    pub mean_states: Option<Vec<DensityMatrix<T>>>,
    /// Standard error of the real and imaginary part of every element of the
    /// mean state, stored as `re + i im`.
    pub state_std_error: Option<Vec<CMatrix<T>>>,
}

impl<T: Real> EnsembleResult<T> {
    pub fn times(&self) -> &[T] {
        &self.mean.times
    }
}

#[derive(Default)]
struct Accumulator<T> {
    template: Option<TimeSeriesRecord<T>>,
    sum: Vec<T>,
    sumsq: Vec<T>,
    state_sum: Vec<CMatrix<T>>,
    state_sq: Vec<CMatrix<T>>,
    count: usize,
}

impl<T: Real> Accumulator<T> {
    fn add(&mut self, traj: TrajectoryResult<T>) {
        let flat = traj.observables.flatten();
        if self.template.is_none() {
            self.sum = vec![T::zero(); flat.len()];
            self.sumsq = vec![T::zero(); flat.len()];
            self.template = Some(traj.observables);
        }
        for ((s, q), v) in self.sum.iter_mut().zip(self.sumsq.iter_mut()).zip(&flat) {
            *s += *v;
            *q += *v * *v;
        }
        if let Some(states) = traj.states {
            if self.state_sum.is_empty() {
                let n = states.first().map_or(0, |s| s.dim());
                self.state_sum = vec![CMatrix::zeros(n); states.len()];
                self.state_sq = vec![CMatrix::zeros(n); states.len()];
            }
            for ((acc, sq), st) in self.state_sum.iter_mut().zip(self.state_sq.iter_mut()).zip(&states) {
                for ((a, q), z) in acc
                    .as_mut_slice()
                    .iter_mut()
                    .zip(sq.as_mut_slice().iter_mut())
                    .zip(st.matrix().as_slice())
                {
                    *a += *z;
                    q.re += z.re * z.re;
                    q.im += z.im * z.im;
                }
            }
        }
        self.count += 1;
    }

    fn std_error(sum: T, sumsq: T, m: T) -> T {
        if m <= T::one() {
            return T::zero();
        }
        let var = ((sumsq - sum * sum / m) / (m - T::one())).max(T::zero());
        (var / m).sqrt()
    }

    fn finish(self, master_seed: u64) -> EnsembleResult<T> {
        let template = self.template.expect("at least one trajectory");
        let m = T::from_usize_lossy(self.count);
        let mean: Vec<T> = self.sum.iter().map(|&s| s / m).collect();
        let se: Vec<T> = self
            .sum
            .iter()
            .zip(&self.sumsq)
            .map(|(&s, &q)| Self::std_error(s, q, m))
            .collect();
        let (mean_states, state_std_error) = if self.state_sum.is_empty() {
            (None, None)
        } else {
            let means = self
                .state_sum
                .iter()
                .map(|s| {
                    let mut s = s.clone();
                    s.scale(T::one() / m);
                    DensityMatrix::from_matrix(s)
                })
                .collect();
            let errs = self
                .state_sum
                .iter()
                .zip(&self.state_sq)
                .map(|(s, q)| {
                    let mut e = CMatrix::zeros(s.dim());
                    for ((o, a), b) in e.as_mut_slice().iter_mut().zip(s.as_slice()).zip(q.as_slice()) {
                        o.re = Self::std_error(a.re, b.re, m);
                        o.im = Self::std_error(a.im, b.im, m);
                    }
                    e
                })
                .collect();
            (Some(means), Some(errs))
        };
        EnsembleResult {
            n_traj: self.count,
            master_seed,
            mean: template.with_values(&mean),
            std_error: template.with_values(&se),
            mean_states,
            state_std_error,
        }
    }
}

/// Trajectories evaluated per parallel batch. Batches are reduced in index
/// order so the floating point summation order never depends on scheduling.
const BATCH: usize = 64;

/// Runs `params.n_traj` trajectories and returns `f` of each, in index order.
pub fn map_trajectories<T, U, F>(
    params: &SimulationParams<T>,
    recording: Recording,
    observers: &[&dyn Observer<T>],
    f: F,
) -> Result<Vec<U>>
where
    T: Real,
    U: Send,
    F: Fn(TrajectoryResult<T>) -> U + Sync,
{
    let mut out = Vec::with_capacity(params.n_traj);
    for_each_batch(params, recording, observers, |traj| {
        out.push(f(traj));
    })?;
    Ok(out)
}

fn for_each_batch<T: Real>(
    params: &SimulationParams<T>,
    recording: Recording,
    observers: &[&dyn Observer<T>],
    mut sink: impl FnMut(TrajectoryResult<T>),
) -> Result<()> {
    params.validate()?;
    let template = KrausStepper::new(params)?;
    let mut start = 0;
    while start < params.n_traj {
        let end = (start + BATCH).min(params.n_traj);
        let batch: Vec<Result<TrajectoryResult<T>>> = (start..end)
            .into_par_iter()
            .map(|index| {
                let mut stepper = template.clone();
                run_with_stepper(params, &mut stepper, index, recording, observers).map_err(|e| {
                    Error::TrajectoryFailed {
                        index,
                        seed: trajectory_seed(params.seed, index),
                        source: Box::new(e),
                    }
                })
            })
            .collect();
        for traj in batch {
            sink(traj?);
        }
        start = end;
    }
    Ok(())
}

/// Runs `params.n_traj` independent trajectories and reduces them.
pub fn run_ensemble<T: Real>(
    params: &SimulationParams<T>,
    recording: Recording,
    observers: &[&dyn Observer<T>],
) -> Result<EnsembleResult<T>> {
    let mut acc = Accumulator::default();
    for_each_batch(params, recording, observers, |traj| acc.add(traj))?;
    Ok(acc.finish(params.seed))
}
