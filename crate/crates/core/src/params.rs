use crate::error::{Error, Result};
use crate::scalar::Real;

/// Which Kraus update integrates the stochastic master equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    /// Half-step propagators on both sides of a diagonal Kraus operator.
    #[default]
    Improved,
    /// Single Kraus operator with the Hamiltonian folded in to first order.
    Plain,
}

/// Physical and numerical knobs of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationParams<T> {
    pub chain_length: usize,
    pub hopping: T,
    /// Measurement strength, in units of the hopping.
    pub k: T,
    /// Readout efficiency in `[0, 1]`.
    pub eta: T,
    pub dt: T,
    pub t_final: T,
    pub seed: u64,
    pub n_traj: usize,
    /// 1-based site the particle starts on.
    pub init_site: usize,
    /// Record every `sample_stride`-th step (steps 0 and `n_steps` are always recorded).
    pub sample_stride: usize,
    pub scheme: Scheme,
}

impl<T: Real> SimulationParams<T> {
    /// Defaults: `J = 1`, particle on site 1, one trajectory, every step sampled.
    pub fn new(chain_length: usize, k: T, eta: T, dt: T, t_final: T) -> Self {
        Self {
            chain_length,
            hopping: T::one(),
            k,
            eta,
            dt,
            t_final,
            seed: 0,
            n_traj: 1,
            init_site: 1,
            sample_stride: 1,
            scheme: Scheme::Improved,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_trajectories(mut self, n: usize) -> Self {
        self.n_traj = n;
        self
    }

    pub fn with_init_site(mut self, site: usize) -> Self {
        self.init_site = site;
        self
    }

    pub fn with_sample_stride(mut self, stride: usize) -> Self {
        self.sample_stride = stride;
        self
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    /// `ceil(t_final / dt)`, ignoring round-off just above an integer.
    pub fn n_steps(&self) -> usize {
        let ratio = (self.t_final / self.dt).to_f64_lossy();
        let nearest = ratio.round();
        if (ratio - nearest).abs() <= 1e-9 * nearest.max(1.0) {
            nearest as usize
        } else {
            ratio.ceil() as usize
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.hopping, self.k, self.eta, self.dt, self.t_final];
        if finite.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("simulation parameter".into()));
        }
        if self.chain_length < 2 {
            return Err(Error::InvalidDimension(format!(
                "chain length must be >= 2, got {}",
                self.chain_length
            )));
        }
        if self.k < T::zero() {
            return Err(Error::InvalidArgument(format!("k must be >= 0, got {}", self.k)));
        }
        if self.eta < T::zero() || self.eta > T::one() {
            return Err(Error::InvalidArgument(format!("eta must lie in [0, 1], got {}", self.eta)));
        }
        if self.dt <= T::zero() || self.t_final <= T::zero() {
            return Err(Error::InvalidArgument("dt and t_final must be positive".into()));
        }
        if self.n_traj == 0 || self.sample_stride == 0 {
            return Err(Error::InvalidArgument("n_traj and sample_stride must be positive".into()));
        }
        if self.init_site == 0 || self.init_site > self.chain_length {
            return Err(Error::InvalidArgument(format!(
                "init_site {} outside 1..={}",
                self.init_site, self.chain_length
            )));
        }
        let kdt = self.k * self.dt;
        if kdt > T::of(0.1) {
            return Err(Error::InvalidArgument(format!("k * dt = {kdt} exceeds 0.1")));
        }
        if kdt > T::of(0.01) {
            log::warn!("k * dt = {kdt} is above 0.01; discretization error may be visible");
        }
        Ok(())
    }
}
