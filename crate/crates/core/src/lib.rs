//! Single-particle quantum walk on an open chain under continuous,
//! inefficient density measurement.
//!
//! The crate integrates the stochastic master equation with a
//! trace-preserving Kraus scheme, averages trajectories, and measures the
//! configuration coherence of the resulting states. All numerics are generic
//! over [`Real`] (`f32` or `f64`); the `*64` / `*32` aliases below fix the
//! scalar for callers that do not care.

pub mod entanglement;
pub mod error;
pub mod linalg;
pub mod params;
pub mod record;
pub mod scalar;
pub mod sme;
pub mod state;
pub mod trajectory;
pub mod two_site;

pub use entanglement::{
    coherence_profile, config_coherence, max_mean_coherence, mean_coherence, negativity_from_coherence,
    CoherenceProfile,
};
pub use error::{Error, Result};
pub use linalg::CMatrix;
pub use params::{Scheme, SimulationParams};
pub use record::{Recording, TimeSeriesRecord};
pub use scalar::Real;
pub use sme::{
    euler_maruyama_step, kraus_operator, kraus_step, lindblad_drift, plain_kraus_step, sample_wiener, sme_terms,
    trajectory_rng, trajectory_seed, KrausOperator, KrausStepper, WienerIncrements, BREAKDOWN_TRACE,
};
pub use state::{
    build_hamiltonian, build_propagator, init_localized, local_densities, position_variance, validate_state,
    DensityMatrix, Hamiltonian, Propagator, Tolerances, ValidationReport,
};
pub use trajectory::{
    map_trajectories, run_ensemble, run_trajectory, run_trajectory_indexed, EnsembleResult, FnObserver, Observer, TrajectoryResult,
};
pub use two_site::{
    analytical_cn_eta0, avg_pure_state_coherence, bloch_disk_histogram, bloch_from_rho, bloch_sde_step,
    rho_from_bloch, small_eta_stationary_moments, BlochDiskHistogram, BlochVector, StationaryMoments,
};

pub type DensityMatrix64 = DensityMatrix<f64>;
pub type DensityMatrix32 = DensityMatrix<f32>;
pub type Hamiltonian64 = Hamiltonian<f64>;
pub type Propagator64 = Propagator<f64>;
pub type SimulationParams64 = SimulationParams<f64>;
pub type SimulationParams32 = SimulationParams<f32>;
pub type TrajectoryResult64 = TrajectoryResult<f64>;
pub type EnsembleResult64 = EnsembleResult<f64>;
pub type TimeSeriesRecord64 = TimeSeriesRecord<f64>;
pub type BlochVector64 = BlochVector<f64>;
pub type CMatrix64 = CMatrix<f64>;
