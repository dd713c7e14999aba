use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    /// Trace of the unnormalized Kraus update fell to or below the breakdown
    /// threshold. Usually means `dt` is too coarse for `k`.
    #[error("numeric breakdown: unnormalized trace {trace:e} <= {threshold:e}")]
    NumericBreakdown { trace: f64, threshold: f64 },

    #[error("trajectory failed at step {step}: {source}")]
    StepFailed {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("trajectory {index} (seed {seed:#018x}) failed: {source}")]
    TrajectoryFailed {
        index: usize,
        seed: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("contract violation: {0}")]
    ContractViolation(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
