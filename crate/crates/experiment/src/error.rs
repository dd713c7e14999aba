use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("malformed table {path}: {reason}")]
    Malformed { path: PathBuf, reason: String },
    #[error(transparent)]
    Simulation(#[from] qwalk_core::Error),
}

impl ExperimentError {
    /// Process exit status for this failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) | Self::Simulation(_) => 2,
            Self::Io { .. } | Self::Csv { .. } | Self::Json { .. } | Self::Malformed { .. } => 3,
        }
    }
}

pub type Result<T, E = ExperimentError> = std::result::Result<T, E>;
