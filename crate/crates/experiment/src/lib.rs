//! Figure presets, parameter sweeps and result files for the monitored
//! quantum walk simulator in `qwalk-core`.

pub mod audit;
pub mod config;
pub mod error;
pub mod fit;
pub mod preset;
pub mod table;
pub mod table1;

pub use audit::{audit_states, AuditReport};
pub use config::{ExperimentConfig, Overrides};
pub use error::{ExperimentError, Result};
pub use fit::{fit_scalings, FitRanges, FitReport};
pub use preset::{run_grid, run_preset, run_sweep, RunKind, RunOutcome};
pub use table::{emit_csv, read_csv, Column, ResultTable, RunMetadata};
pub use table1::{stopping_time, table1_defaults, Preset};
