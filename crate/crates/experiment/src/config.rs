//! JSON experiment description.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use qwalk_core::{Scheme, SimulationParams64};

use crate::error::{ExperimentError, Result};
use crate::table1::{table1_defaults, Preset};

pub const FORMAT_VERSION: u32 = 1;

/// Chain length of the many-site presets at desk scale and at full scale.
pub const DESK_CHAIN_LENGTH: usize = 11;
pub const PAPER_CHAIN_LENGTH: usize = 21;

/// Fraction of the tabulated trajectory counts run at desk scale.
pub const DESK_TRAJECTORY_SCALE: f64 = 0.1;

/// Samples recorded per trajectory when no stride is configured.
pub const DEFAULT_SAMPLES: usize = 500;

/// Explicit settings that replace the preset row (and are required for `custom`).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Overrides {
    pub dt: Option<f64>,
    pub t_final: Option<f64>,
    pub n_traj: Option<usize>,
    pub sample_stride: Option<usize>,
    pub init_site: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub format_version: u32,
    pub preset: Preset,
    /// Measurement strengths; the run covers the product `k x eta`.
    pub k: Vec<f64>,
    pub eta: Vec<f64>,
    /// Chain length for `fig3`, `fig4` and `custom`; ignored by two-site presets.
    #[serde(default)]
    pub chain_length: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub emit_states: bool,
    /// Full chain length and trajectory counts instead of desk scale.
    #[serde(default)]
    pub paper_scale: bool,
    #[serde(default)]
    pub overrides: Overrides,
    #[serde(default)]
    pub plain_scheme: bool,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

impl ExperimentConfig {
    /// The parameter grid shown in the corresponding figure.
    pub fn for_preset(preset: Preset) -> Self {
        let (k, eta): (Vec<f64>, Vec<f64>) = match preset {
            Preset::Fig1 => (vec![0.01, 10.0], vec![0.01, 0.99]),
            Preset::Fig2a => (vec![0.1], vec![0.0, 0.5, 1.0]),
            Preset::Fig2b => (vec![2.0], vec![0.0, 0.5, 1.0]),
            Preset::Fig2cd => (
                vec![0.01, 0.03, 0.1, 0.3, 1.0, 3.0, 10.0],
                vec![0.0, 0.01, 0.05, 0.1, 0.25, 0.5, 0.75, 1.0],
            ),
            Preset::Fig3 => (vec![0.5], vec![0.0, 0.5, 1.0]),
            Preset::Fig4 => (
                vec![0.1, 0.2, 0.5, 1.0, 2.0, 4.0, 8.0],
                vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0],
            ),
            Preset::Custom => (vec![1.0], vec![0.5]),
        };
        Self {
            format_version: FORMAT_VERSION,
            preset,
            k,
            eta,
            chain_length: None,
            seed: 0,
            output_dir: default_output_dir(),
            emit_states: false,
            paper_scale: false,
            overrides: Overrides::default(),
            plain_scheme: false,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| ExperimentError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ExperimentError::Io { path: path.to_path_buf(), source })?;
        Self::from_json(&text).map_err(|e| match e {
            ExperimentError::Config(msg) => ExperimentError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.format_version != FORMAT_VERSION {
            return Err(ExperimentError::Config(format!(
                "unsupported format_version {} (expected {FORMAT_VERSION})",
                self.format_version
            )));
        }
        if let Some(k) = self.k.iter().find(|k| !(k.is_finite() && **k > 0.0)) {
            return Err(ExperimentError::Config(format!("grid k values must be finite and > 0, got {k}")));
        }
        if let Some(e) = self.eta.iter().find(|e| !(0.0..=1.0).contains(*e)) {
            return Err(ExperimentError::Config(format!("grid eta values must lie in [0, 1], got {e}")));
        }
        if let Some(l) = self.chain_length.filter(|l| *l < 2) {
            return Err(ExperimentError::Config(format!("chain length must be >= 2, got {l}")));
        }
        let o = &self.overrides;
        for (name, v) in [("dt", o.dt), ("t_final", o.t_final)] {
            if let Some(v) = v.filter(|v| !(v.is_finite() && *v > 0.0)) {
                return Err(ExperimentError::Config(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        if o.n_traj == Some(0) || o.sample_stride == Some(0) {
            return Err(ExperimentError::Config("n_traj and sample_stride must be positive".into()));
        }
        if self.preset == Preset::Custom && (o.dt.is_none() || o.t_final.is_none()) {
            return Err(ExperimentError::Config("custom preset needs overrides.dt and overrides.t_final".into()));
        }
        Ok(())
    }

    /// Chain length used for this preset.
    pub fn effective_chain_length(&self) -> usize {
        if self.preset.is_two_site() {
            return 2;
        }
        self.chain_length
            .unwrap_or(if self.paper_scale { PAPER_CHAIN_LENGTH } else { DESK_CHAIN_LENGTH })
    }

    /// Trajectory count after desk scaling; deterministic runs keep a single one.
    fn scaled_trajectories(&self, tabulated: usize, eta: f64) -> usize {
        if eta == 0.0 {
            return 1;
        }
        if self.paper_scale {
            tabulated
        } else {
            ((tabulated as f64 * DESK_TRAJECTORY_SCALE).round() as usize).max(1)
        }
    }

    /// Parameters of grid cell `(k, eta)`.
    pub fn cell_params(&self, k: f64, eta: f64) -> Result<SimulationParams64> {
        let l = self.effective_chain_length();
        let mut p = if self.preset == Preset::Custom {
            SimulationParams64::new(l, k, eta, 1.0, 1.0)
        } else {
            let mut p = table1_defaults(self.preset, k, eta, l)?;
            p.n_traj = self.scaled_trajectories(p.n_traj, eta);
            p
        };
        let o = &self.overrides;
        p.dt = o.dt.unwrap_or(p.dt);
        p.t_final = o.t_final.unwrap_or(p.t_final);
        p.n_traj = o.n_traj.unwrap_or(p.n_traj);
        p.init_site = o.init_site.unwrap_or(if self.preset.is_two_site() { 1 } else { l.div_ceil(2) });
        p.sample_stride = o.sample_stride.unwrap_or_else(|| match self.preset {
            // only the final state enters the histogram
            Preset::Fig1 => p.n_steps().max(1),
            _ => (p.n_steps() / DEFAULT_SAMPLES).max(1),
        });
        if self.plain_scheme {
            p.scheme = Scheme::Plain;
        }
        p.seed = cell_seed(self.seed, k, eta);
        p.validate()?;
        Ok(p)
    }

    /// `(k, eta)` cells in lexicographic order, duplicates removed.
    pub fn cells(&self) -> Vec<(f64, f64)> {
        let mut k = self.k.clone();
        let mut eta = self.eta.clone();
        for v in [&mut k, &mut eta] {
            v.sort_by(f64::total_cmp);
            v.dedup();
        }
        k.iter().flat_map(|&k| eta.iter().map(move |&e| (k, e))).collect()
    }
}

/// Seed of one grid cell, a function of the master seed and the cell's
/// coordinates only, so it does not depend on the rest of the grid.
pub fn cell_seed(master: u64, k: f64, eta: f64) -> u64 {
    let s = qwalk_core::trajectory_seed(master, k.to_bits() as usize);
    qwalk_core::trajectory_seed(s, eta.to_bits() as usize)
}
