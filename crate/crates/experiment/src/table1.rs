//! Numerical settings per figure: timestep, stopping time and trajectory count.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use qwalk_core::SimulationParams64;

use crate::error::{ExperimentError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Fig1,
    Fig2a,
    Fig2b,
    Fig2cd,
    Fig3,
    Fig4,
    Custom,
}

impl Preset {
    pub const ALL: [Preset; 7] =
        [Self::Fig1, Self::Fig2a, Self::Fig2b, Self::Fig2cd, Self::Fig3, Self::Fig4, Self::Custom];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Fig1 => "fig1",
            Self::Fig2a => "fig2a",
            Self::Fig2b => "fig2b",
            Self::Fig2cd => "fig2cd",
            Self::Fig3 => "fig3",
            Self::Fig4 => "fig4",
            Self::Custom => "custom",
        }
    }

    /// Whether the preset simulates two sites regardless of the configured length.
    pub fn is_two_site(self) -> bool {
        matches!(self, Self::Fig1 | Self::Fig2a | Self::Fig2b | Self::Fig2cd)
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Preset {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| ExperimentError::Config(format!("unknown preset {s:?}")))
    }
}

/// Time after which the ensemble is considered stationary.
///
/// Two sites: the time at which the `eta = 0` coherence envelope has decayed
/// to about `1e-3`, or `5 k` in the overdamped regime. Longer chains:
/// `max((L / 4)^2 k, L)`.
pub fn stopping_time(k: f64, chain_length: usize) -> Result<f64> {
    if !k.is_finite() || k < 0.0 {
        return Err(ExperimentError::Config(format!("measurement strength must be finite and >= 0, got {k}")));
    }
    if chain_length < 2 {
        return Err(ExperimentError::Config(format!("chain length must be >= 2, got {chain_length}")));
    }
    if chain_length == 2 {
        if k <= 0.0 {
            return Err(ExperimentError::Config("no stationary time without measurement (k = 0)".into()));
        }
        if k < 2.0 {
            Ok(-(2e-3 * (1.0 - (k / 2.0).powi(2))).ln() / k)
        } else {
            Ok(5.0 * k)
        }
    } else {
        let l = chain_length as f64;
        Ok(((l / 4.0).powi(2) * k).max(l))
    }
}

fn two_site_dt(k: f64) -> f64 {
    1.0f64.min(1.0 / k) * 1e-3
}

fn listed_count(preset: Preset, eta: f64, half: usize, full: usize) -> Result<usize> {
    match eta {
        e if e == 0.0 => Ok(1),
        e if e == 0.5 => Ok(half),
        e if e == 1.0 => Ok(full),
        _ => Err(ExperimentError::Config(format!("{preset} lists trajectory counts only for eta in {{0, 0.5, 1}}, got {eta}"))),
    }
}

/// Settings of the `preset` row at `(k, eta, L)`. Two-site presets ignore `L`.
/// `custom` has no row and is rejected.
pub fn table1_defaults(preset: Preset, k: f64, eta: f64, chain_length: usize) -> Result<SimulationParams64> {
    if !(k.is_finite() && k > 0.0) {
        return Err(ExperimentError::Config(format!("k must be finite and > 0, got {k}")));
    }
    if !(0.0..=1.0).contains(&eta) {
        return Err(ExperimentError::Config(format!("eta must lie in [0, 1], got {eta}")));
    }
    let (l, dt, t_final, n_traj) = match preset {
        Preset::Fig1 => (2, two_site_dt(k), stopping_time(k, 2)?, 10_000),
        Preset::Fig2a => (2, 1e-3, 10.0 / k, listed_count(preset, eta, 1800, 2200)?),
        Preset::Fig2b => (2, 5e-4, 10.0 / k, listed_count(preset, eta, 1900, 1700)?),
        Preset::Fig2cd => (2, two_site_dt(k), stopping_time(k, 2)?, ((1000.0 * eta).round() as usize).max(100)),
        Preset::Fig3 => (chain_length, 1e-3, 15.0, 100),
        Preset::Fig4 => {
            let n = if eta == 0.0 { 1 } else { 200 * (10.0 * eta * k).ceil() as usize };
            (chain_length, 1.0f64.min(1.0 / k) * 1e-2, stopping_time(k, chain_length)?, n)
        }
        Preset::Custom => return Err(ExperimentError::Config("custom preset has no default settings".into())),
    };
    if l < 2 {
        return Err(ExperimentError::Config(format!("chain length must be >= 2, got {l}")));
    }
    Ok(SimulationParams64::new(l, k, eta, dt, t_final).with_trajectories(n_traj))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stopping_times() {
        assert!((stopping_time(1.0, 2).unwrap() - 6.502_290_170_873_972).abs() < 1e-12);
        assert!((stopping_time(1.0, 2).unwrap() + (1.5e-3f64).ln()).abs() < 1e-12);
        assert_eq!(stopping_time(3.0, 2).unwrap(), 15.0);
        assert_eq!(stopping_time(2.0, 2).unwrap(), 10.0);
        assert_eq!(stopping_time(0.5, 21).unwrap(), 21.0);
        assert!((stopping_time(4.0, 21).unwrap() - 110.25).abs() < 1e-12);
        assert!(stopping_time(0.0, 2).is_err());
        assert!(stopping_time(-1.0, 5).is_err());
    }

    #[test]
    fn table_rows() {
        let p = table1_defaults(Preset::Fig4, 2.0, 0.5, 21).unwrap();
        assert_eq!(p.n_traj, 2000);
        assert!((p.dt - 5e-3).abs() < 1e-18);
        assert_eq!(table1_defaults(Preset::Fig4, 2.0, 0.0, 21).unwrap().n_traj, 1);
        assert_eq!(table1_defaults(Preset::Fig2cd, 0.3, 0.0, 2).unwrap().n_traj, 100);
        assert_eq!(table1_defaults(Preset::Fig2cd, 0.3, 0.75, 2).unwrap().n_traj, 750);
        let p = table1_defaults(Preset::Fig3, 0.7, 0.3, 11).unwrap();
        assert_eq!((p.dt, p.t_final, p.n_traj, p.chain_length), (1e-3, 15.0, 100, 11));
        let p = table1_defaults(Preset::Fig2b, 2.0, 1.0, 9).unwrap();
        assert_eq!((p.dt, p.t_final, p.n_traj, p.chain_length), (5e-4, 5.0, 1700, 2));
        assert_eq!(table1_defaults(Preset::Fig2a, 0.1, 0.5, 2).unwrap().n_traj, 1800);
        assert!(table1_defaults(Preset::Fig2a, 0.1, 0.3, 2).is_err());
        assert!(table1_defaults(Preset::Custom, 1.0, 0.3, 2).is_err());
        assert!(table1_defaults(Preset::Fig1, 0.0, 0.3, 2).is_err());
    }

    #[test]
    fn preset_names_roundtrip() {
        for p in Preset::ALL {
            assert_eq!(p.as_str().parse::<Preset>().unwrap(), p);
        }
        assert!("fig5".parse::<Preset>().is_err());
    }
}
