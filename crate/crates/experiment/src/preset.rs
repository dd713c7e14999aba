//! Grid runs: one ensemble per `(k, eta)` cell, reduced to the tables of a preset.

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use qwalk_core::{
    bloch_disk_histogram, map_trajectories, max_mean_coherence, run_ensemble, run_trajectory, BlochDiskHistogram,
    BlochVector, Recording, SimulationParams64,
};

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::table::{write_table, CellRecord, Column, ResultTable, RunMetadata};
use crate::table1::Preset;

/// What a grid run reports per cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunKind {
    /// The preset's figure data.
    Preset,
    /// One summary row per cell: maximal and final mean coherence.
    Sweep,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub tables: Vec<ResultTable>,
    pub metadata: RunMetadata,
}

impl RunOutcome {
    pub fn table(&self, name: &str) -> Option<&ResultTable> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn failed_cells(&self) -> usize {
        self.metadata.cells.iter().filter(|c| c.error.is_some()).count()
    }

    /// Writes every table and its sidecar into `dir`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        self.tables.iter().map(|t| write_table(t, dir, &self.metadata)).collect()
    }
}

fn cols(names: &[(&str, &str)]) -> Vec<Column> {
    names.iter().map(|(n, u)| Column::new(n, u)).collect()
}

const CELL: [(&str, &str); 3] = [("k", "J"), ("eta", "1"), ("n_traj", "1")];

fn with_cell(extra: &[(&str, &str)]) -> Vec<Column> {
    let mut c = cols(&CELL);
    c.extend(cols(extra));
    c
}

fn empty_tables(preset: Preset, kind: RunKind, emit_states: bool) -> Vec<ResultTable> {
    let mut tables = match (kind, preset) {
        (RunKind::Sweep, _) => vec![ResultTable::new(
            "sweep",
            with_cell(&[
                ("L", "1"),
                ("t_max", "1/J"),
                ("cn_max", "1"),
                ("cn_max_se", "1"),
                ("cn_final", "1"),
                ("cn_final_se", "1"),
            ]),
        )],
        (_, Preset::Fig1) => vec![ResultTable::new("bloch_histogram", with_cell(&[("y", "1"), ("z", "1"), ("p", "1")]))],
        (_, Preset::Fig2a | Preset::Fig2b | Preset::Custom) => vec![ResultTable::new(
            "coherence_series",
            with_cell(&[("t", "1/J"), ("cn", "1"), ("cn_se", "1"), ("purity", "1"), ("purity_se", "1")]),
        )],
        (_, Preset::Fig2cd) => vec![ResultTable::new(
            "stationary",
            with_cell(&[("t_f", "1/J"), ("cn", "1"), ("cn_se", "1")]),
        )],
        (_, Preset::Fig3) => vec![
            ResultTable::new("trajectory_densities", with_cell(&[("t", "1/J"), ("site", "1"), ("density", "1")])),
            ResultTable::new("trajectory_coherence", with_cell(&[("t", "1/J"), ("b", "1"), ("cn", "1")])),
            ResultTable::new("ensemble_coherence", with_cell(&[("t", "1/J"), ("b", "1"), ("cn", "1"), ("cn_se", "1")])),
            ResultTable::new("mean_coherence", with_cell(&[("t", "1/J"), ("cn", "1"), ("cn_se", "1")])),
        ],
        (_, Preset::Fig4) => vec![ResultTable::new(
            "cn_max",
            with_cell(&[("L", "1"), ("t_max", "1/J"), ("cn_max", "1"), ("cn_max_se", "1")]),
        )],
    };
    if emit_states {
        tables.push(ResultTable::new(
            "states",
            with_cell(&[("t", "1/J"), ("i", "1"), ("j", "1"), ("re", "1"), ("im", "1")]),
        ));
    }
    tables
}

/// Rows of one cell, merged into the output only if the whole cell succeeds.
fn run_cell(
    preset: Preset,
    kind: RunKind,
    emit_states: bool,
    p: &SimulationParams64,
    tables: &mut [ResultTable],
) -> qwalk_core::Result<()> {
    let tag = [p.k, p.eta, p.n_traj as f64];
    let row = |extra: &[f64]| -> Vec<f64> { tag.iter().chain(extra).copied().collect() };
    let last = |v: &[f64]| *v.last().expect("at least one sample");

    match (kind, preset) {
        (RunKind::Sweep, _) => {
            let e = run_ensemble(p, Recording::default(), &[])?;
            let (t_max, cn_max) = max_mean_coherence(&e.mean)?;
            let at = e.mean.times.iter().position(|t| *t == t_max).expect("argmax is a sample time");
            tables[0].push(row(&[
                p.chain_length as f64,
                t_max,
                cn_max,
                e.std_error.mean_coherence[at],
                last(&e.mean.mean_coherence),
                last(&e.std_error.mean_coherence),
            ]));
        }
        (_, Preset::Fig1) => {
            let rec = Recording { bloch: true, ..Default::default() };
            let finals: Vec<BlochVector<f64>> =
                map_trajectories(p, rec, &[], |t| *t.observables.bloch.last().expect("final sample"))?;
            let h = bloch_disk_histogram(&finals, BlochDiskHistogram::DEFAULT_BINS)?;
            for iy in 0..h.bins() {
                for iz in 0..h.bins() {
                    tables[0].push(row(&[h.bin_center(iy), h.bin_center(iz), h.density(iy, iz)]));
                }
            }
        }
        (_, Preset::Fig2a | Preset::Fig2b | Preset::Custom) => {
            let e = run_ensemble(p, Recording::default(), &[])?;
            for s in 0..e.mean.len() {
                tables[0].push(row(&[
                    e.mean.times[s],
                    e.mean.mean_coherence[s],
                    e.std_error.mean_coherence[s],
                    e.mean.purity[s],
                    e.std_error.purity[s],
                ]));
            }
        }
        (_, Preset::Fig2cd) => {
            let e = run_ensemble(p, Recording::default(), &[])?;
            tables[0].push(row(&[last(&e.mean.times), last(&e.mean.mean_coherence), last(&e.std_error.mean_coherence)]));
        }
        (_, Preset::Fig3) => {
            let rec = Recording { densities: true, bond_coherence: true, ..Default::default() };
            let single = run_trajectory(p, rec, &[])?;
            let o = &single.observables;
            for (s, t) in o.times.iter().enumerate() {
                for (i, n) in o.densities[s].iter().enumerate() {
                    tables[0].push(row(&[*t, (i + 1) as f64, *n]));
                }
                for (b, c) in o.bond_coherence[s].iter().enumerate() {
                    tables[1].push(row(&[*t, (b + 1) as f64, *c]));
                }
            }
            let rec = Recording { bond_coherence: true, ..Default::default() };
            let e = run_ensemble(p, rec, &[])?;
            for (s, t) in e.mean.times.iter().enumerate() {
                for (b, (c, se)) in e.mean.bond_coherence[s].iter().zip(&e.std_error.bond_coherence[s]).enumerate() {
                    tables[2].push(row(&[*t, (b + 1) as f64, *c, *se]));
                }
                tables[3].push(row(&[*t, e.mean.mean_coherence[s], e.std_error.mean_coherence[s]]));
            }
        }
        (_, Preset::Fig4) => {
            let e = run_ensemble(p, Recording::default(), &[])?;
            let (t_max, cn_max) = max_mean_coherence(&e.mean)?;
            let at = e.mean.times.iter().position(|t| *t == t_max).expect("argmax is a sample time");
            tables[0].push(row(&[p.chain_length as f64, t_max, cn_max, e.std_error.mean_coherence[at]]));
        }
    }

    if emit_states {
        let rec = Recording { states: true, ..Default::default() };
        let single = run_trajectory(p, rec, &[])?;
        let states = single.states.as_deref().unwrap_or_default();
        let table = tables.last_mut().expect("states table");
        for (t, rho) in single.observables.times.iter().zip(states) {
            for i in 1..=rho.dim() {
                for j in 1..=rho.dim() {
                    let z = rho.entry(i, j);
                    table.push(row(&[*t, i as f64, j as f64, z.re, z.im]));
                }
            }
        }
    }
    Ok(())
}

/// Runs every cell of `config`. A failing cell is logged and recorded in the
/// metadata; the other cells are unaffected.
pub fn run_grid(config: &ExperimentConfig, kind: RunKind) -> Result<RunOutcome> {
    config.validate()?;
    let started = Instant::now();
    let mut tables = empty_tables(config.preset, kind, config.emit_states);
    let mut cells = Vec::new();
    for (k, eta) in config.cells() {
        let params = match config.cell_params(k, eta) {
            Ok(p) => p,
            Err(e) => {
                log::error!("cell k={k} eta={eta}: {e}");
                cells.push(CellRecord {
                    k,
                    eta,
                    chain_length: config.effective_chain_length(),
                    dt: f64::NAN,
                    t_final: f64::NAN,
                    n_traj: 0,
                    seed: 0,
                    error: Some(e.to_string()),
                });
                continue;
            }
        };
        log::info!(
            "cell k={k} eta={eta}: L={} dt={} t_f={} trajectories={}",
            params.chain_length,
            params.dt,
            params.t_final,
            params.n_traj
        );
        let mut local = empty_tables(config.preset, kind, config.emit_states);
        let outcome = run_cell(config.preset, kind, config.emit_states, &params, &mut local);
        if let Err(e) = &outcome {
            log::error!("cell k={k} eta={eta}: {e}");
        } else {
            for (dst, src) in tables.iter_mut().zip(local) {
                dst.rows.extend(src.rows);
            }
        }
        cells.push(CellRecord {
            k,
            eta,
            chain_length: params.chain_length,
            dt: params.dt,
            t_final: params.t_final,
            n_traj: params.n_traj,
            seed: params.seed,
            error: outcome.err().map(|e| e.to_string()),
        });
    }
    tables.iter_mut().for_each(ResultTable::sort);
    let metadata = RunMetadata {
        config: config.clone(),
        master_seed: config.seed,
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        wall_clock_seconds: started.elapsed().as_secs_f64(),
        finished_unix_seconds: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
        cells,
    };
    Ok(RunOutcome { tables, metadata })
}

/// Figure data of `config.preset` over its grid.
pub fn run_preset(config: &ExperimentConfig) -> Result<RunOutcome> {
    run_grid(config, RunKind::Preset)
}

/// Summary statistics of every cell of an arbitrary grid.
pub fn run_sweep(config: &ExperimentConfig) -> Result<RunOutcome> {
    run_grid(config, RunKind::Sweep)
}
