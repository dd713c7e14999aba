//! Result tables and their on-disk form: CSV data plus a JSON sidecar.

use std::cmp::Ordering;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{ExperimentError, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub unit: String,
}

impl Column {
    pub fn new(name: &str, unit: &str) -> Self {
        Self { name: name.into(), unit: unit.into() }
    }

    pub fn header(&self) -> String {
        format!("{}[{}]", self.name, self.unit)
    }

    fn parse_header(h: &str) -> Option<Self> {
        let (name, rest) = h.split_once('[')?;
        let unit = rest.strip_suffix(']')?;
        Some(Self::new(name, unit))
    }
}

/// Columns that fix the row order, most significant first.
const SORT_KEYS: [&str; 7] = ["k", "eta", "t", "b", "site", "i", "j"];

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub name: String,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<f64>>,
}

impl ResultTable {
    pub fn new(name: &str, columns: Vec<Column>) -> Self {
        Self { name: name.into(), columns, rows: Vec::new() }
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Sorts rows lexicographically by `(k, eta, t, b, ...)`, then by the
    /// remaining columns.
    pub fn sort(&mut self) {
        let mut keys: Vec<usize> = SORT_KEYS.iter().filter_map(|k| self.column_index(k)).collect();
        let rest: Vec<usize> = (0..self.columns.len()).filter(|i| !keys.contains(i)).collect();
        keys.extend(rest);
        self.rows.sort_by(|a, b| {
            keys.iter().map(|&i| a[i].total_cmp(&b[i])).find(|o| *o != Ordering::Equal).unwrap_or(Ordering::Equal)
        });
    }
}

/// Per-cell bookkeeping recorded in the sidecar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub k: f64,
    pub eta: f64,
    pub chain_length: usize,
    pub dt: f64,
    pub t_final: f64,
    pub n_traj: usize,
    pub seed: u64,
    /// `None` on success.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub config: ExperimentConfig,
    pub master_seed: u64,
    pub code_version: String,
    pub wall_clock_seconds: f64,
    pub finished_unix_seconds: u64,
    pub cells: Vec<CellRecord>,
}

#[derive(Serialize)]
struct Sidecar<'a> {
    table: &'a str,
    columns: &'a [Column],
    rows: usize,
    run: &'a RunMetadata,
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> ExperimentError + '_ {
    move |source| ExperimentError::Csv { path: path.to_path_buf(), source }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ExperimentError + '_ {
    move |source| ExperimentError::Io { path: path.to_path_buf(), source }
}

/// Writes `table` as CSV: `name[unit]` header, 17 significant digits, LF
/// line endings, rows in the order stored (call [`ResultTable::sort`] first).
pub fn emit_csv(table: &ResultTable, path: &Path) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(csv_err(path))?;
    w.write_record(table.columns.iter().map(Column::header)).map_err(csv_err(path))?;
    for row in &table.rows {
        w.write_record(row.iter().map(|x| format!("{x:.16e}"))).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn read_csv(path: &Path) -> Result<ResultTable> {
    let malformed = |reason: String| ExperimentError::Malformed { path: path.to_path_buf(), reason };
    let mut r = csv::ReaderBuilder::new().from_path(path).map_err(csv_err(path))?;
    let columns = r
        .headers()
        .map_err(csv_err(path))?
        .iter()
        .map(|h| Column::parse_header(h).ok_or_else(|| malformed(format!("bad header {h:?}"))))
        .collect::<Result<Vec<_>>>()?;
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
    let mut table = ResultTable::new(name, columns);
    for rec in r.records() {
        let rec = rec.map_err(csv_err(path))?;
        let row = rec
            .iter()
            .map(|f| f.parse::<f64>().map_err(|e| malformed(format!("{f:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        table.push(row);
    }
    Ok(table)
}

/// `<dir>/<name>.csv` and its `<dir>/<name>.json` sidecar.
pub fn write_table(table: &ResultTable, dir: &Path, meta: &RunMetadata) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let csv_path = dir.join(format!("{}.csv", table.name));
    emit_csv(table, &csv_path)?;
    let json_path = dir.join(format!("{}.json", table.name));
    let sidecar = Sidecar { table: &table.name, columns: &table.columns, rows: table.rows.len(), run: meta };
    let mut f = File::create(&json_path).map_err(io_err(&json_path))?;
    serde_json::to_writer_pretty(&mut f, &sidecar)
        .map_err(|source| ExperimentError::Json { path: json_path.clone(), source })?;
    f.write_all(b"\n").map_err(io_err(&json_path))?;
    Ok(csv_path)
}
