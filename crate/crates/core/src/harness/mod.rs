//! Experiment orchestration and file exports.
//!
//! Every command writes one CSV file: optional `#`-prefixed metadata lines
//! (the only place wall-clock values appear), then a header row, then data
//! rows. Fields are comma-separated with `.` decimals and no locale, so the
//! body is byte-identical for identical configurations.

mod counterexample;
mod export;
mod sweep;
mod table1;

use std::fmt::Display;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cover::CoverMode;
use crate::error::{MomabError, Result};
use crate::momab::ExplorationLength;

pub use counterexample::{counterexample_instance, run_counterexample, DOMINATED_ARM, CounterexampleRecord, CounterexampleSeed};
pub use export::export_front_scatter;
pub use sweep::{loglog_slope, run_scaling_sweep, ScalingRequest, SweepRow};
pub use table1::{run_table1, Table1Output, Table1Replication, Table1Row};

/// Exact-cover universe cap used by sweeps; the branch-and-bound solver
/// handles the universes of the default grid well below this.
pub const SWEEP_EXACT_LIMIT: usize = 128;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub n_values: Vec<usize>,
    #[serde(rename = "D_values")]
    pub d_values: Vec<usize>,
    pub horizon: u64,
    pub replications: usize,
    pub base_seed: u64,
    pub cover_modes: Vec<CoverMode>,
    pub exploration: ExplorationLength,
    pub exact_limit: usize,
    pub output_dir: Option<PathBuf>,
}

impl SweepConfig {
    /// n in {20, 50, 100}, D in {2, 3, 5}, `T = 10^8`, `r = 0.02` calibration, 10 replications.
    pub fn table1_default() -> Self {
        SweepConfig {
            n_values: vec![20, 50, 100],
            d_values: vec![2, 3, 5],
            horizon: 100_000_000,
            replications: 10,
            base_seed: 0,
            cover_modes: vec![CoverMode::Exact, CoverMode::Greedy],
            exploration: ExplorationLength::TargetRadius(0.02),
            exact_limit: SWEEP_EXACT_LIMIT,
            output_dir: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(MomabError::InvalidConfig("replications must be >= 1".into()));
        }
        if self.n_values.is_empty() || self.d_values.is_empty() || self.cover_modes.is_empty() {
            return Err(MomabError::InvalidConfig(
                "n, D and cover-mode lists must be non-empty".into(),
            ));
        }
        if self.n_values.contains(&0) || self.d_values.contains(&0) {
            return Err(MomabError::InvalidConfig("n and D must be >= 1".into()));
        }
        Ok(())
    }
}

/// A small CSV document: metadata comments, a header and rows.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CsvTable {
    pub meta: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        CsvTable {
            meta: Vec::new(),
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn push_meta(&mut self, line: impl Into<String>) {
        self.meta.push(line.into());
    }

    /// Header and rows only.
    pub fn body(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        for record in std::iter::once(&self.header).chain(&self.rows) {
            w.write_record(record).expect("writing to memory");
        }
        let bytes = w.into_inner().expect("flushing to memory");
        String::from_utf8(bytes).expect("fields are UTF-8")
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for m in &self.meta {
            out.push_str("# ");
            out.push_str(m);
            out.push('\n');
        }
        out.push_str(&self.body());
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|e| MomabError::io(dir, e))?;
        }
        std::fs::write(path, self.render()).map_err(|e| MomabError::io(path, e))
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

/// Strips `#` lines from a rendered CSV.
pub fn csv_body(text: &str) -> String {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect()
}

pub(crate) fn cell(v: impl Display) -> String {
    v.to_string()
}

pub(crate) fn opt_cell<T: Display>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub(crate) fn flag(b: bool) -> String {
    if b { "1" } else { "0" }.to_string()
}

pub(crate) fn generated_at() -> String {
    let secs = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    format!("generated_unix_s={secs}")
}

pub(crate) fn write_to_dir(table: &CsvTable, dir: Option<&Path>, file: &str) -> Result<Option<PathBuf>> {
    match dir {
        Some(dir) => {
            let path = dir.join(file);
            table.write(&path)?;
            Ok(Some(path))
        }
        None => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_rendering() {
        let mut t = CsvTable::new(["a", "b"]);
        t.push_meta("x=1");
        t.push_row(vec![cell(1), cell(0.5)]);
        assert_eq!(t.render(), "# x=1\na,b\n1,0.5\n");
        assert_eq!(csv_body(&t.render()), t.body());
        assert_eq!(t.column("b"), Some(1));
    }

    #[test]
    fn config_validation() {
        let mut c = SweepConfig::table1_default();
        assert!(c.validate().is_ok());
        c.replications = 0;
        assert!(c.validate().is_err());
        let mut c = SweepConfig::table1_default();
        c.d_values.clear();
        assert!(c.validate().is_err());
    }

    #[test]
    fn unwritable_directory_is_reported() {
        let file = tempfile::NamedTempFile::new().unwrap();
        let t = CsvTable::new(["a"]);
        let err = t.write(&file.path().join("sub").join("x.csv")).unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }
}
