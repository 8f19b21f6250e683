use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// One sample of the anytime certificate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProgressRecord {
    pub time_s: f64,
    pub best_lower: f64,
    pub frontier_upper: f64,
    pub nodes_expanded: u64,
}

impl ProgressRecord {
    pub fn range(&self) -> f64 {
        (self.frontier_upper - self.best_lower).max(0.0)
    }
}

/// Default checkpoints in seconds: 10s, 30s, 1m, 2m, 5m, 10m.
pub const TABLE_CHECKPOINTS: [f64; 6] = [10.0, 30.0, 60.0, 120.0, 300.0, 600.0];

/// When progress rows are recorded. A final row is always added at exit.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum ProgressSchedule {
    /// Elapsed-seconds checkpoints.
    WallClock(Vec<f64>),
    /// Expansion-count checkpoints; deterministic across machines.
    Expansions(Vec<u64>),
    #[default]
    Off,
}

impl ProgressSchedule {
    pub fn table_checkpoints() -> Self {
        ProgressSchedule::WallClock(TABLE_CHECKPOINTS.to_vec())
    }

    pub fn len(&self) -> usize {
        match self {
            ProgressSchedule::WallClock(v) => v.len(),
            ProgressSchedule::Expansions(v) => v.len(),
            ProgressSchedule::Off => 0,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Whether checkpoint `i` has been reached.
    pub(crate) fn reached(&self, i: usize, elapsed_s: f64, expanded: u64) -> bool {
        match self {
            ProgressSchedule::WallClock(v) => elapsed_s >= v[i],
            ProgressSchedule::Expansions(v) => expanded >= v[i],
            ProgressSchedule::Off => false,
        }
    }
}

/// The state at a checkpoint: the first record logged at or after it.
///
/// A run that finished before the checkpoint reports its final state.
pub fn state_at(log: &[ProgressRecord], schedule: &ProgressSchedule, i: usize) -> Option<ProgressRecord> {
    let after = |r: &ProgressRecord| match schedule {
        ProgressSchedule::WallClock(v) => r.time_s >= v[i],
        ProgressSchedule::Expansions(v) => r.nodes_expanded >= v[i],
        ProgressSchedule::Off => false,
    };
    log.iter().find(|r| after(r)).or(log.last()).copied()
}

pub fn write_progress_csv<W: Write>(out: W, log: &[ProgressRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in log {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_progress_csv_file(path: &Path, log: &[ProgressRecord]) -> Result<()> {
    let f = std::fs::File::create(path)?;
    write_progress_csv(std::io::BufWriter::new(f), log)
}
