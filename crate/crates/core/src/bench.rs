//! Comparison tables over a matrix of tasks and algorithms, and the scaling curve.

use std::io::Write;
use std::time::Instant;

use serde::Serialize;

use crate::constants::SplitPolicy;
use crate::data::{Dataset, TaskKind};
use crate::error::Result;
use crate::objectives::Objective;
use crate::run::{run_on, RunConfig, RunReport};
use crate::search::{state_at, Algorithm, ProgressSchedule};
use crate::synthetic::{generate_synthetic, SyntheticParams};

/// Sketch of the scaling task; the planted program is `map(-1*z1 + 0.3)`.
pub const SCALING_SKETCH: &str = "map(-1*z1 + [-1,1])";

#[derive(Debug, Clone)]
pub struct BenchTask {
    pub name: String,
    pub data: Dataset,
}

/// A cell of the table: the state at one checkpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BenchCell {
    pub best: f64,
    pub range: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub task: String,
    pub algorithm: Algorithm,
    /// `converged`, `budget`, or `error: <message>`.
    pub status: String,
    pub nodes_expanded: u64,
    pub wall_time_s: f64,
    pub cells: Vec<Option<BenchCell>>,
}

impl BenchRow {
    pub fn converged(&self) -> bool {
        self.status == "converged"
    }

    /// Index of the first checkpoint whose range is zero.
    pub fn first_zero_range(&self) -> Option<usize> {
        self.cells.iter().position(|c| c.is_some_and(|c| c.range == 0.0))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchTable {
    pub checkpoints: Vec<String>,
    pub rows: Vec<BenchRow>,
}

impl BenchTable {
    pub fn row(&self, task: &str, algorithm: Algorithm) -> Option<&BenchRow> {
        self.rows.iter().find(|r| r.task == task && r.algorithm == algorithm)
    }

    /// Columns: task, algorithm, status, nodes_expanded, wall_time_s, then
    /// `best@<c>` and `range@<c>` per checkpoint. Missing cells are empty.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<String> = ["task", "algorithm", "status", "nodes_expanded", "wall_time_s"]
            .into_iter()
            .map(String::from)
            .collect();
        for c in &self.checkpoints {
            header.push(format!("best@{c}"));
            header.push(format!("range@{c}"));
        }
        w.write_record(&header)?;
        for r in &self.rows {
            let mut rec = vec![
                r.task.clone(),
                r.algorithm.to_string(),
                r.status.clone(),
                r.nodes_expanded.to_string(),
                format!("{:.6}", r.wall_time_s),
            ];
            for c in &r.cells {
                match c {
                    Some(c) => {
                        rec.push(c.best.to_string());
                        rec.push(c.range.to_string());
                    }
                    None => {
                        rec.push(String::new());
                        rec.push(String::new());
                    }
                }
            }
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn checkpoint_labels(schedule: &ProgressSchedule) -> Vec<String> {
    match schedule {
        ProgressSchedule::WallClock(v) => v.iter().map(|s| format!("{s}s")).collect(),
        ProgressSchedule::Expansions(v) => v.iter().map(|n| format!("{n}n")).collect(),
        ProgressSchedule::Off => Vec::new(),
    }
}

fn row_from_report(task: &str, algorithm: Algorithm, schedule: &ProgressSchedule, r: &RunReport) -> BenchRow {
    let cells = (0..schedule.len())
        .map(|i| {
            state_at(&r.progress, schedule, i).map(|s| BenchCell {
                best: s.best_lower,
                range: s.range(),
            })
        })
        .collect();
    BenchRow {
        task: task.to_string(),
        algorithm,
        status: if r.converged { "converged".into() } else { "budget".into() },
        nodes_expanded: r.nodes_expanded,
        wall_time_s: r.wall_time_s,
        cells,
    }
}

/// Runs every task under every algorithm. A failing run becomes an error row.
pub fn run_matrix(base: &RunConfig, tasks: &[BenchTask], algorithms: &[Algorithm]) -> BenchTable {
    let schedule = base.schedule();
    let mut rows = Vec::with_capacity(tasks.len() * algorithms.len());
    for task in tasks {
        for &algorithm in algorithms {
            let config = RunConfig {
                algorithm,
                dsl: task.data.kind,
                ..base.clone()
            };
            let row = match run_on(&config, &task.data) {
                Ok(r) => row_from_report(&task.name, algorithm, &schedule, &r),
                Err(e) => {
                    log::warn!("{} / {algorithm}: {e}", task.name);
                    BenchRow {
                        task: task.name.clone(),
                        algorithm,
                        status: format!("error: {e}"),
                        nodes_expanded: 0,
                        wall_time_s: 0.0,
                        cells: vec![None; schedule.len()],
                    }
                }
            };
            rows.push(row);
        }
    }
    BenchTable {
        checkpoints: checkpoint_labels(&schedule),
        rows,
    }
}

/// Seeded synthetic tasks named `<kind>-<seed>`.
pub fn synthetic_tasks(template: &SyntheticParams, seeds: impl IntoIterator<Item = u64>) -> Result<Vec<BenchTask>> {
    seeds
        .into_iter()
        .map(|seed| {
            let p = SyntheticParams {
                seed,
                ..template.clone()
            };
            let (data, _) = generate_synthetic(&p)?;
            Ok(BenchTask {
                name: format!("{}-{seed}", p.kind),
                data,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingPoint {
    pub trajectories: usize,
    /// Fastest of the repeats.
    pub wall_time_s: f64,
    pub nodes_expanded: u64,
    pub converged: bool,
    pub certified_lower: f64,
}

/// A* on the sketched toy labeling task at each trajectory count.
pub fn scaling_curve(sizes: &[usize], seed: u64, repeats: usize, max_seconds: Option<f64>) -> Result<Vec<ScalingPoint>> {
    let config = RunConfig {
        dsl: TaskKind::Labeling,
        objective: Objective::Accuracy,
        algorithm: Algorithm::Astar,
        sketch: Some(SCALING_SKETCH.into()),
        split_policy: SplitPolicy::Bisect,
        max_seconds,
        checkpoints: Vec::new(),
        ..RunConfig::default()
    };
    let mut out = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let (data, _) = generate_synthetic(&SyntheticParams {
            trajectories: n,
            ..SyntheticParams::new(TaskKind::Labeling, seed)
        })?;
        let mut best: Option<ScalingPoint> = None;
        for _ in 0..repeats.max(1) {
            let start = Instant::now();
            let r = run_on(&config, &data)?;
            let t = start.elapsed().as_secs_f64();
            if best.is_none_or(|b| t < b.wall_time_s) {
                best = Some(ScalingPoint {
                    trajectories: n,
                    wall_time_s: t,
                    nodes_expanded: r.nodes_expanded,
                    converged: r.converged,
                    certified_lower: r.certified_lower,
                });
            }
        }
        out.extend(best);
    }
    Ok(out)
}

pub fn write_scaling_csv<W: Write>(out: W, points: &[ScalingPoint]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for p in points {
        w.serialize(p)?;
    }
    w.flush()?;
    Ok(())
}

/// Least-squares slope of log(time) against log(trajectories).
pub fn log_log_slope(points: &[ScalingPoint]) -> Option<f64> {
    let xy: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.wall_time_s > 0.0 && p.trajectories > 0)
        .map(|p| ((p.trajectories as f64).ln(), p.wall_time_s.ln()))
        .collect();
    if xy.len() < 2 {
        return None;
    }
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_template(kind: TaskKind) -> SyntheticParams {
        SyntheticParams {
            trajectories: 8,
            length: 4,
            ..SyntheticParams::new(kind, 0)
        }
    }

    fn base() -> RunConfig {
        RunConfig {
            max_expansions: Some(2000),
            checkpoints: Vec::new(),
            expansion_checkpoints: vec![1, 10, 100],
            split_policy: SplitPolicy::Isolate,
            cost_bound: 3,
            max_predicates: 2,
            ..RunConfig::default()
        }
    }

    #[test]
    fn two_tasks_two_algorithms_give_four_rows() {
        let mut tasks = synthetic_tasks(&small_template(TaskKind::Labeling), [1]).unwrap();
        tasks.extend(synthetic_tasks(&small_template(TaskKind::Query), [2]).unwrap());
        let t = run_matrix(&base(), &tasks, &[Algorithm::Astar, Algorithm::Bfs]);
        assert_eq!(t.rows.len(), 4);
        assert_eq!(t.checkpoints, ["1n", "10n", "100n"]);
        assert!(t.rows.iter().all(|r| r.cells.len() == 3 && !r.status.starts_with("error")));
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 5);
        assert!(text.starts_with("task,algorithm,status,nodes_expanded,wall_time_s,best@1n,range@1n"));
    }

    #[test]
    fn empty_matrix_gives_empty_table() {
        let t = run_matrix(&base(), &[], &[Algorithm::Astar]);
        assert!(t.rows.is_empty());
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 1);
    }

    #[test]
    fn failures_are_recorded_per_row() {
        let mut tasks = synthetic_tasks(&small_template(TaskKind::Labeling), [1, 2]).unwrap();
        tasks[0].name = "bad".into();
        let cfg = RunConfig {
            sketch: Some("map(z9)".into()),
            ..base()
        };
        let t = run_matrix(&cfg, &tasks[..1], &[Algorithm::Astar]);
        assert!(t.rows[0].status.starts_with("error"));
        assert_eq!(t.rows[0].cells, vec![None; 3]);
        let t = run_matrix(&base(), &tasks, &[Algorithm::Astar]);
        assert_eq!(t.rows.len(), 2);
    }

    #[test]
    fn deterministic_given_seeds() {
        let tasks = synthetic_tasks(&small_template(TaskKind::Query), [5]).unwrap();
        let a = run_matrix(&base(), &tasks, &[Algorithm::Astar]);
        let b = run_matrix(&base(), &tasks, &[Algorithm::Astar]);
        assert_eq!(a.rows[0].cells, b.rows[0].cells);
        assert_eq!(a.rows[0].nodes_expanded, b.rows[0].nodes_expanded);
    }

    #[test]
    fn scaling_curve_runs() {
        let pts = scaling_curve(&[5, 10], 0, 1, Some(30.0)).unwrap();
        assert_eq!(pts.len(), 2);
        assert!(pts.iter().all(|p| p.converged && p.certified_lower == 1.0));
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<_> = [10usize, 20, 40]
            .iter()
            .map(|&n| ScalingPoint {
                trajectories: n,
                wall_time_s: (n * n) as f64 * 1e-3,
                nodes_expanded: 0,
                converged: true,
                certified_lower: 1.0,
            })
            .collect();
        assert!((log_log_slope(&pts).unwrap() - 2.0).abs() < 1e-9);
        assert_eq!(log_log_slope(&pts[..1]), None);
    }
}
