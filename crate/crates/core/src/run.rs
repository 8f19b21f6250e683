//! One configured synthesis run and its report.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::constants::SplitPolicy;
use crate::data::{load_dataset, normalize, Dataset, TaskKind};
use crate::error::{Error, Result};
use crate::near::{parse_ll, NearSpace};
use crate::objectives::Objective;
use crate::oracle::{grid_optimum_near, grid_optimum_quivr, GridSpec, NearStructures, QuivrStructures, ThresholdGrid};
use crate::quivr::{parse_query, QuivrBounds, QuivrSpace};
use crate::search::{
    search, write_progress_csv_file, Algorithm, Budget, LowerBoundMode, ProgramSpace, ProgressRecord,
    ProgressSchedule, SearchConfig, SynthesisResult, Termination, TABLE_CHECKPOINTS,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub dsl: TaskKind,
    pub objective: Objective,
    pub algorithm: Algorithm,
    pub epsilon: f64,
    pub cost_bound: u32,
    pub max_predicates: usize,
    pub max_parameters: usize,
    pub max_seconds: Option<f64>,
    pub max_expansions: Option<u64>,
    pub max_split_depth: u32,
    pub lower_bound: LowerBoundMode,
    pub split_policy: SplitPolicy,
    pub sketch: Option<String>,
    pub normalize: bool,
    pub data: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub progress: Option<PathBuf>,
    /// Wall-clock checkpoints in seconds.
    pub checkpoints: Vec<f64>,
    /// Expansion-count checkpoints; replace the wall-clock ones when set.
    pub expansion_checkpoints: Vec<u64>,
    pub workers: usize,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            dsl: TaskKind::Labeling,
            objective: Objective::F1,
            algorithm: Algorithm::Astar,
            epsilon: 0.0,
            cost_bound: 4,
            max_predicates: 3,
            max_parameters: 2,
            max_seconds: None,
            max_expansions: None,
            max_split_depth: Budget::default().max_split_depth,
            lower_bound: LowerBoundMode::default(),
            split_policy: SplitPolicy::default(),
            sketch: None,
            normalize: false,
            data: None,
            report: None,
            progress: None,
            checkpoints: TABLE_CHECKPOINTS.to_vec(),
            expansion_checkpoints: Vec::new(),
            workers: 1,
            seed: 0,
        }
    }
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| Error::Config(format!("bad value `{s}` in `{key}`"))))
        .collect()
}

fn parse_one<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("bad value `{value}` for `{key}`")))
}

fn parse_opt<T: std::str::FromStr>(key: &str, value: &str) -> Result<Option<T>> {
    match value.trim() {
        "" | "none" => Ok(None),
        v => parse_one(key, v).map(Some),
    }
}

impl RunConfig {
    /// Sets one `key=value` setting. Keys use underscores or dashes.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('-', "_");
        let v = value.trim();
        match key.as_str() {
            "dsl" => self.dsl = v.parse()?,
            "objective" => self.objective = v.parse()?,
            "algorithm" => self.algorithm = v.parse()?,
            "epsilon" => self.epsilon = parse_one(&key, v)?,
            "cost_bound" => self.cost_bound = parse_one(&key, v)?,
            "max_predicates" => self.max_predicates = parse_one(&key, v)?,
            "max_parameters" => self.max_parameters = parse_one(&key, v)?,
            "max_seconds" => self.max_seconds = parse_opt(&key, v)?,
            "max_expansions" => self.max_expansions = parse_opt(&key, v)?,
            "max_split_depth" => self.max_split_depth = parse_one(&key, v)?,
            "lower_bound" => self.lower_bound = v.parse()?,
            "split_policy" => self.split_policy = v.parse()?,
            "sketch" => self.sketch = (!v.is_empty()).then(|| v.to_string()),
            "normalize" => self.normalize = parse_one(&key, v)?,
            "data" => self.data = Some(PathBuf::from(v)),
            "report" => self.report = Some(PathBuf::from(v)),
            "progress" => self.progress = Some(PathBuf::from(v)),
            "checkpoints" => self.checkpoints = parse_list(&key, v)?,
            "expansion_checkpoints" => self.expansion_checkpoints = parse_list(&key, v)?,
            "workers" => self.workers = parse_one(&key, v)?,
            "seed" => self.seed = parse_one(&key, v)?,
            _ => return Err(Error::Config(format!("unknown setting `{key}`"))),
        }
        Ok(())
    }

    /// Reads `key=value` lines; `#` starts a comment.
    pub fn parse_file_text(text: &str) -> Result<BTreeMap<String, String>> {
        let mut out = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value, got `{line}`", i + 1)))?;
            out.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(out)
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)?;
        for (k, v) in Self::parse_file_text(&text)? {
            self.set(&k, &v)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::Config(format!("epsilon must be finite and >= 0, got {}", self.epsilon)));
        }
        if self.cost_bound == 0 || self.max_predicates == 0 || self.workers == 0 {
            return Err(Error::Config("cost bound, predicate bound and workers must be positive".into()));
        }
        if self.max_seconds.is_some_and(|s| s.is_nan() || s < 0.0) {
            return Err(Error::Config("max_seconds must be >= 0".into()));
        }
        Ok(())
    }

    pub fn schedule(&self) -> ProgressSchedule {
        if self.expansion_checkpoints.is_empty() {
            ProgressSchedule::WallClock(self.checkpoints.clone())
        } else {
            ProgressSchedule::Expansions(self.expansion_checkpoints.clone())
        }
    }

    pub fn search_config(&self) -> SearchConfig {
        SearchConfig {
            epsilon: self.epsilon,
            budget: Budget {
                max_seconds: self.max_seconds,
                max_expansions: self.max_expansions,
                max_split_depth: self.max_split_depth,
            },
            lower_bound: self.lower_bound,
            progress: self.schedule(),
            workers: self.workers,
            record_trace: false,
        }
    }

    pub fn quivr_bounds(&self) -> QuivrBounds {
        QuivrBounds {
            max_predicates: self.max_predicates,
            max_parameters: self.max_parameters,
        }
    }
}

/// The result JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub dsl: TaskKind,
    pub objective: Objective,
    pub algorithm: Algorithm,
    pub lower_bound: LowerBoundMode,
    pub epsilon: f64,
    pub best_program: Option<String>,
    pub certified_lower: f64,
    pub certified_upper: f64,
    pub range: f64,
    pub converged: bool,
    pub termination: Termination,
    pub nodes_expanded: u64,
    pub nodes_generated: u64,
    pub wall_time_s: f64,
    pub root_bounds: [f64; 2],
    pub depth_limited: bool,
    pub seed: u64,
    pub progress: Vec<ProgressRecord>,
}

impl RunReport {
    fn from_result<P>(config: &RunConfig, r: &SynthesisResult<P>) -> Self {
        RunReport {
            dsl: config.dsl,
            objective: config.objective,
            algorithm: r.algorithm,
            lower_bound: r.lower_bound_mode,
            epsilon: r.epsilon_used,
            best_program: r.best_program_text.clone(),
            certified_lower: r.certified_lower,
            certified_upper: r.certified_upper,
            range: r.range(),
            converged: r.converged,
            termination: r.termination,
            nodes_expanded: r.nodes_expanded,
            nodes_generated: r.nodes_generated,
            wall_time_s: r.wall_time,
            root_bounds: [r.root_bounds.lo_f64(), r.root_bounds.hi_f64()],
            depth_limited: r.depth_limited,
            seed: config.seed,
            progress: r.progress_log.clone(),
        }
    }

    /// Process exit status: 0 converged, 2 budget exhausted.
    pub fn exit_code(&self) -> i32 {
        if self.converged {
            0
        } else {
            2
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(file, self)?;
        Ok(())
    }
}

fn run_space<S: ProgramSpace>(space: &S, config: &RunConfig) -> Result<RunReport> {
    let r = search(space, &config.search_config(), config.algorithm, None)?;
    Ok(RunReport::from_result(config, &r))
}

/// Runs one synthesis on an in-memory dataset.
pub fn run_on(config: &RunConfig, data: &Dataset) -> Result<RunReport> {
    config.validate()?;
    if data.kind != config.dsl {
        return Err(Error::Config(format!(
            "dsl expects a {} dataset but the data is {}",
            config.dsl, data.kind
        )));
    }
    let normalized;
    let data = if config.normalize {
        normalized = normalize(data).0;
        &normalized
    } else {
        data
    };
    match config.dsl {
        TaskKind::Labeling => {
            let mut space = NearSpace::new(data, config.objective, config.cost_bound)?.with_split_policy(config.split_policy);
            if let Some(s) = &config.sketch {
                space = space.with_root(parse_ll(s)?)?;
            }
            run_space(&space, config)
        }
        TaskKind::Query => {
            let mut space =
                QuivrSpace::new(data, config.objective, config.quivr_bounds())?.with_split_policy(config.split_policy);
            if let Some(s) = &config.sketch {
                space = space.with_root(parse_query(s)?)?;
            }
            run_space(&space, config)
        }
    }
}

/// Loads the configured dataset, runs, and writes the report and progress
/// files if paths are set.
pub fn run(config: &RunConfig) -> Result<RunReport> {
    let path = config
        .data
        .as_ref()
        .ok_or_else(|| Error::Config("no data path given".into()))?;
    let data = load_dataset(path, config.dsl)?;
    let report = run_on(config, &data)?;
    if let Some(p) = &config.report {
        report.write(p)?;
    }
    if let Some(p) = &config.progress {
        write_progress_csv_file(p, &report.progress)?;
    }
    Ok(report)
}

/// Grid used for labeling-program constants when none is given.
pub const DEFAULT_NEAR_GRID: (f64, f64, usize) = (-1.0, 1.0, 21);

/// The oracle result JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub dsl: TaskKind,
    pub objective: Objective,
    pub program: String,
    pub value: f64,
    /// Exact objective as `num/den`.
    pub exact: String,
    pub candidates: u64,
}

impl OracleReport {
    pub fn write(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(file, self)?;
        Ok(())
    }
}

/// Grid search over the space `config` describes. Query constants use the
/// realized scores unless `grid` is given.
pub fn run_oracle_on(config: &RunConfig, grid: Option<GridSpec>, data: &Dataset) -> Result<OracleReport> {
    config.validate()?;
    let (program, value, exact, candidates) = match config.dsl {
        TaskKind::Labeling => {
            let structures = match &config.sketch {
                Some(s) => NearStructures::Sketch(parse_ll(s)?),
                None => NearStructures::CostBound(config.cost_bound),
            };
            let (lo, hi, steps) = DEFAULT_NEAR_GRID;
            let grid = match grid {
                Some(g) => g,
                None => GridSpec::new(lo, hi, steps)?,
            };
            let o = grid_optimum_near(&structures, &grid, data, config.objective)?;
            (o.text, o.value, o.exact, o.candidates)
        }
        TaskKind::Query => {
            let structures = match &config.sketch {
                Some(s) => QuivrStructures::Sketch(parse_query(s)?),
                None => QuivrStructures::Bounded(config.quivr_bounds()),
            };
            let grid = grid.map_or(ThresholdGrid::Realized, ThresholdGrid::Uniform);
            let o = grid_optimum_quivr(&structures, &grid, data, config.objective)?;
            (o.text, o.value, o.exact, o.candidates)
        }
    };
    Ok(OracleReport {
        dsl: config.dsl,
        objective: config.objective,
        program,
        value,
        exact: exact.to_string(),
        candidates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Example, Labels};

    fn toy() -> Dataset {
        Dataset::new(
            TaskKind::Labeling,
            vec![Example {
                features: vec![vec![101.0], vec![65.0]],
                labels: Labels::PerStep(vec![false, true]),
            }],
        )
        .unwrap()
    }

    fn toy_config() -> RunConfig {
        RunConfig {
            objective: Objective::Accuracy,
            sketch: Some("map(-1*z1 + [0,100])".into()),
            ..RunConfig::default()
        }
    }

    #[test]
    fn golden_run() {
        let r = run_on(&toy_config(), &toy()).unwrap();
        assert!(r.converged);
        assert_eq!(r.certified_lower, 1.0);
        assert_eq!(r.range, 0.0);
        assert!(r.nodes_expanded <= 3);
        assert_eq!(r.exit_code(), 0);
        let bfs = run_on(
            &RunConfig {
                algorithm: Algorithm::Bfs,
                ..toy_config()
            },
            &toy(),
        )
        .unwrap();
        assert_eq!(bfs.certified_lower, r.certified_lower);
        assert!(bfs.nodes_expanded >= r.nodes_expanded);
    }

    #[test]
    fn zero_budget_does_not_converge() {
        let cfg = RunConfig {
            max_seconds: Some(0.0),
            ..toy_config()
        };
        let r = run_on(&cfg, &toy()).unwrap();
        assert!(!r.converged);
        assert_eq!(r.exit_code(), 2);
    }

    #[test]
    fn key_value_settings() {
        let text = "# a comment\ndsl = quivr\nobjective=accuracy\nmax-expansions = 50\ncheckpoints = 1, 2.5\n";
        let mut cfg = RunConfig::default();
        for (k, v) in RunConfig::parse_file_text(text).unwrap() {
            cfg.set(&k, &v).unwrap();
        }
        assert_eq!(cfg.dsl, TaskKind::Query);
        assert_eq!(cfg.objective, Objective::Accuracy);
        assert_eq!(cfg.max_expansions, Some(50));
        assert_eq!(cfg.checkpoints, vec![1.0, 2.5]);
        assert!(cfg.set("colour", "red").is_err());
        assert!(cfg.set("epsilon", "abc").is_err());
        assert!(RunConfig::parse_file_text("novalue").is_err());
    }

    #[test]
    fn oracle_matches_synthesis_on_toy() {
        let o = run_oracle_on(&toy_config(), Some(GridSpec::new(0.0, 100.0, 101).unwrap()), &toy()).unwrap();
        assert_eq!(o.value, 1.0);
        assert_eq!(o.program, "map(-1*z1 + 65)");
        assert_eq!(o.exact, "2/2");
        let one = run_oracle_on(&toy_config(), Some(GridSpec::new(7.0, 7.0, 1).unwrap()), &toy()).unwrap();
        assert_eq!(one.candidates, 1);
        assert!(run_oracle_on(&toy_config(), Some(GridSpec::new(0.0, 1.0, 2_000_000).unwrap()), &toy()).is_err());
    }

    #[test]
    fn validation() {
        let bad = RunConfig {
            epsilon: -1.0,
            ..RunConfig::default()
        };
        assert!(bad.validate().is_err());
        let wrong_kind = RunConfig {
            dsl: TaskKind::Query,
            ..RunConfig::default()
        };
        assert!(run_on(&wrong_kind, &toy()).is_err());
    }
}
