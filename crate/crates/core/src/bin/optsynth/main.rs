use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use optsynth::bench::{run_matrix, scaling_curve, synthetic_tasks, write_scaling_csv, BenchTask};
use optsynth::data::{load_dataset, TaskKind};
use optsynth::oracle::GridSpec;
use optsynth::run::{run, run_oracle_on, RunConfig};
use optsynth::search::Algorithm;
use optsynth::synthetic::{generate_synthetic, write_synthetic, SyntheticParams};
use optsynth::{Error, Result};

#[derive(Parser)]
#[command(name = "optsynth", version, about = "Certified optimal synthesis of labeling programs and trajectory queries")]
struct Cli {
    /// More log output; repeat for more.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one synthesis and write its report.
    Synth(RunArgs),
    /// Grid search over a discretized space.
    Oracle(OracleArgs),
    /// Compare algorithms over a matrix of tasks.
    Bench(BenchArgs),
    /// Generate a synthetic dataset.
    Gen(GenArgs),
}

/// Run settings. Flags override values from `--config`.
#[derive(Args, Clone, Default)]
struct RunArgs {
    /// File of `key=value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// near or quivr.
    #[arg(long)]
    dsl: Option<String>,
    /// accuracy or f1.
    #[arg(long)]
    objective: Option<String>,
    /// astar or bfs.
    #[arg(long)]
    algorithm: Option<String>,
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long)]
    cost_bound: Option<String>,
    #[arg(long)]
    max_predicates: Option<String>,
    #[arg(long)]
    max_parameters: Option<String>,
    #[arg(long)]
    max_seconds: Option<String>,
    #[arg(long)]
    max_expansions: Option<String>,
    #[arg(long)]
    max_split_depth: Option<String>,
    /// midpoint or abstract.
    #[arg(long)]
    lower_bound: Option<String>,
    /// bisect or isolate.
    #[arg(long)]
    split_policy: Option<String>,
    /// Root program text; may contain boxed constants.
    #[arg(long)]
    sketch: Option<String>,
    /// Min-max normalize features onto [-1, 1] first.
    #[arg(long)]
    normalize: bool,
    #[arg(long)]
    data: Option<PathBuf>,
    /// Result JSON path; printed to stdout when absent.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Progress CSV path.
    #[arg(long)]
    progress: Option<PathBuf>,
    /// Comma-separated wall-clock checkpoints in seconds.
    #[arg(long)]
    checkpoints: Option<String>,
    /// Comma-separated expansion-count checkpoints.
    #[arg(long)]
    expansion_checkpoints: Option<String>,
    #[arg(long)]
    workers: Option<String>,
    #[arg(long)]
    seed: Option<String>,
}

impl RunArgs {
    fn to_config(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Some(p) = &self.config {
            cfg.apply_file(p)?;
        }
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
        let flags = [
            ("dsl", self.dsl.clone()),
            ("objective", self.objective.clone()),
            ("algorithm", self.algorithm.clone()),
            ("epsilon", self.epsilon.clone()),
            ("cost_bound", self.cost_bound.clone()),
            ("max_predicates", self.max_predicates.clone()),
            ("max_parameters", self.max_parameters.clone()),
            ("max_seconds", self.max_seconds.clone()),
            ("max_expansions", self.max_expansions.clone()),
            ("max_split_depth", self.max_split_depth.clone()),
            ("lower_bound", self.lower_bound.clone()),
            ("split_policy", self.split_policy.clone()),
            ("sketch", self.sketch.clone()),
            ("normalize", self.normalize.then(|| "true".to_string())),
            ("data", path(&self.data)),
            ("report", path(&self.report)),
            ("progress", path(&self.progress)),
            ("checkpoints", self.checkpoints.clone()),
            ("expansion_checkpoints", self.expansion_checkpoints.clone()),
            ("workers", self.workers.clone()),
            ("seed", self.seed.clone()),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                cfg.set(k, &v)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Constant grid as `lo,hi,steps`. Query constants default to the realized scores.
    #[arg(long)]
    grid: Option<String>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    run: RunArgs,
    /// A task as `name=path`; repeatable. The dataset kind follows `--dsl`.
    #[arg(long = "task")]
    tasks: Vec<String>,
    /// Number of seeded synthetic tasks to add, seeds starting at `--seed`.
    #[arg(long, default_value_t = 0)]
    synthetic: u64,
    #[arg(long, default_value_t = 100)]
    trajectories: usize,
    #[arg(long, default_value_t = 10)]
    length: usize,
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value = "astar,bfs")]
    algorithms: String,
    /// Table CSV path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Emit the A* scaling curve on the toy task instead of a table.
    #[arg(long)]
    scaling: bool,
    #[arg(long, default_value = "10,20,30,40,50,60,70,80,90,100")]
    sizes: String,
    #[arg(long, default_value_t = 3)]
    repeats: usize,
}

#[derive(Args)]
struct GenArgs {
    /// near or quivr.
    #[arg(long)]
    dsl: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    trajectories: usize,
    #[arg(long, default_value_t = 10)]
    length: usize,
    #[arg(long, default_value_t = 1)]
    dim: usize,
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    /// Planted program text; the per-DSL default when absent.
    #[arg(long)]
    planted: Option<String>,
    #[arg(long)]
    out: PathBuf,
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn parse_list<T: std::str::FromStr>(what: &str, s: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse().map_err(|_| Error::Config(format!("bad {what} `{x}`"))))
        .collect()
}

fn parse_grid(s: &str) -> Result<GridSpec> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [lo, hi, steps] = parts[..] else {
        return Err(Error::Config(format!("grid must be lo,hi,steps, got `{s}`")));
    };
    let num = |x: &str| x.parse::<f64>().map_err(|_| Error::Config(format!("bad grid value `{x}`")));
    let steps = steps
        .parse()
        .map_err(|_| Error::Config(format!("bad grid steps `{steps}`")))?;
    GridSpec::new(num(lo)?, num(hi)?, steps)
}

fn synth(args: &RunArgs) -> Result<u8> {
    let cfg = args.to_config()?;
    let report = run(&cfg)?;
    if cfg.report.is_none() {
        println!("{}", serde_json::to_string_pretty(&report)?);
    }
    log::info!(
        "best {:?} in [{}, {}] after {} expansions",
        report.best_program,
        report.certified_lower,
        report.certified_upper,
        report.nodes_expanded
    );
    Ok(report.exit_code() as u8)
}

fn oracle(args: &OracleArgs) -> Result<u8> {
    let cfg = args.run.to_config()?;
    let grid = args.grid.as_deref().map(parse_grid).transpose()?;
    let path = cfg.data.as_ref().ok_or_else(|| Error::Config("no data path given".into()))?;
    let data = load_dataset(path, cfg.dsl)?;
    let report = run_oracle_on(&cfg, grid, &data)?;
    match &cfg.report {
        Some(p) => report.write(p)?,
        None => println!("{}", serde_json::to_string_pretty(&report)?),
    }
    Ok(0)
}

fn load_task(spec: &str, kind: TaskKind) -> Result<BenchTask> {
    let (name, path) = spec
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("task must be name=path, got `{spec}`")))?;
    Ok(BenchTask {
        name: name.to_string(),
        data: load_dataset(Path::new(path), kind)?,
    })
}

fn bench(args: &BenchArgs) -> Result<u8> {
    let cfg = args.run.to_config()?;
    let out = output(&args.out)?;
    if args.scaling {
        let sizes: Vec<usize> = parse_list("size", &args.sizes)?;
        let points = scaling_curve(&sizes, cfg.seed, args.repeats, cfg.max_seconds)?;
        write_scaling_csv(out, &points)?;
        return Ok(0);
    }
    let algorithms: Vec<Algorithm> = parse_list("algorithm", &args.algorithms)?;
    let mut tasks = args
        .tasks
        .iter()
        .map(|t| load_task(t, cfg.dsl))
        .collect::<Result<Vec<_>>>()?;
    let template = SyntheticParams {
        trajectories: args.trajectories,
        length: args.length,
        noise: args.noise,
        ..SyntheticParams::new(cfg.dsl, cfg.seed)
    };
    tasks.extend(synthetic_tasks(&template, cfg.seed..cfg.seed + args.synthetic)?);
    run_matrix(&cfg, &tasks, &algorithms).write_csv(out)?;
    Ok(0)
}

fn gen(args: &GenArgs) -> Result<u8> {
    let params = SyntheticParams {
        trajectories: args.trajectories,
        length: args.length,
        dim: args.dim,
        noise: args.noise,
        planted: args.planted.clone(),
        ..SyntheticParams::new(args.dsl.parse()?, args.seed)
    };
    let (data, meta) = generate_synthetic(&params)?;
    write_synthetic(&args.out, &data, &meta)?;
    log::info!("wrote {} examples, {} labels flipped", data.len(), meta.flipped);
    Ok(0)
}

fn main() -> ExitCode {
    // Usage errors exit 1; 2 is reserved for budget exhaustion.
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let result = match &cli.command {
        Command::Synth(a) => synth(a),
        Command::Oracle(a) => oracle(a),
        Command::Bench(a) => bench(a),
        Command::Gen(a) => gen(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
