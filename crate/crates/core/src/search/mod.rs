//! Best-first and breadth-first search over generalized partial programs.

mod progress;

pub use progress::{
    state_at, write_progress_csv, write_progress_csv_file, ProgressRecord, ProgressSchedule, TABLE_CHECKPOINTS,
};

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::RealInterval;

/// Result of asking a space to refine a node.
#[derive(Debug, Clone)]
pub enum Expansion<N> {
    Children(Vec<N>),
    /// Nothing left to refine; bounds are exact.
    Leaf,
    /// Some box is undetermined but the split-depth limit forbids refining it.
    DepthLimited,
}

/// A space of generalized partial programs bound to a dataset and objective.
///
/// Implementations must be pure: `children` must cover the parent, `bounds`
/// must contain the objective of every program the node denotes and be exact
/// on concrete nodes.
pub trait ProgramSpace: Sync {
    type Node: Clone + Send + Sync;
    type Program: Clone + Send + Sync;

    fn root(&self) -> Self::Node;
    fn children(&self, node: &Self::Node, max_split_depth: u32) -> Expansion<Self::Node>;
    /// The abstract objective of `node`.
    fn bounds(&self, node: &Self::Node) -> RealInterval;
    /// Midpoint instantiation when the node has no structural holes.
    fn witness(&self, node: &Self::Node) -> Option<Self::Program>;
    fn evaluate(&self, program: &Self::Program) -> f64;
    fn is_concrete(&self, node: &Self::Node) -> bool;
    fn show_node(&self, node: &Self::Node) -> String;
    fn show_program(&self, program: &Self::Program) -> String;
    fn example_count(&self) -> usize;
}

/// Where a node's lower bound comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum LowerBoundMode {
    /// Concrete objective of the midpoint instantiation.
    #[default]
    Midpoint,
    /// Lower endpoint of the abstract objective.
    Abstract,
}

impl FromStr for LowerBoundMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "midpoint" => Ok(LowerBoundMode::Midpoint),
            "abstract" => Ok(LowerBoundMode::Abstract),
            other => Err(Error::Config(format!("unknown lower-bound mode `{other}`"))),
        }
    }
}

impl fmt::Display for LowerBoundMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LowerBoundMode::Midpoint => "midpoint",
            LowerBoundMode::Abstract => "abstract",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Astar,
    Bfs,
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "astar" | "a*" => Ok(Algorithm::Astar),
            "bfs" => Ok(Algorithm::Bfs),
            other => Err(Error::Config(format!("unknown algorithm `{other}`"))),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Astar => "astar",
            Algorithm::Bfs => "bfs",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Budget {
    pub max_seconds: Option<f64>,
    pub max_expansions: Option<u64>,
    pub max_split_depth: u32,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_seconds: None,
            max_expansions: None,
            max_split_depth: 30,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub epsilon: f64,
    pub budget: Budget,
    pub lower_bound: LowerBoundMode,
    pub progress: ProgressSchedule,
    /// Worker threads for scoring children; 1 keeps everything on the caller.
    pub workers: usize,
    /// Record expanded nodes and the final frontier as text.
    pub record_trace: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            epsilon: 0.0,
            budget: Budget::default(),
            lower_bound: LowerBoundMode::default(),
            progress: ProgressSchedule::Off,
            workers: 1,
            record_trace: false,
        }
    }
}

/// A frontier entry.
#[derive(Debug, Clone)]
pub struct SearchNode<N> {
    pub program: N,
    pub upper: f64,
    pub lower: f64,
    pub bounds: RealInterval,
    pub seq: u64,
}

impl<N> SearchNode<N> {
    fn priority(&self, other: &Self) -> Ordering {
        self.upper
            .total_cmp(&other.upper)
            .then(self.lower.total_cmp(&other.lower))
            .then(other.seq.cmp(&self.seq))
    }
}

struct ByPriority<N>(SearchNode<N>);

impl<N> PartialEq for ByPriority<N> {
    fn eq(&self, other: &Self) -> bool {
        self.0.seq == other.0.seq
    }
}

impl<N> Eq for ByPriority<N> {}

impl<N> PartialOrd for ByPriority<N> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<N> Ord for ByPriority<N> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.priority(&other.0)
    }
}

fn order_key(x: f64) -> i64 {
    let bits = x.to_bits() as i64;
    if bits < 0 {
        bits ^ i64::MAX
    } else {
        bits
    }
}

enum Frontier<N> {
    Best(BinaryHeap<ByPriority<N>>),
    Fifo {
        queue: VecDeque<SearchNode<N>>,
        uppers: BTreeMap<i64, (f64, usize)>,
    },
}

impl<N> Frontier<N> {
    fn new(algorithm: Algorithm) -> Self {
        match algorithm {
            Algorithm::Astar => Frontier::Best(BinaryHeap::new()),
            Algorithm::Bfs => Frontier::Fifo {
                queue: VecDeque::new(),
                uppers: BTreeMap::new(),
            },
        }
    }

    fn push(&mut self, node: SearchNode<N>) {
        match self {
            Frontier::Best(h) => h.push(ByPriority(node)),
            Frontier::Fifo { queue, uppers } => {
                uppers.entry(order_key(node.upper)).or_insert((node.upper, 0)).1 += 1;
                queue.push_back(node);
            }
        }
    }

    fn pop(&mut self) -> Option<SearchNode<N>> {
        match self {
            Frontier::Best(h) => h.pop().map(|b| b.0),
            Frontier::Fifo { queue, uppers } => {
                let node = queue.pop_front()?;
                let k = order_key(node.upper);
                let slot = uppers.get_mut(&k).expect("tracked upper");
                slot.1 -= 1;
                if slot.1 == 0 {
                    uppers.remove(&k);
                }
                Some(node)
            }
        }
    }

    fn max_upper(&self) -> Option<f64> {
        match self {
            Frontier::Best(h) => h.peek().map(|b| b.0.upper),
            Frontier::Fifo { uppers, .. } => uppers.values().next_back().map(|v| v.0),
        }
    }

    fn len(&self) -> usize {
        match self {
            Frontier::Best(h) => h.len(),
            Frontier::Fifo { queue, .. } => queue.len(),
        }
    }

    fn nodes(&self) -> Vec<&SearchNode<N>> {
        match self {
            Frontier::Best(h) => h.iter().map(|b| &b.0).collect(),
            Frontier::Fifo { queue, .. } => queue.iter().collect(),
        }
    }
}

/// Greatest lower and greatest upper bound over `(lower, upper)` pairs.
pub fn frontier_bounds(nodes: impl IntoIterator<Item = (f64, f64)>) -> Result<(f64, f64)> {
    let mut it = nodes.into_iter().peekable();
    if it.peek().is_none() {
        return Err(Error::EmptyFrontier);
    }
    Ok(it.fold((f64::NEG_INFINITY, f64::NEG_INFINITY), |(l, u), (nl, nu)| (l.max(nl), u.max(nu))))
}

/// Why the search stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    Converged,
    ExpansionBudget,
    TimeBudget,
    /// The frontier emptied while depth-limited nodes still leave a gap.
    Exhausted,
}

/// A node as text, for traces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeSummary {
    pub seq: u64,
    pub program: String,
    pub lower: f64,
    pub upper: f64,
    pub abstract_lo: f64,
    pub abstract_hi: f64,
}

#[derive(Debug, Clone)]
pub struct SynthesisResult<P> {
    pub best_program: Option<P>,
    pub best_program_text: Option<String>,
    /// Recomputed objective of `best_program`; 0 when no program was found.
    pub certified_lower: f64,
    pub certified_upper: f64,
    pub epsilon_used: f64,
    pub nodes_expanded: u64,
    pub nodes_generated: u64,
    pub wall_time: f64,
    pub converged: bool,
    pub termination: Termination,
    pub lower_bound_mode: LowerBoundMode,
    pub algorithm: Algorithm,
    pub root_bounds: RealInterval,
    pub root_degenerate: bool,
    /// True if some node could not be refined because of the depth limit.
    pub depth_limited: bool,
    pub progress_log: Vec<ProgressRecord>,
    pub trace: Vec<NodeSummary>,
    pub final_frontier: Vec<NodeSummary>,
}

impl<P> SynthesisResult<P> {
    pub fn range(&self) -> f64 {
        (self.certified_upper - self.certified_lower).max(0.0)
    }
}

/// Called after each expansion with every node that still covers part of
/// the space: the frontier and the nodes retired without children.
pub trait SearchObserver<N> {
    fn after_expansion(&mut self, frontier: &[&N], retired: &[&N]);
}

pub fn astar_synthesize<S: ProgramSpace>(space: &S, config: &SearchConfig) -> Result<SynthesisResult<S::Program>> {
    search(space, config, Algorithm::Astar, None)
}

pub fn bfs_synthesize<S: ProgramSpace>(space: &S, config: &SearchConfig) -> Result<SynthesisResult<S::Program>> {
    search(space, config, Algorithm::Bfs, None)
}

pub fn synthesize<S: ProgramSpace>(
    space: &S,
    config: &SearchConfig,
    algorithm: Algorithm,
) -> Result<SynthesisResult<S::Program>> {
    search(space, config, algorithm, None)
}

struct Scored<N, P> {
    node: N,
    bounds: RealInterval,
    lower: f64,
    witness: Option<P>,
}

fn score<S: ProgramSpace>(space: &S, node: S::Node, mode: LowerBoundMode) -> Scored<S::Node, S::Program> {
    let bounds = space.bounds(&node);
    let witness = space.witness(&node);
    let lower = match (mode, &witness) {
        (LowerBoundMode::Midpoint, Some(w)) => space.evaluate(w),
        _ => bounds.lo_f64(),
    };
    Scored {
        node,
        bounds,
        lower,
        witness,
    }
}

struct Incumbent<P> {
    lower: f64,
    program: P,
}

/// The search loop shared by both orders.
pub fn search<S: ProgramSpace>(
    space: &S,
    config: &SearchConfig,
    algorithm: Algorithm,
    mut observer: Option<&mut dyn SearchObserver<S::Node>>,
) -> Result<SynthesisResult<S::Program>> {
    if space.example_count() == 0 {
        return Err(Error::EmptyDataset);
    }
    if !(config.epsilon >= 0.0 && config.epsilon.is_finite()) {
        return Err(Error::Config(format!("epsilon must be finite and >= 0, got {}", config.epsilon)));
    }
    let pool = if config.workers > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(config.workers)
                .build()
                .map_err(|e| Error::Config(e.to_string()))?,
        )
    } else {
        None
    };
    let start = Instant::now();
    let mode = config.lower_bound;
    let eps = config.epsilon;

    let mut frontier = Frontier::new(algorithm);
    let mut incumbent: Option<Incumbent<S::Program>> = None;
    let mut hole_lower = f64::NEG_INFINITY;
    let mut retired_upper = f64::NEG_INFINITY;
    let mut retired: Vec<S::Node> = Vec::new();
    let mut seq: u64 = 0;
    let mut expanded: u64 = 0;
    let mut depth_limited = false;
    let mut trace = Vec::new();
    let mut log = Vec::new();
    let mut next_checkpoint = 0usize;

    let admit = |s: Scored<S::Node, S::Program>,
                 seq: &mut u64,
                 frontier: &mut Frontier<S::Node>,
                 incumbent: &mut Option<Incumbent<S::Program>>,
                 hole_lower: &mut f64| {
        match s.witness {
            Some(w) if incumbent.as_ref().is_none_or(|i| s.lower > i.lower) => {
                *incumbent = Some(Incumbent {
                    lower: s.lower,
                    program: w,
                });
            }
            Some(_) => {}
            None => *hole_lower = hole_lower.max(s.lower),
        }
        frontier.push(SearchNode {
            program: s.node,
            upper: s.bounds.hi_f64(),
            lower: s.lower,
            bounds: s.bounds,
            seq: *seq,
        });
        *seq += 1;
    };

    let root = score(space, space.root(), mode);
    let root_bounds = root.bounds;
    let root_degenerate = root_bounds.lo_f64() == root_bounds.hi_f64();
    if root_degenerate {
        log::info!("root bounds are already degenerate: {root_bounds}");
    }
    admit(root, &mut seq, &mut frontier, &mut incumbent, &mut hole_lower);

    let global_upper = |frontier: &Frontier<S::Node>, retired_upper: f64| {
        frontier.max_upper().unwrap_or(f64::NEG_INFINITY).max(retired_upper)
    };
    let best_lower = |incumbent: &Option<Incumbent<S::Program>>, hole_lower: f64| {
        incumbent.as_ref().map_or(f64::NEG_INFINITY, |i| i.lower).max(hole_lower).max(0.0)
    };
    let record = |expanded: u64, frontier: &Frontier<S::Node>, incumbent: &Option<Incumbent<S::Program>>, hole_lower: f64, retired_upper: f64| {
        ProgressRecord {
            time_s: start.elapsed().as_secs_f64(),
            best_lower: best_lower(incumbent, hole_lower),
            frontier_upper: global_upper(frontier, retired_upper),
            nodes_expanded: expanded,
        }
    };
    log.push(record(0, &frontier, &incumbent, hole_lower, retired_upper));

    let termination = loop {
        let upper = global_upper(&frontier, retired_upper);
        if let Some(inc) = &incumbent {
            if upper - inc.lower <= eps {
                break Termination::Converged;
            }
        }
        if frontier.len() == 0 {
            break Termination::Exhausted;
        }
        if config.budget.max_expansions.is_some_and(|m| expanded >= m) {
            break Termination::ExpansionBudget;
        }
        if config
            .budget
            .max_seconds
            .is_some_and(|s| start.elapsed().as_secs_f64() >= s)
        {
            break Termination::TimeBudget;
        }

        let node = frontier.pop().expect("nonempty frontier");
        expanded += 1;
        if config.record_trace {
            trace.push(summarize(space, &node));
        }
        match space.children(&node.program, config.budget.max_split_depth) {
            Expansion::Children(kids) => {
                let scored: Vec<_> = match &pool {
                    Some(p) => p.install(|| kids.into_par_iter().map(|k| score(space, k, mode)).collect()),
                    None => kids.into_iter().map(|k| score(space, k, mode)).collect(),
                };
                for s in scored {
                    admit(s, &mut seq, &mut frontier, &mut incumbent, &mut hole_lower);
                }
            }
            Expansion::Leaf => {
                retired_upper = retired_upper.max(node.upper);
                if observer.is_some() {
                    retired.push(node.program);
                }
            }
            Expansion::DepthLimited => {
                depth_limited = true;
                retired_upper = retired_upper.max(node.upper);
                if observer.is_some() {
                    retired.push(node.program);
                }
            }
        }
        if let Some(obs) = observer.as_deref_mut() {
            let live: Vec<&S::Node> = frontier.nodes().into_iter().map(|n| &n.program).collect();
            let dead: Vec<&S::Node> = retired.iter().collect();
            obs.after_expansion(&live, &dead);
        }
        while next_checkpoint < config.progress.len()
            && config
                .progress
                .reached(next_checkpoint, start.elapsed().as_secs_f64(), expanded)
        {
            log.push(record(expanded, &frontier, &incumbent, hole_lower, retired_upper));
            next_checkpoint += 1;
        }
    };

    let certified_upper = global_upper(&frontier, retired_upper).max(best_lower(&incumbent, hole_lower));
    let final_row = record(expanded, &frontier, &incumbent, hole_lower, retired_upper);
    if log.last().is_none_or(|r: &ProgressRecord| *r != final_row) {
        log.push(final_row);
    }
    let final_frontier = if config.record_trace {
        let mut nodes: Vec<_> = frontier.nodes().into_iter().map(|n| summarize(space, n)).collect();
        nodes.sort_by_key(|n| n.seq);
        nodes
    } else {
        Vec::new()
    };
    let (best_program, certified_lower) = match incumbent {
        Some(inc) => {
            let value = space.evaluate(&inc.program);
            (Some(inc.program), value)
        }
        None => (None, best_lower(&None, hole_lower)),
    };
    let converged = termination == Termination::Converged
        || (termination == Termination::Exhausted && best_program.is_some() && certified_upper - certified_lower <= eps);
    Ok(SynthesisResult {
        best_program_text: best_program.as_ref().map(|p| space.show_program(p)),
        best_program,
        certified_lower,
        certified_upper: certified_upper.max(certified_lower),
        epsilon_used: eps,
        nodes_expanded: expanded,
        nodes_generated: seq,
        wall_time: start.elapsed().as_secs_f64(),
        converged,
        termination: if converged { Termination::Converged } else { termination },
        lower_bound_mode: mode,
        algorithm,
        root_bounds,
        root_degenerate,
        depth_limited,
        progress_log: log,
        trace,
        final_frontier,
    })
}

fn summarize<S: ProgramSpace>(space: &S, n: &SearchNode<S::Node>) -> NodeSummary {
    NodeSummary {
        seq: n.seq,
        program: space.show_node(&n.program),
        lower: n.lower,
        upper: n.upper,
        abstract_lo: n.bounds.lo_f64(),
        abstract_hi: n.bounds.hi_f64(),
    }
}
