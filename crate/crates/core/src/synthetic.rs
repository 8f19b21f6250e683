//! Seeded synthetic tasks labeled by a planted program.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Example, Labels, TaskKind};
use crate::error::{Error, Result};
use crate::near::{eval_ll, parse_ll, threshold_labels};
use crate::quivr::{eval_query, parse_query};

pub const DEFAULT_NEAR_PLANTED: &str = "map(-1*z1 + 0.3)";
pub const DEFAULT_QUIVR_PLANTED: &str = "(max0 >= 0.7) ; (max0 >= 0.2)";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticParams {
    pub kind: TaskKind,
    pub seed: u64,
    pub trajectories: usize,
    pub length: usize,
    pub dim: usize,
    /// Probability of flipping each label.
    pub noise: f64,
    /// Program text; the per-kind default when absent.
    pub planted: Option<String>,
}

impl SyntheticParams {
    pub fn new(kind: TaskKind, seed: u64) -> Self {
        SyntheticParams {
            kind,
            seed,
            trajectories: 20,
            length: 10,
            dim: 1,
            noise: 0.0,
            planted: None,
        }
    }

    pub fn planted_text(&self) -> &str {
        match (&self.planted, self.kind) {
            (Some(p), _) => p,
            (None, TaskKind::Labeling) => DEFAULT_NEAR_PLANTED,
            (None, TaskKind::Query) => DEFAULT_QUIVR_PLANTED,
        }
    }
}

/// What the generator did, written next to the dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticMeta {
    pub params: SyntheticParams,
    pub planted: String,
    pub flipped: usize,
}

/// Features are uniform on `[-1, 1]`; labels come from the planted program
/// and are then flipped independently with probability `noise`.
pub fn generate_synthetic(params: &SyntheticParams) -> Result<(Dataset, SyntheticMeta)> {
    if !(0.0..=1.0).contains(&params.noise) {
        return Err(Error::Config(format!("noise must be in [0, 1], got {}", params.noise)));
    }
    if params.dim == 0 || params.trajectories == 0 || params.length == 0 {
        return Err(Error::Config("trajectories, length and dim must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let planted = params.planted_text().to_string();
    let mut flipped = 0;
    let mut flip = |b: bool, rng: &mut ChaCha8Rng| {
        if params.noise > 0.0 && rng.gen_bool(params.noise) {
            flipped += 1;
            !b
        } else {
            b
        }
    };
    let mut examples = Vec::with_capacity(params.trajectories);
    match params.kind {
        TaskKind::Labeling => {
            let program = parse_ll(&planted)?;
            for _ in 0..params.trajectories {
                let features = random_traj(&mut rng, params.length, params.dim);
                let clean = threshold_labels(&eval_ll(&program, &features)?);
                let labels = clean.into_iter().map(|b| flip(b, &mut rng)).collect();
                examples.push(Example {
                    features,
                    labels: Labels::PerStep(labels),
                });
            }
        }
        TaskKind::Query => {
            let query = parse_query(&planted)?;
            for _ in 0..params.trajectories {
                let features = random_traj(&mut rng, params.length, params.dim);
                let label = flip(eval_query(&query, &features)?, &mut rng);
                examples.push(Example {
                    features,
                    labels: Labels::Whole(label),
                });
            }
        }
    }
    let data = Dataset::new(params.kind, examples)?;
    Ok((
        data,
        SyntheticMeta {
            params: params.clone(),
            planted,
            flipped,
        },
    ))
}

fn random_traj(rng: &mut ChaCha8Rng, length: usize, dim: usize) -> Vec<Vec<f64>> {
    (0..length)
        .map(|_| (0..dim).map(|_| rng.gen_range(-1.0..=1.0)).collect())
        .collect()
}

/// `data.jsonl` gets `data.meta.json`.
pub fn meta_path(data_path: &Path) -> PathBuf {
    data_path.with_extension("meta.json")
}

pub fn write_synthetic(path: &Path, data: &Dataset, meta: &SyntheticMeta) -> Result<()> {
    data.save(path)?;
    let file = std::fs::File::create(meta_path(path))?;
    serde_json::to_writer_pretty(file, meta)?;
    Ok(())
}
