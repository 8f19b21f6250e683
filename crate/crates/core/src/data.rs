//! Datasets: JSONL ingestion, validation, serialization, normalization.

use std::fmt;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Labeling tasks carry one label per step; query tasks one per trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskKind {
    Labeling,
    Query,
}

impl FromStr for TaskKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "labeling" | "near" => Ok(TaskKind::Labeling),
            "query" | "quivr" => Ok(TaskKind::Query),
            other => Err(Error::Config(format!("unknown task kind `{other}`"))),
        }
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TaskKind::Labeling => "labeling",
            TaskKind::Query => "query",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Labels {
    PerStep(Vec<bool>),
    Whole(bool),
}

/// One trajectory with its labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Example {
    pub features: Vec<Vec<f64>>,
    pub labels: Labels,
}

impl Example {
    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn step_labels(&self) -> Option<&[bool]> {
        match &self.labels {
            Labels::PerStep(v) => Some(v),
            Labels::Whole(_) => None,
        }
    }

    pub fn whole_label(&self) -> Option<bool> {
        match self.labels {
            Labels::Whole(b) => Some(b),
            Labels::PerStep(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub kind: TaskKind,
    pub dim: usize,
    pub examples: Vec<Example>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLine {
    features: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<bool>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<bool>,
}

impl Dataset {
    /// Validates shapes and infers the feature dimension.
    pub fn new(kind: TaskKind, examples: Vec<Example>) -> Result<Self> {
        let mut dim = None;
        for (i, ex) in examples.iter().enumerate() {
            check_example(kind, ex, &mut dim).map_err(|message| Error::Data {
                path: "<memory>".into(),
                line: i + 1,
                message,
            })?;
        }
        Ok(Dataset {
            kind,
            dim: dim.unwrap_or(0),
            examples,
        })
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    /// Number of labeled outcomes: steps for labeling tasks, trajectories
    /// for query tasks.
    pub fn outcome_count(&self) -> usize {
        match self.kind {
            TaskKind::Labeling => self.examples.iter().map(Example::len).sum(),
            TaskKind::Query => self.examples.len(),
        }
    }

    pub fn to_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        for ex in &self.examples {
            let (labels, label) = match &ex.labels {
                Labels::PerStep(v) => (Some(v.clone()), None),
                Labels::Whole(b) => (None, Some(*b)),
            };
            let line = RawLine {
                features: ex.features.clone(),
                labels,
                label,
            };
            serde_json::to_writer(&mut out, &line)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(f);
        self.to_jsonl(&mut w)?;
        w.flush()?;
        Ok(())
    }
}

fn check_example(kind: TaskKind, ex: &Example, dim: &mut Option<usize>) -> std::result::Result<(), String> {
    for (t, step) in ex.features.iter().enumerate() {
        match dim {
            None => *dim = Some(step.len()),
            Some(d) if *d != step.len() => {
                return Err(format!("step {t} has dimension {}, expected {d}", step.len()));
            }
            _ => {}
        }
        if let Some(j) = step.iter().position(|v| !v.is_finite()) {
            return Err(format!("step {t} feature {j} is not finite"));
        }
    }
    match (kind, &ex.labels) {
        (TaskKind::Labeling, Labels::PerStep(v)) if v.len() != ex.features.len() => Err(format!(
            "{} labels for {} steps",
            v.len(),
            ex.features.len()
        )),
        (TaskKind::Labeling, Labels::Whole(_)) => Err("labeling task needs per-step \"labels\"".into()),
        (TaskKind::Query, Labels::PerStep(_)) => Err("query task needs a whole-trajectory \"label\"".into()),
        _ => Ok(()),
    }
}

/// Reads JSONL from any reader. `path` is only used in error messages.
pub fn read_dataset<R: BufRead>(reader: R, kind: TaskKind, path: &Path) -> Result<Dataset> {
    let mut examples = Vec::new();
    let mut dim = None;
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let err = |message: String| Error::Data {
            path: path.to_path_buf(),
            line: line_no,
            message,
        };
        let raw: RawLine = serde_json::from_str(&line).map_err(|e| err(e.to_string()))?;
        let labels = match (raw.labels, raw.label) {
            (Some(v), None) => Labels::PerStep(v),
            (None, Some(b)) => Labels::Whole(b),
            (Some(_), Some(_)) => return Err(err("both \"labels\" and \"label\" present".into())),
            (None, None) => return Err(err("missing \"labels\" or \"label\"".into())),
        };
        let ex = Example {
            features: raw.features,
            labels,
        };
        check_example(kind, &ex, &mut dim).map_err(err)?;
        examples.push(ex);
    }
    if examples.is_empty() {
        return Err(Error::Data {
            path: path.to_path_buf(),
            line: 0,
            message: "no examples".into(),
        });
    }
    Ok(Dataset {
        kind,
        dim: dim.unwrap_or(0),
        examples,
    })
}

pub fn load_dataset(path: &Path, kind: TaskKind) -> Result<Dataset> {
    let f = std::fs::File::open(path)?;
    read_dataset(BufReader::new(f), kind, path)
}

/// Per-dimension min/max used for the affine map onto `[-1, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimParams {
    pub min: f64,
    pub max: f64,
    /// Constant dimensions pass through unscaled.
    pub constant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationParams {
    pub dims: Vec<DimParams>,
}

impl NormalizationParams {
    pub fn fit(dataset: &Dataset) -> Self {
        let mut lo = vec![f64::INFINITY; dataset.dim];
        let mut hi = vec![f64::NEG_INFINITY; dataset.dim];
        for ex in &dataset.examples {
            for step in &ex.features {
                for (j, &v) in step.iter().enumerate() {
                    lo[j] = lo[j].min(v);
                    hi[j] = hi[j].max(v);
                }
            }
        }
        let dims = lo
            .into_iter()
            .zip(hi)
            .map(|(min, max)| {
                if min.is_finite() && min < max {
                    DimParams {
                        min,
                        max,
                        constant: false,
                    }
                } else {
                    let v = if min.is_finite() { min } else { 0.0 };
                    DimParams {
                        min: v,
                        max: v,
                        constant: true,
                    }
                }
            })
            .collect();
        NormalizationParams { dims }
    }

    pub fn apply_value(&self, j: usize, v: f64) -> f64 {
        let d = &self.dims[j];
        if d.constant {
            v
        } else {
            2.0 * (v - d.min) / (d.max - d.min) - 1.0
        }
    }

    pub fn invert_value(&self, j: usize, v: f64) -> f64 {
        let d = &self.dims[j];
        if d.constant {
            v
        } else {
            (v + 1.0) / 2.0 * (d.max - d.min) + d.min
        }
    }

    /// Maps features; out-of-range values are not clamped.
    pub fn apply(&self, dataset: &Dataset) -> Dataset {
        self.map(dataset, |j, v| self.apply_value(j, v))
    }

    pub fn invert(&self, dataset: &Dataset) -> Dataset {
        self.map(dataset, |j, v| self.invert_value(j, v))
    }

    fn map(&self, dataset: &Dataset, f: impl Fn(usize, f64) -> f64) -> Dataset {
        let examples = dataset
            .examples
            .iter()
            .map(|ex| Example {
                features: ex
                    .features
                    .iter()
                    .map(|step| step.iter().enumerate().map(|(j, &v)| f(j, v)).collect())
                    .collect(),
                labels: ex.labels.clone(),
            })
            .collect();
        Dataset {
            kind: dataset.kind,
            dim: dataset.dim,
            examples,
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

/// Fits parameters on `dataset` and applies them.
pub fn normalize(dataset: &Dataset) -> (Dataset, NormalizationParams) {
    let params = NormalizationParams::fit(dataset);
    for (j, d) in params.dims.iter().enumerate() {
        if d.constant {
            log::warn!("feature {j} is constant ({}); left unscaled", d.min);
        }
    }
    (params.apply(dataset), params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn read(text: &str, kind: TaskKind) -> Result<Dataset> {
        read_dataset(text.as_bytes(), kind, Path::new("test.jsonl"))
    }

    #[test]
    fn loads_labeling_line() {
        let d = read(r#"{"features": [[101],[65]], "labels": [false,true]}"#, TaskKind::Labeling).unwrap();
        assert_eq!(d.dim, 1);
        assert_eq!(d.examples[0].features, vec![vec![101.0], vec![65.0]]);
        assert_eq!(d.examples[0].labels, Labels::PerStep(vec![false, true]));
    }

    #[test]
    fn loads_query_line() {
        let d = read(r#"{"features": [[0.2],[0.9]], "label": true}"#, TaskKind::Query).unwrap();
        assert_eq!(d.examples[0].labels, Labels::Whole(true));
    }

    #[test]
    fn shape_errors_name_the_line() {
        let text = "{\"features\": [[1]], \"labels\": [true]}\n{\"features\": [[1],[2]], \"labels\": [true]}\n";
        match read(text, TaskKind::Labeling) {
            Err(Error::Data { line, message, .. }) => {
                assert_eq!(line, 2);
                assert!(message.contains("labels"), "{message}");
            }
            other => panic!("expected data error, got {other:?}"),
        }
        assert!(matches!(read("", TaskKind::Labeling), Err(Error::Data { .. })));
        assert!(matches!(
            read(r#"{"features": [[1]], "label": true}"#, TaskKind::Labeling),
            Err(Error::Data { line: 1, .. })
        ));
        assert!(matches!(
            read(r#"{"features": [[1],[2,3]], "label": true}"#, TaskKind::Query),
            Err(Error::Data { line: 1, .. })
        ));
    }

    #[test]
    fn normalization_is_affine_and_unclamped() {
        let feats: Vec<Vec<f64>> = (0..=100).map(|v| vec![v as f64]).collect();
        let labels = Labels::PerStep(vec![false; feats.len()]);
        let train = Dataset::new(
            TaskKind::Labeling,
            vec![Example {
                features: feats,
                labels,
            }],
        )
        .unwrap();
        let (_, params) = normalize(&train);
        assert!((params.apply_value(0, 101.0) - 1.02).abs() < 1e-12);
        assert_eq!(params.apply_value(0, 0.0), -1.0);
        assert_eq!(params.apply_value(0, 100.0), 1.0);
    }

    #[test]
    fn unit_range_is_identity_and_constant_dims_pass_through() {
        let d = Dataset::new(
            TaskKind::Query,
            vec![Example {
                features: vec![vec![-1.0, 5.0], vec![1.0, 5.0], vec![0.25, 5.0]],
                labels: Labels::Whole(true),
            }],
        )
        .unwrap();
        let (n, p) = normalize(&d);
        assert_eq!(n, d);
        assert!(p.dims[1].constant && !p.dims[0].constant);
    }

    fn arb_dataset() -> impl Strategy<Value = Dataset> {
        (1usize..4, prop::collection::vec((0usize..6, any::<bool>()), 1..5)).prop_flat_map(|(dim, shapes)| {
            let exs: Vec<_> = shapes
                .into_iter()
                .map(move |(len, per_step)| {
                    (
                        prop::collection::vec(prop::collection::vec(-1e3f64..1e3, dim), len),
                        prop::collection::vec(any::<bool>(), len),
                        Just(per_step),
                    )
                })
                .collect();
            (Just(dim), exs)
        })
        .prop_map(|(dim, exs)| {
            let examples = exs
                .into_iter()
                .map(|(features, labels, _)| Example {
                    features,
                    labels: Labels::PerStep(labels),
                })
                .collect();
            let mut d = Dataset::new(TaskKind::Labeling, examples).unwrap();
            d.dim = dim;
            d
        })
    }

    proptest! {
        #[test]
        fn jsonl_round_trip(d in arb_dataset()) {
            prop_assume!(d.examples.iter().any(|e| !e.is_empty()));
            let mut buf = Vec::new();
            d.to_jsonl(&mut buf).unwrap();
            let back = read_dataset(buf.as_slice(), TaskKind::Labeling, Path::new("x")).unwrap();
            prop_assert_eq!(back, d);
        }

        #[test]
        fn normalization_inverts(d in arb_dataset()) {
            let (n, p) = normalize(&d);
            let back = p.invert(&n);
            for (a, b) in back.examples.iter().zip(&d.examples) {
                for (sa, sb) in a.features.iter().zip(&b.features) {
                    for (x, y) in sa.iter().zip(sb) {
                        prop_assert!((x - y).abs() <= 1e-12 * (1.0 + y.abs()));
                    }
                }
            }
        }
    }
}
