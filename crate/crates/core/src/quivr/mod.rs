//! Trajectory queries: sequencing and conjunction over threshold predicates.

mod eval;
mod space;
mod text;

pub use eval::{abs_eval_query, eval_query, SegmentScores};
pub use space::{QuivrBounds, QuivrSpace};
pub use text::parse_query;

use std::fmt;

use crate::constants::Constant;
use crate::data::Dataset;
use crate::error::{Error, Result};

/// Score predicates `g`, thresholded as `g(x) >= c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ScorePredicate {
    Max(usize),
    Min(usize),
    Avg(usize),
}

/// Parameterless predicates `f`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoolPredicate {
    True,
}

impl ScorePredicate {
    pub fn feature(self) -> usize {
        match self {
            ScorePredicate::Max(j) | ScorePredicate::Min(j) | ScorePredicate::Avg(j) => j,
        }
    }

    /// Score of a segment. Empty segments score `-inf` for max and avg and
    /// `+inf` for min.
    pub fn score(self, segment: &[Vec<f64>]) -> Result<f64> {
        let j = self.feature();
        let mut values = Vec::with_capacity(segment.len());
        for x in segment {
            values.push(*x.get(j).ok_or(Error::FeatureOutOfRange { index: j, dim: x.len() })?);
        }
        Ok(match self {
            ScorePredicate::Max(_) => values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            ScorePredicate::Min(_) => values.iter().copied().fold(f64::INFINITY, f64::min),
            ScorePredicate::Avg(_) if values.is_empty() => f64::NEG_INFINITY,
            ScorePredicate::Avg(_) => values.iter().sum::<f64>() / values.len() as f64,
        })
    }
}

impl BoolPredicate {
    pub fn holds(self, _segment: &[Vec<f64>]) -> bool {
        match self {
            BoolPredicate::True => true,
        }
    }
}

impl fmt::Display for ScorePredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScorePredicate::Max(j) => write!(f, "max{j}"),
            ScorePredicate::Min(j) => write!(f, "min{j}"),
            ScorePredicate::Avg(j) => write!(f, "avg{j}"),
        }
    }
}

impl fmt::Display for BoolPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoolPredicate::True => f.write_str("true"),
        }
    }
}

/// Resolves a predicate name such as `max0` or `true`.
pub fn predicate_by_name(name: &str) -> Result<PredicateRef> {
    if name == "true" {
        return Ok(PredicateRef::Bool(BoolPredicate::True));
    }
    for (prefix, make) in [
        ("max", ScorePredicate::Max as fn(usize) -> ScorePredicate),
        ("min", ScorePredicate::Min),
        ("avg", ScorePredicate::Avg),
    ] {
        if let Some(j) = name.strip_prefix(prefix).and_then(|d| d.parse::<usize>().ok()) {
            return Ok(PredicateRef::Score(make(j)));
        }
    }
    Err(Error::UnknownPredicate(name.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredicateRef {
    Bool(BoolPredicate),
    Score(ScorePredicate),
}

/// The predicates offered to the synthesizer.
#[derive(Debug, Clone, PartialEq)]
pub struct PredicateLibrary {
    pub bools: Vec<BoolPredicate>,
    pub scores: Vec<ScorePredicate>,
}

impl PredicateLibrary {
    /// `true` plus max, min and avg of every feature.
    pub fn standard(dim: usize) -> Self {
        PredicateLibrary {
            bools: vec![BoolPredicate::True],
            scores: (0..dim)
                .flat_map(|j| [ScorePredicate::Max(j), ScorePredicate::Min(j), ScorePredicate::Avg(j)])
                .collect(),
        }
    }

    pub fn index_of(&self, g: ScorePredicate) -> Option<usize> {
        self.scores.iter().position(|&s| s == g)
    }
}

/// Sorted distinct scores of `g` over every nonempty segment of the dataset.
pub fn realized_scores(data: &Dataset, g: ScorePredicate) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for ex in &data.examples {
        let table = SegmentScores::new(&ex.features, &[g])?;
        let n = ex.features.len();
        for i in 0..n {
            for j in i + 1..=n {
                out.push(table.get(0, i, j));
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Query {
    Hole,
    Pred0(BoolPredicate),
    PredC(ScorePredicate, Constant),
    Seq(Box<Query>, Box<Query>),
    And(Box<Query>, Box<Query>),
}

impl Query {
    pub fn seq(a: Query, b: Query) -> Query {
        Query::Seq(Box::new(a), Box::new(b))
    }

    pub fn and(a: Query, b: Query) -> Query {
        Query::And(Box::new(a), Box::new(b))
    }

    /// Predicates plus structural holes, each hole counting as one.
    pub fn predicate_count(&self) -> usize {
        match self {
            Query::Hole | Query::Pred0(_) | Query::PredC(..) => 1,
            Query::Seq(a, b) | Query::And(a, b) => a.predicate_count() + b.predicate_count(),
        }
    }

    pub fn parameter_count(&self) -> usize {
        match self {
            Query::Hole | Query::Pred0(_) => 0,
            Query::PredC(..) => 1,
            Query::Seq(a, b) | Query::And(a, b) => a.parameter_count() + b.parameter_count(),
        }
    }

    pub fn has_structural_holes(&self) -> bool {
        match self {
            Query::Hole => true,
            Query::Pred0(_) | Query::PredC(..) => false,
            Query::Seq(a, b) | Query::And(a, b) => a.has_structural_holes() || b.has_structural_holes(),
        }
    }

    /// Constants in pre-order.
    pub fn constants(&self) -> Vec<&Constant> {
        fn go<'a>(q: &'a Query, out: &mut Vec<&'a Constant>) {
            match q {
                Query::PredC(_, c) => out.push(c),
                Query::Seq(a, b) | Query::And(a, b) => {
                    go(a, out);
                    go(b, out);
                }
                Query::Hole | Query::Pred0(_) => {}
            }
        }
        let mut out = Vec::new();
        go(self, &mut out);
        out
    }

    pub fn for_each_constant_mut(&mut self, f: &mut dyn FnMut(&mut Constant)) {
        match self {
            Query::PredC(_, c) => f(c),
            Query::Seq(a, b) | Query::And(a, b) => {
                a.for_each_constant_mut(f);
                b.for_each_constant_mut(f);
            }
            Query::Hole | Query::Pred0(_) => {}
        }
    }

    pub fn midpoint_instance(&self) -> Query {
        let mut out = self.clone();
        out.for_each_constant_mut(&mut |c| *c = c.instantiate_midpoint());
        out
    }

    pub fn is_concrete(&self) -> bool {
        !self.has_structural_holes() && self.constants().iter().all(|c| c.is_determined())
    }

    pub fn max_feature(&self) -> Option<usize> {
        match self {
            Query::PredC(g, _) => Some(g.feature()),
            Query::Seq(a, b) | Query::And(a, b) => match (a.max_feature(), b.max_feature()) {
                (Some(x), Some(y)) => Some(x.max(y)),
                (x, y) => x.or(y),
            },
            Query::Hole | Query::Pred0(_) => None,
        }
    }
}
