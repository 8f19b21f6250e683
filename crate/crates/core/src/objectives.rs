//! Quantitative objectives over prediction/label pairs and their abstract
//! transformers.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::{interval_add, BoolInterval, Interval, RealInterval};

/// A concrete outcome `(prediction, label)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Outcome {
    pub pred: bool,
    pub label: bool,
}

/// An outcome whose prediction may be undetermined.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AbstractOutcome {
    pub pred: BoolInterval,
    pub label: bool,
}

impl Outcome {
    pub fn new(pred: bool, label: bool) -> Self {
        Outcome { pred, label }
    }
}

impl AbstractOutcome {
    pub fn new(pred: BoolInterval, label: bool) -> Self {
        AbstractOutcome { pred, label }
    }
}

impl From<Outcome> for AbstractOutcome {
    fn from(o: Outcome) -> Self {
        AbstractOutcome::new(BoolInterval::singleton(o.pred), o.label)
    }
}

pub fn accuracy(w: &[Outcome]) -> Result<f64> {
    if w.is_empty() {
        return Err(Error::EmptyOutcomes);
    }
    let correct = w.iter().filter(|o| o.pred == o.label).count();
    Ok(correct as f64 / w.len() as f64)
}

/// Mean of the per-pair correctness intervals.
pub fn abstract_accuracy(w: &[AbstractOutcome]) -> Result<RealInterval> {
    if w.is_empty() {
        return Err(Error::EmptyOutcomes);
    }
    let sum = w.iter().fold(Interval::point(0.0), |acc, o| {
        let correct = match (o.pred, o.label) {
            (BoolInterval::Top, _) => Interval::closed(0.0, 1.0),
            (p, l) if p.lo() == l => Interval::point(1.0),
            _ => Interval::point(0.0),
        };
        interval_add(&acc, &correct)
    });
    let n = w.len() as f64;
    Ok(Interval::closed(sum.lo_f64() / n, sum.hi_f64() / n))
}

/// `2 TP / (TP + FP + |W+|)`, taken as 0 when the denominator vanishes.
pub fn f1_from_counts(tp: u64, fp: u64, positives: u64) -> f64 {
    let den = tp + fp + positives;
    if den == 0 {
        0.0
    } else {
        2.0 * tp as f64 / den as f64
    }
}

pub fn f1(w: &[Outcome]) -> f64 {
    let tp = w.iter().filter(|o| o.pred && o.label).count() as u64;
    let fp = w.iter().filter(|o| o.pred && !o.label).count() as u64;
    let pos = w.iter().filter(|o| o.label).count() as u64;
    f1_from_counts(tp, fp, pos)
}

/// Interval sums of the true-positive and false-positive case tables.
pub fn abstract_tp_fp(w: &[AbstractOutcome]) -> (RealInterval, RealInterval) {
    let t = Tally::from_abstract(w);
    let (a1, b1, a2, b2) = t.tp_fp_bounds();
    (
        Interval::closed(a1 as f64, b1 as f64),
        Interval::closed(a2 as f64, b2 as f64),
    )
}

/// Tight abstract F1: `2 [a1/(a1+b2+P), b1/(b1+a2+P)]`.
pub fn abstract_f1(w: &[AbstractOutcome]) -> RealInterval {
    Tally::from_abstract(w).f1_interval()
}

/// The loose division-based abstraction. Reference only.
pub fn naive_abstract_f1(w: &[AbstractOutcome]) -> RealInterval {
    let t = Tally::from_abstract(w);
    let (a1, b1, a2, b2) = t.tp_fp_bounds();
    let p = t.positives();
    let ratio = |num: u64, den: u64| if den == 0 { 0.0 } else { 2.0 * num as f64 / den as f64 };
    Interval::closed(ratio(a1, b1 + b2 + p), ratio(b1, a1 + a2 + p))
}

/// Outcome counts indexed by label and prediction interval.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tally {
    counts: [[u64; 3]; 2],
}

fn pred_index(p: BoolInterval) -> usize {
    match p {
        BoolInterval::False => 0,
        BoolInterval::Top => 1,
        BoolInterval::True => 2,
    }
}

impl Tally {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_abstract(w: &[AbstractOutcome]) -> Self {
        let mut t = Tally::new();
        for o in w {
            t.add(o.pred, o.label);
        }
        t
    }

    #[inline]
    pub fn add(&mut self, pred: BoolInterval, label: bool) {
        self.counts[label as usize][pred_index(pred)] += 1;
    }

    pub fn merge(&mut self, other: &Tally) {
        for l in 0..2 {
            for p in 0..3 {
                self.counts[l][p] += other.counts[l][p];
            }
        }
    }

    pub fn count(&self, pred: BoolInterval, label: bool) -> u64 {
        self.counts[label as usize][pred_index(pred)]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn positives(&self) -> u64 {
        self.counts[1].iter().sum()
    }

    pub fn undetermined(&self) -> u64 {
        self.counts[0][1] + self.counts[1][1]
    }

    /// `(a1, b1, a2, b2)` with `TP in [a1, b1]` and `FP in [a2, b2]`.
    pub fn tp_fp_bounds(&self) -> (u64, u64, u64, u64) {
        let a1 = self.counts[1][2];
        let b1 = a1 + self.counts[1][1];
        let a2 = self.counts[0][2];
        let b2 = a2 + self.counts[0][1];
        (a1, b1, a2, b2)
    }

    pub fn accuracy_interval(&self) -> RealInterval {
        let n = self.total() as f64;
        let sure = (self.counts[0][0] + self.counts[1][2]) as f64;
        let maybe = self.undetermined() as f64;
        Interval::closed(sure / n, (sure + maybe) / n)
    }

    pub fn f1_interval(&self) -> RealInterval {
        let (a1, b1, a2, b2) = self.tp_fp_bounds();
        let p = self.positives();
        Interval::closed(f1_from_counts(a1, b2, p), f1_from_counts(b1, a2, p))
    }
}

/// A named objective with concrete and abstract forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Accuracy,
    F1,
}

impl Objective {
    pub fn name(self) -> &'static str {
        match self {
            Objective::Accuracy => "accuracy",
            Objective::F1 => "f1",
        }
    }

    pub fn concrete(self, w: &[Outcome]) -> Result<f64> {
        match self {
            Objective::Accuracy => accuracy(w),
            Objective::F1 => Ok(f1(w)),
        }
    }

    pub fn abstract_value(self, w: &[AbstractOutcome]) -> Result<RealInterval> {
        match self {
            Objective::Accuracy => abstract_accuracy(w),
            Objective::F1 => Ok(abstract_f1(w)),
        }
    }

    /// Abstract objective from counts. Exact when nothing is undetermined.
    pub fn from_tally(self, t: &Tally) -> Result<RealInterval> {
        if t.total() == 0 && self == Objective::Accuracy {
            return Err(Error::EmptyOutcomes);
        }
        Ok(match self {
            Objective::Accuracy => t.accuracy_interval(),
            Objective::F1 => t.f1_interval(),
        })
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "accuracy" => Ok(Objective::Accuracy),
            "f1" => Ok(Objective::F1),
            other => Err(Error::Config(format!("unknown objective `{other}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use BoolInterval::{False as F, Top, True as T};

    fn o(p: bool, l: bool) -> Outcome {
        Outcome::new(p, l)
    }

    fn a(p: BoolInterval, l: bool) -> AbstractOutcome {
        AbstractOutcome::new(p, l)
    }

    #[test]
    fn accuracy_examples() {
        assert_eq!(accuracy(&[o(false, false), o(false, true)]).unwrap(), 0.5);
        assert_eq!(accuracy(&[o(true, true)]).unwrap(), 1.0);
        assert_eq!(accuracy(&[o(true, false), o(false, true)]).unwrap(), 0.0);
        assert!(matches!(accuracy(&[]), Err(Error::EmptyOutcomes)));
    }

    #[test]
    fn abstract_accuracy_examples() {
        assert_eq!(abstract_accuracy(&[a(F, false), a(Top, true)]).unwrap(), Interval::closed(0.5, 1.0));
        assert_eq!(abstract_accuracy(&[a(F, false), a(F, true)]).unwrap(), Interval::point(0.5));
        assert!(abstract_accuracy(&[]).is_err());
    }

    #[test]
    fn f1_examples() {
        assert_eq!(f1(&[o(true, true), o(true, false), o(false, true)]), 0.5);
        assert_eq!(f1(&[o(true, true), o(false, false)]), 1.0);
        assert_eq!(f1(&[o(false, true)]), 0.0);
        assert_eq!(f1(&[o(false, false)]), 0.0);
    }

    #[test]
    fn tp_fp_examples() {
        let w = [a(T, true), a(Top, true), a(Top, false)];
        let (tp, fp) = abstract_tp_fp(&w);
        assert_eq!(tp, Interval::closed(1.0, 2.0));
        assert_eq!(fp, Interval::closed(0.0, 1.0));
        assert_eq!(abstract_f1(&w), Interval::closed(0.5, 1.0));
        assert_eq!(naive_abstract_f1(&w), Interval::closed(0.4, 4.0 / 3.0));

        let w = [a(Top, true), a(Top, false)];
        assert_eq!(abstract_f1(&w), Interval::closed(0.0, 1.0));

        let w = [a(Top, true), a(Top, true), a(Top, false)];
        let (tp, fp) = abstract_tp_fp(&w);
        assert_eq!(tp, Interval::closed(0.0, 2.0));
        assert_eq!(fp, Interval::closed(0.0, 1.0));
    }

    #[test]
    fn naive_f1_can_reach_two() {
        let w = [a(Top, true)];
        assert_eq!(naive_abstract_f1(&w).hi_f64(), 2.0);
    }

    #[test]
    fn objective_names_parse() {
        assert_eq!("accuracy".parse::<Objective>().unwrap(), Objective::Accuracy);
        assert_eq!("F1".parse::<Objective>().unwrap(), Objective::F1);
        assert!("recall".parse::<Objective>().is_err());
    }

    fn arb_pred() -> impl Strategy<Value = BoolInterval> {
        prop_oneof![Just(F), Just(Top), Just(T)]
    }

    proptest! {
        #[test]
        fn determined_sets_are_exact(w in prop::collection::vec((any::<bool>(), any::<bool>()), 1..12)) {
            let conc: Vec<Outcome> = w.iter().map(|&(p, l)| o(p, l)).collect();
            let abs: Vec<AbstractOutcome> = conc.iter().map(|&c| c.into()).collect();
            prop_assert_eq!(abstract_f1(&abs), Interval::point(f1(&conc)));
            prop_assert_eq!(abstract_accuracy(&abs).unwrap(), Interval::point(accuracy(&conc).unwrap()));
            prop_assert_eq!(naive_abstract_f1(&abs), Interval::point(f1(&conc)));
        }

        #[test]
        fn tally_agrees_with_lifted_sum(w in prop::collection::vec((arb_pred(), any::<bool>()), 1..12)) {
            let abs: Vec<AbstractOutcome> = w.iter().map(|&(p, l)| a(p, l)).collect();
            let t = Tally::from_abstract(&abs);
            prop_assert_eq!(t.accuracy_interval(), abstract_accuracy(&abs).unwrap());
        }

        #[test]
        fn raising_a_prediction_never_lowers_tp(w in prop::collection::vec((arb_pred(), any::<bool>()), 1..10), i in 0usize..10) {
            let abs: Vec<AbstractOutcome> = w.iter().map(|&(p, l)| a(p, l)).collect();
            let i = i % abs.len();
            let mut raised = abs.clone();
            raised[i].pred = match raised[i].pred { F => Top, _ => T };
            let (tp0, _) = abstract_tp_fp(&abs);
            let (tp1, _) = abstract_tp_fp(&raised);
            prop_assert!(tp1.lo_f64() >= tp0.lo_f64() && tp1.hi_f64() >= tp0.hi_f64());
        }

        #[test]
        fn tight_f1_within_unit_and_naive(w in prop::collection::vec((arb_pred(), any::<bool>()), 1..12)) {
            let abs: Vec<AbstractOutcome> = w.iter().map(|&(p, l)| a(p, l)).collect();
            let tight = abstract_f1(&abs);
            prop_assert!(tight.is_subset_of(&Interval::closed(0.0, 1.0)));
            prop_assert!(tight.is_subset_of(&naive_abstract_f1(&abs)));
        }
    }
}
