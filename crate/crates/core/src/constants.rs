//! Constant holes annotated with interval boxes, and how they are refined.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::{fmt_real, split_interval, split_isolating, RealInterval};

/// A constant hole's annotation and how many times it has been split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxedHole {
    pub interval: RealInterval,
    pub depth: u32,
}

/// A real constant position: either fixed or constrained to a box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Constant {
    Fixed(f64),
    Boxed(BoxedHole),
}

impl Constant {
    pub fn boxed(interval: RealInterval) -> Self {
        Constant::Boxed(BoxedHole { interval, depth: 0 })
    }

    pub fn abstract_value(&self) -> RealInterval {
        match self {
            Constant::Fixed(v) => RealInterval::point(*v),
            Constant::Boxed(h) => h.interval,
        }
    }

    /// The value used by midpoint instantiation.
    pub fn midpoint(&self) -> f64 {
        match self {
            Constant::Fixed(v) => *v,
            Constant::Boxed(h) => h.interval.midpoint(),
        }
    }

    /// Fixed, or boxed with a single member.
    pub fn is_determined(&self) -> bool {
        match self {
            Constant::Fixed(_) => true,
            Constant::Boxed(h) => h.interval.is_singleton(),
        }
    }

    pub fn instantiate_midpoint(&self) -> Constant {
        Constant::Fixed(self.midpoint())
    }
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constant::Fixed(v) => f.write_str(&fmt_real(*v)),
            Constant::Boxed(h) => write!(f, "{}", h.interval),
        }
    }
}

/// How a constant box is refined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SplitPolicy {
    /// Two closed halves sharing the midpoint.
    #[default]
    Bisect,
    /// Open lower part, the midpoint itself, open upper part.
    Isolate,
}

impl FromStr for SplitPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bisect" => Ok(SplitPolicy::Bisect),
            "isolate" => Ok(SplitPolicy::Isolate),
            other => Err(Error::Config(format!("unknown split policy `{other}`"))),
        }
    }
}

impl fmt::Display for SplitPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SplitPolicy::Bisect => "bisect",
            SplitPolicy::Isolate => "isolate",
        })
    }
}

/// Refines one box; children partition (isolate) or cover (bisect) it.
pub fn split_hole(hole: &BoxedHole, policy: SplitPolicy) -> Result<Vec<BoxedHole>> {
    let depth = hole.depth + 1;
    Ok(match policy {
        SplitPolicy::Bisect => {
            let (l, r) = split_interval(&hole.interval)?;
            vec![BoxedHole { interval: l, depth }, BoxedHole { interval: r, depth }]
        }
        SplitPolicy::Isolate => split_isolating(&hole.interval)?
            .into_iter()
            .map(|interval| BoxedHole { interval, depth })
            .collect(),
    })
}

/// Which constant hole to refine next.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HoleChoice {
    Split(usize),
    /// Some box is still wider than a point but none may be split further.
    Exhausted,
    /// Every constant is determined.
    Concrete,
}

/// Picks the widest splittable box; ties go to the lowest index.
pub fn choose_hole<'a>(holes: impl IntoIterator<Item = &'a Constant>, max_depth: u32) -> HoleChoice {
    let mut best: Option<(usize, f64)> = None;
    let mut undetermined = false;
    for (i, c) in holes.into_iter().enumerate() {
        let Constant::Boxed(h) = c else { continue };
        if h.interval.is_singleton() {
            continue;
        }
        undetermined = true;
        if h.depth >= max_depth || split_interval(&h.interval).is_err() {
            continue;
        }
        let w = h.interval.width();
        if best.is_none_or(|(_, bw)| w > bw) {
            best = Some((i, w));
        }
    }
    match (best, undetermined) {
        (Some((i, _)), _) => HoleChoice::Split(i),
        (None, true) => HoleChoice::Exhausted,
        (None, false) => HoleChoice::Concrete,
    }
}

/// Re-indexes a hole annotation map after hole `i` is filled by a production
/// with `h` nonterminals. New holes are unannotated; existing annotations are
/// carried over unchanged.
pub fn repair<T: Clone>(kappa: &[Option<T>], i: usize, h: usize) -> Vec<Option<T>> {
    assert!(i < kappa.len(), "hole index out of range");
    let mut out = Vec::with_capacity(kappa.len() + h - 1);
    out.extend_from_slice(&kappa[..i]);
    out.extend(std::iter::repeat_n(None, h));
    out.extend_from_slice(&kappa[i + 1..]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn boxed(lo: f64, hi: f64, depth: u32) -> Constant {
        Constant::Boxed(BoxedHole {
            interval: RealInterval::closed(lo, hi),
            depth,
        })
    }

    #[test]
    fn widest_box_wins_ties_to_lowest_index() {
        let hs = [boxed(0.0, 1.0, 0), boxed(0.0, 2.0, 0), boxed(1.0, 3.0, 0)];
        assert_eq!(choose_hole(&hs, 30), HoleChoice::Split(1));
        let hs = [Constant::Fixed(0.3), boxed(0.5, 0.5, 3)];
        assert_eq!(choose_hole(&hs, 30), HoleChoice::Concrete);
        let hs = [boxed(0.0, 1.0, 30)];
        assert_eq!(choose_hole(&hs, 30), HoleChoice::Exhausted);
    }

    #[test]
    fn split_increments_depth() {
        let Constant::Boxed(h) = boxed(0.0, 1.0, 2) else { unreachable!() };
        let kids = split_hole(&h, SplitPolicy::Bisect).unwrap();
        assert_eq!(kids.len(), 2);
        assert!(kids.iter().all(|k| k.depth == 3));
        assert_eq!(split_hole(&h, SplitPolicy::Isolate).unwrap().len(), 3);
    }

    #[test]
    fn repair_shifts_later_annotations() {
        let kappa = vec![Some(1), None, Some(3)];
        assert_eq!(repair(&kappa, 1, 3), vec![Some(1), None, None, None, Some(3)]);
        assert_eq!(repair(&kappa, 1, 0), vec![Some(1), Some(3)]);
    }
}
