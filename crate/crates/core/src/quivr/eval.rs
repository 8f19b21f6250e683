//! Segment-table evaluation, concrete and over Boolean intervals.

use super::{BoolPredicate, Query, ScorePredicate};
use crate::constants::Constant;
use crate::error::{Error, Result};
use crate::interval::{bool_and, bool_or, threshold_ge, BoolInterval};

/// Scores of a fixed set of predicates on every segment `x[i..j]` of one
/// trajectory.
#[derive(Debug, Clone)]
pub struct SegmentScores {
    preds: Vec<ScorePredicate>,
    n: usize,
    values: Vec<f64>,
}

impl SegmentScores {
    pub fn new(traj: &[Vec<f64>], preds: &[ScorePredicate]) -> Result<Self> {
        let n = traj.len();
        let side = n + 1;
        let mut values = vec![0.0; preds.len() * side * side];
        for (p, &g) in preds.iter().enumerate() {
            let j = g.feature();
            let column: Vec<f64> = traj
                .iter()
                .map(|x| x.get(j).copied().ok_or(Error::FeatureOutOfRange { index: j, dim: x.len() }))
                .collect::<Result<_>>()?;
            let base = p * side * side;
            for start in 0..=n {
                let (mut max, mut min, mut sum) = (f64::NEG_INFINITY, f64::INFINITY, 0.0);
                for end in start..=n {
                    if end > start {
                        let v = column[end - 1];
                        max = max.max(v);
                        min = min.min(v);
                        sum += v;
                    }
                    values[base + start * side + end] = match g {
                        ScorePredicate::Max(_) => max,
                        ScorePredicate::Min(_) => min,
                        ScorePredicate::Avg(_) if end == start => f64::NEG_INFINITY,
                        ScorePredicate::Avg(_) => sum / (end - start) as f64,
                    };
                }
            }
        }
        Ok(SegmentScores {
            preds: preds.to_vec(),
            n,
            values,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Score of the `p`-th predicate on `x[i..j]`.
    pub fn get(&self, p: usize, i: usize, j: usize) -> f64 {
        let side = self.n + 1;
        self.values[p * side * side + i * side + j]
    }

    fn lookup(&self, g: ScorePredicate, i: usize, j: usize) -> Result<f64> {
        let p = self
            .preds
            .iter()
            .position(|&h| h == g)
            .ok_or_else(|| Error::UnknownPredicate(g.to_string()))?;
        Ok(self.get(p, i, j))
    }
}

trait Semantics {
    type V: Copy;
    const FALSE: Self::V;
    fn and(a: Self::V, b: Self::V) -> Self::V;
    fn or(a: Self::V, b: Self::V) -> Self::V;
    fn saturated(v: Self::V) -> bool;
    fn pred0(f: BoolPredicate) -> Self::V;
    fn predc(score: f64, c: &Constant) -> Result<Self::V>;
    fn hole() -> Result<Self::V>;
}

struct Concrete;

impl Semantics for Concrete {
    type V = bool;
    const FALSE: bool = false;

    fn and(a: bool, b: bool) -> bool {
        a && b
    }

    fn or(a: bool, b: bool) -> bool {
        a || b
    }

    fn saturated(v: bool) -> bool {
        v
    }

    fn pred0(f: BoolPredicate) -> bool {
        match f {
            BoolPredicate::True => true,
        }
    }

    fn predc(score: f64, c: &Constant) -> Result<bool> {
        if !c.is_determined() {
            return Err(Error::NotConcrete(format!("threshold {c}")));
        }
        Ok(score >= c.midpoint())
    }

    fn hole() -> Result<bool> {
        Err(Error::NotConcrete("structural hole".into()))
    }
}

struct Abstract;

impl Semantics for Abstract {
    type V = BoolInterval;
    const FALSE: BoolInterval = BoolInterval::False;

    fn and(a: BoolInterval, b: BoolInterval) -> BoolInterval {
        bool_and(a, b)
    }

    fn or(a: BoolInterval, b: BoolInterval) -> BoolInterval {
        bool_or(a, b)
    }

    fn saturated(v: BoolInterval) -> bool {
        v == BoolInterval::True
    }

    fn pred0(f: BoolPredicate) -> BoolInterval {
        BoolInterval::singleton(Concrete::pred0(f))
    }

    fn predc(score: f64, c: &Constant) -> Result<BoolInterval> {
        Ok(threshold_ge(score, &c.abstract_value()))
    }

    fn hole() -> Result<BoolInterval> {
        Ok(BoolInterval::Top)
    }
}

/// Denotation of `q` on every segment, indexed `i * (n + 1) + j`.
fn table<S: Semantics>(q: &Query, scores: &SegmentScores) -> Result<Vec<S::V>> {
    let n = scores.len();
    let side = n + 1;
    let mut out = vec![S::FALSE; side * side];
    match q {
        Query::Hole => {
            let v = S::hole()?;
            for i in 0..=n {
                for j in i..=n {
                    out[i * side + j] = v;
                }
            }
        }
        Query::Pred0(f) => {
            let v = S::pred0(*f);
            for i in 0..=n {
                for j in i..=n {
                    out[i * side + j] = v;
                }
            }
        }
        Query::PredC(g, c) => {
            for i in 0..=n {
                for j in i..=n {
                    out[i * side + j] = S::predc(scores.lookup(*g, i, j)?, c)?;
                }
            }
        }
        Query::And(a, b) => {
            let ta = table::<S>(a, scores)?;
            let tb = table::<S>(b, scores)?;
            for i in 0..=n {
                for j in i..=n {
                    let k = i * side + j;
                    out[k] = S::and(ta[k], tb[k]);
                }
            }
        }
        Query::Seq(a, b) => {
            let ta = table::<S>(a, scores)?;
            let tb = table::<S>(b, scores)?;
            for i in 0..=n {
                for j in i..=n {
                    let mut acc = S::FALSE;
                    for k in i..=j {
                        acc = S::or(acc, S::and(ta[i * side + k], tb[k * side + j]));
                        if S::saturated(acc) {
                            break;
                        }
                    }
                    out[i * side + j] = acc;
                }
            }
        }
    }
    Ok(out)
}

pub(crate) fn eval_scored(q: &Query, scores: &SegmentScores) -> Result<bool> {
    let t = table::<Concrete>(q, scores)?;
    Ok(t[scores.len()])
}

pub(crate) fn abs_eval_scored(q: &Query, scores: &SegmentScores) -> Result<BoolInterval> {
    let t = table::<Abstract>(q, scores)?;
    Ok(t[scores.len()])
}

fn predicates_of(q: &Query) -> Vec<ScorePredicate> {
    fn go(q: &Query, out: &mut Vec<ScorePredicate>) {
        match q {
            Query::PredC(g, _) if !out.contains(g) => out.push(*g),
            Query::Seq(a, b) | Query::And(a, b) => {
                go(a, out);
                go(b, out);
            }
            _ => {}
        }
    }
    let mut out = Vec::new();
    go(q, &mut out);
    out
}

/// Whole-trajectory label of a concrete query.
pub fn eval_query(q: &Query, traj: &[Vec<f64>]) -> Result<bool> {
    eval_scored(q, &SegmentScores::new(traj, &predicates_of(q))?)
}

/// Boolean interval containing the label of every instantiation of `q`.
pub fn abs_eval_query(q: &Query, traj: &[Vec<f64>]) -> Result<BoolInterval> {
    abs_eval_scored(q, &SegmentScores::new(traj, &predicates_of(q))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::RealInterval;
    use crate::oracle::naive_eval_query;
    use crate::quivr::parse_query;
    use proptest::prelude::*;

    fn x() -> Vec<Vec<f64>> {
        vec![vec![0.2], vec![0.9]]
    }

    #[test]
    fn seq_examples() {
        assert!(eval_query(&parse_query("(max0 >= 0.1) ; (max0 >= 0.8)").unwrap(), &x()).unwrap());
        assert!(!eval_query(&parse_query("(max0 >= 0.8) ; (max0 >= 0.1)").unwrap(), &x()).unwrap());
        assert!(eval_query(&parse_query("true").unwrap(), &x()).unwrap());
        assert!(eval_query(&parse_query("true").unwrap(), &[]).unwrap());
        assert!(eval_query(&parse_query("??").unwrap(), &x()).is_err());
        assert!(eval_query(&parse_query("max0 >= [0,1]").unwrap(), &x()).is_err());
    }

    #[test]
    fn abstract_examples() {
        let q = parse_query("(max0 >= [0,0.05]) ; (max0 >= [0,0.05])").unwrap();
        assert_eq!(abs_eval_query(&q, &x()).unwrap(), BoolInterval::True);
        let q = parse_query("max0 >= [50,75]").unwrap();
        assert_eq!(abs_eval_query(&q, &[vec![65.0]]).unwrap(), BoolInterval::Top);
        let q = parse_query("(max0 >= 0.1) ; (max0 >= 0.8)").unwrap();
        assert_eq!(abs_eval_query(&q, &x()).unwrap(), BoolInterval::True);
        assert_eq!(abs_eval_query(&parse_query("?? ; ??").unwrap(), &x()).unwrap(), BoolInterval::Top);
    }

    fn arb_pred() -> impl Strategy<Value = ScorePredicate> {
        (0usize..3, 0usize..2).prop_map(|(k, j)| match k {
            0 => ScorePredicate::Max(j),
            1 => ScorePredicate::Min(j),
            _ => ScorePredicate::Avg(j),
        })
    }

    fn arb_leaf(concrete: bool) -> BoxedStrategy<Query> {
        let c = if concrete {
            (-1.0f64..1.0).prop_map(Constant::Fixed).boxed()
        } else {
            (-1.0f64..1.0, 0.0f64..1.0)
                .prop_map(|(lo, w)| Constant::boxed(RealInterval::closed(lo, lo + w)))
                .boxed()
        };
        prop_oneof![
            1 => Just(Query::Pred0(BoolPredicate::True)),
            4 => (arb_pred(), c).prop_map(|(g, c)| Query::PredC(g, c)),
        ]
        .boxed()
    }

    /// Queries with at most three leaves.
    fn arb_query(concrete: bool) -> BoxedStrategy<Query> {
        let leaf = arb_leaf(concrete);
        let two = (leaf.clone(), leaf.clone(), any::<bool>())
            .prop_map(|(a, b, s)| if s { Query::seq(a, b) } else { Query::and(a, b) });
        let three = (leaf.clone(), leaf.clone(), leaf.clone(), any::<bool>(), any::<bool>(), any::<bool>()).prop_map(
            |(a, b, c, s1, s2, left)| {
                let op = |s: bool, x: Query, y: Query| if s { Query::seq(x, y) } else { Query::and(x, y) };
                if left {
                    op(s1, op(s2, a, b), c)
                } else {
                    op(s1, a, op(s2, b, c))
                }
            },
        );
        prop_oneof![leaf, two, three].boxed()
    }

    fn arb_traj() -> impl Strategy<Value = Vec<Vec<f64>>> {
        prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 2), 0..=8)
    }

    fn instantiate(q: &Query, picks: &[f64]) -> Query {
        let mut out = q.clone();
        let mut k = 0;
        out.for_each_constant_mut(&mut |c| {
            let iv = c.abstract_value();
            *c = Constant::Fixed((iv.lo_f64() + picks[k] * (iv.hi_f64() - iv.lo_f64())).min(iv.hi_f64()));
            k += 1;
        });
        out
    }

    proptest! {
        #[test]
        fn table_matches_naive_recursion(q in arb_query(true), t in arb_traj()) {
            prop_assert_eq!(eval_query(&q, &t).unwrap(), naive_eval_query(&q, &t).unwrap());
        }

        #[test]
        fn abstract_contains_concrete(
            q in arb_query(false),
            t in arb_traj(),
            picks in prop::collection::vec(0.0f64..=1.0, 3),
        ) {
            let inst = instantiate(&q, &picks);
            let a = abs_eval_query(&q, &t).unwrap();
            prop_assert!(a.contains(eval_query(&inst, &t).unwrap()));
        }

        #[test]
        fn threshold_is_monotone(t in arb_traj(), g in arb_pred(), cs in prop::collection::vec(-1.5f64..1.5, 2)) {
            let (lo, hi) = (cs[0].min(cs[1]), cs[0].max(cs[1]));
            let at = |c| eval_query(&Query::PredC(g, Constant::Fixed(c)), &t).unwrap();
            prop_assert!(at(lo) >= at(hi));
        }
    }
}
