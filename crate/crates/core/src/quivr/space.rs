use super::eval::{abs_eval_scored, eval_scored, SegmentScores};
use super::{PredicateLibrary, Query};
use crate::constants::{choose_hole, split_hole, Constant, HoleChoice, SplitPolicy};
use crate::data::{Dataset, TaskKind};
use crate::error::{Error, Result};
use crate::interval::RealInterval;
use crate::objectives::{Objective, Outcome, Tally};
use crate::search::{Expansion, ProgramSpace};

/// Padding around the realized score range of a fresh threshold box.
pub const SCORE_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuivrBounds {
    pub max_predicates: usize,
    pub max_parameters: usize,
}

impl Default for QuivrBounds {
    fn default() -> Self {
        QuivrBounds {
            max_predicates: 3,
            max_parameters: 2,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Slot {
    Free,
    LeftOfSeq,
    LeftOfAnd,
}

/// The bounded trajectory-query space over one dataset.
pub struct QuivrSpace<'a> {
    data: &'a Dataset,
    objective: Objective,
    bounds: QuivrBounds,
    library: PredicateLibrary,
    policy: SplitPolicy,
    root: Query,
    scores: Vec<SegmentScores>,
    ranges: Vec<RealInterval>,
}

impl<'a> QuivrSpace<'a> {
    pub fn new(data: &'a Dataset, objective: Objective, bounds: QuivrBounds) -> Result<Self> {
        Self::with_library(data, objective, bounds, PredicateLibrary::standard(data.dim))
    }

    pub fn with_library(
        data: &'a Dataset,
        objective: Objective,
        bounds: QuivrBounds,
        library: PredicateLibrary,
    ) -> Result<Self> {
        if data.kind != TaskKind::Query {
            return Err(Error::Config("the query DSL needs a query dataset".into()));
        }
        if data.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if bounds.max_predicates == 0 {
            return Err(Error::Config("the predicate bound must be positive".into()));
        }
        if let Some(g) = library.scores.iter().find(|g| g.feature() >= data.dim) {
            return Err(Error::FeatureOutOfRange {
                index: g.feature(),
                dim: data.dim,
            });
        }
        let scores = data
            .examples
            .iter()
            .map(|ex| SegmentScores::new(&ex.features, &library.scores))
            .collect::<Result<Vec<_>>>()?;
        let ranges = (0..library.scores.len())
            .map(|p| {
                let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
                for s in &scores {
                    for i in 0..s.len() {
                        for j in i + 1..=s.len() {
                            let v = s.get(p, i, j);
                            lo = lo.min(v);
                            hi = hi.max(v);
                        }
                    }
                }
                if lo > hi {
                    (lo, hi) = (0.0, 0.0);
                }
                RealInterval::closed(lo - SCORE_MARGIN, hi + SCORE_MARGIN)
            })
            .collect();
        Ok(QuivrSpace {
            data,
            objective,
            bounds,
            library,
            policy: SplitPolicy::Bisect,
            root: Query::Hole,
            scores,
            ranges,
        })
    }

    /// Starts the search from a sketch instead of an empty hole.
    pub fn with_root(mut self, root: Query) -> Result<Self> {
        if let Some(i) = root.max_feature() {
            if i >= self.data.dim {
                return Err(Error::FeatureOutOfRange {
                    index: i,
                    dim: self.data.dim,
                });
            }
        }
        self.root = root;
        Ok(self)
    }

    pub fn with_split_policy(mut self, policy: SplitPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn library(&self) -> &PredicateLibrary {
        &self.library
    }

    pub fn dataset(&self) -> &Dataset {
        self.data
    }

    pub fn objective(&self) -> Objective {
        self.objective
    }

    /// Initial threshold box of the `p`-th library score predicate.
    pub fn score_range(&self, p: usize) -> RealInterval {
        self.ranges[p]
    }

    fn scores_for(&self, q: &Query) -> Result<()> {
        match q {
            Query::PredC(g, _) if self.library.index_of(*g).is_none() => Err(Error::UnknownPredicate(g.to_string())),
            Query::Seq(a, b) | Query::And(a, b) => {
                self.scores_for(a)?;
                self.scores_for(b)
            }
            _ => Ok(()),
        }
    }

    pub fn objective_of(&self, q: &Query) -> Result<f64> {
        self.scores_for(q)?;
        let mut outcomes = Vec::with_capacity(self.data.len());
        for (ex, s) in self.data.examples.iter().zip(&self.scores) {
            let label = ex.whole_label().expect("validated query dataset");
            outcomes.push(Outcome::new(eval_scored(q, s)?, label));
        }
        self.objective.concrete(&outcomes)
    }

    pub fn abstract_objective(&self, q: &Query) -> Result<RealInterval> {
        self.scores_for(q)?;
        let mut tally = Tally::new();
        for (ex, s) in self.data.examples.iter().zip(&self.scores) {
            let label = ex.whole_label().expect("validated query dataset");
            tally.add(abs_eval_scored(q, s)?, label);
        }
        self.objective.from_tally(&tally)
    }

    fn productions(&self, node: &Query, slot: Slot) -> Vec<Query> {
        let preds = node.predicate_count();
        let params = node.parameter_count();
        let mut out: Vec<Query> = self.library.bools.iter().map(|&f| Query::Pred0(f)).collect();
        if params < self.bounds.max_parameters {
            out.extend(
                self.library
                    .scores
                    .iter()
                    .zip(&self.ranges)
                    .map(|(&g, &r)| Query::PredC(g, Constant::boxed(r))),
            );
        }
        if preds < self.bounds.max_predicates {
            if slot != Slot::LeftOfSeq {
                out.push(Query::seq(Query::Hole, Query::Hole));
            }
            if slot != Slot::LeftOfAnd {
                out.push(Query::and(Query::Hole, Query::Hole));
            }
        }
        out
    }

    /// Children from filling the first structural hole in pre-order.
    fn fill(&self, root: &Query, q: &Query, slot: Slot) -> Option<Vec<Query>> {
        match q {
            Query::Hole => Some(self.productions(root, slot)),
            Query::Pred0(_) | Query::PredC(..) => None,
            Query::Seq(a, b) => {
                if let Some(xs) = self.fill(root, a, Slot::LeftOfSeq) {
                    return Some(xs.into_iter().map(|x| Query::Seq(Box::new(x), b.clone())).collect());
                }
                self.fill(root, b, Slot::Free)
                    .map(|xs| xs.into_iter().map(|x| Query::Seq(a.clone(), Box::new(x))).collect())
            }
            Query::And(a, b) => {
                if let Some(xs) = self.fill(root, a, Slot::LeftOfAnd) {
                    return Some(xs.into_iter().map(|x| Query::And(Box::new(x), b.clone())).collect());
                }
                self.fill(root, b, Slot::Free)
                    .map(|xs| xs.into_iter().map(|x| Query::And(a.clone(), Box::new(x))).collect())
            }
        }
    }
}

fn replace_constant(q: &Query, k: usize, c: Constant) -> Query {
    let mut out = q.clone();
    let mut i = 0;
    out.for_each_constant_mut(&mut |slot| {
        if i == k {
            *slot = c;
        }
        i += 1;
    });
    out
}

impl ProgramSpace for QuivrSpace<'_> {
    type Node = Query;
    type Program = Query;

    fn root(&self) -> Query {
        self.root.clone()
    }

    fn children(&self, node: &Query, max_split_depth: u32) -> Expansion<Query> {
        if node.has_structural_holes() {
            return Expansion::Children(self.fill(node, node, Slot::Free).unwrap_or_default());
        }
        let constants = node.constants();
        match choose_hole(constants.iter().copied(), max_split_depth) {
            HoleChoice::Concrete => Expansion::Leaf,
            HoleChoice::Exhausted => Expansion::DepthLimited,
            HoleChoice::Split(k) => {
                let Constant::Boxed(hole) = constants[k] else {
                    unreachable!("chosen constant is boxed")
                };
                match split_hole(hole, self.policy) {
                    Ok(parts) => Expansion::Children(
                        parts
                            .into_iter()
                            .map(|h| replace_constant(node, k, Constant::Boxed(h)))
                            .collect(),
                    ),
                    Err(_) => Expansion::DepthLimited,
                }
            }
        }
    }

    fn bounds(&self, node: &Query) -> RealInterval {
        self.abstract_objective(node).expect("predicates validated at construction")
    }

    fn witness(&self, node: &Query) -> Option<Query> {
        (!node.has_structural_holes()).then(|| node.midpoint_instance())
    }

    fn evaluate(&self, program: &Query) -> f64 {
        self.objective_of(program).expect("predicates validated at construction")
    }

    fn is_concrete(&self, node: &Query) -> bool {
        node.is_concrete()
    }

    fn show_node(&self, node: &Query) -> String {
        node.to_string()
    }

    fn show_program(&self, program: &Query) -> String {
        program.to_string()
    }

    fn example_count(&self) -> usize {
        self.data.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Example, Labels};
    use crate::quivr::{parse_query, realized_scores, ScorePredicate};
    use crate::search::{astar_synthesize, SearchConfig};

    fn data() -> Dataset {
        let ex = |xs: &[f64], label| Example {
            features: xs.iter().map(|&v| vec![v]).collect(),
            labels: Labels::Whole(label),
        };
        Dataset::new(
            TaskKind::Query,
            vec![
                ex(&[0.9, 0.1, 0.3], true),
                ex(&[0.8, 0.2, 0.1], true),
                ex(&[0.1, 0.2, 0.9], false),
                ex(&[0.3, 0.4, 0.2], false),
            ],
        )
        .unwrap()
    }

    #[test]
    fn hole_productions() {
        let d = data();
        let space = QuivrSpace::new(&d, Objective::F1, QuivrBounds::default()).unwrap();
        let Expansion::Children(kids) = space.children(&Query::Hole, 30) else { panic!() };
        let texts: Vec<String> = kids.iter().map(|k| k.to_string()).collect();
        assert_eq!(texts.len(), 1 + 3 + 2);
        assert_eq!(texts[0], "true");
        assert!(texts[1].starts_with("(max0 >= ["));
        assert_eq!(&texts[4..], ["?? ; ??", "?? & ??"]);
        // The left child of `;` is never another `;`.
        let Expansion::Children(kids) = space.children(&parse_query("?? ; ??").unwrap(), 30) else { panic!() };
        assert!(kids.iter().all(|k| !matches!(k, Query::Seq(a, _) if matches!(**a, Query::Seq(..)))));
        assert!(kids.iter().any(|k| matches!(k, Query::Seq(a, _) if matches!(**a, Query::And(..)))));
    }

    #[test]
    fn bounds_limit_productions() {
        let d = data();
        let space = QuivrSpace::new(&d, Objective::F1, QuivrBounds::default()).unwrap();
        let q = parse_query("(max0 >= 0.5) ; (min0 >= 0.1) ; ??").unwrap();
        let Expansion::Children(kids) = space.children(&q, 30) else { panic!() };
        assert_eq!(kids.len(), 1);
        assert!(kids.iter().all(|k| k.predicate_count() <= 3 && k.parameter_count() <= 2));
        let tight = QuivrSpace::new(
            &d,
            Objective::F1,
            QuivrBounds {
                max_predicates: 1,
                max_parameters: 1,
            },
        )
        .unwrap();
        let Expansion::Children(kids) = tight.children(&Query::Hole, 30) else { panic!() };
        assert_eq!(kids.len(), 4);
    }

    #[test]
    fn constant_splitting() {
        let d = data();
        let space = QuivrSpace::new(&d, Objective::F1, QuivrBounds::default()).unwrap();
        let Expansion::Children(kids) = space.children(&parse_query("max0 >= [0,1]").unwrap(), 30) else {
            panic!()
        };
        let texts: Vec<String> = kids.iter().map(|k| k.to_string()).collect();
        assert_eq!(texts, ["(max0 >= [0,0.5])", "(max0 >= [0.5,1])"]);
        assert!(matches!(space.children(&parse_query("max0 >= 0.5").unwrap(), 30), Expansion::Leaf));
    }

    #[test]
    fn fresh_boxes_cover_realized_scores() {
        let d = data();
        let space = QuivrSpace::new(&d, Objective::F1, QuivrBounds::default()).unwrap();
        for (p, &g) in space.library().scores.clone().iter().enumerate() {
            let r = space.score_range(p);
            for s in realized_scores(&d, g).unwrap() {
                assert!(r.lo_f64() < s && s < r.hi_f64());
            }
        }
    }

    #[test]
    fn box_without_interior_scores_is_determined() {
        let d = data();
        let space = QuivrSpace::new(&d, Objective::F1, QuivrBounds::default()).unwrap();
        let scores = realized_scores(&d, ScorePredicate::Max(0)).unwrap();
        for w in scores.windows(2) {
            let iv = RealInterval::closed(w[0] + 1e-9, w[1] - 1e-9);
            let q = Query::PredC(ScorePredicate::Max(0), Constant::boxed(iv));
            let b = space.bounds(&q);
            assert_eq!(b.lo_f64(), b.hi_f64());
        }
    }

    #[test]
    fn search_finds_a_perfect_query() {
        let d = data();
        let space = QuivrSpace::new(&d, Objective::F1, QuivrBounds::default()).unwrap();
        let r = astar_synthesize(&space, &SearchConfig::default()).unwrap();
        assert!(r.converged);
        assert_eq!(r.certified_lower, 1.0);
        assert_eq!(space.evaluate(r.best_program.as_ref().unwrap()), 1.0);
    }
}
