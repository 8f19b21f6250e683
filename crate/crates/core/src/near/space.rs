use super::eval::{abs_eval_ll, eval_ll};
use super::text::print_ll;
use super::{enumerate_polys, lv_cost, near_cost, Ll, Lv, PolyContext, Vv, LL_HOLE_COST, LV_HOLE_COST, VV_HOLE_COST};
use crate::constants::{choose_hole, split_hole, Constant, HoleChoice, SplitPolicy};
use crate::data::{Dataset, TaskKind};
use crate::error::{Error, Result};
use crate::interval::{ge_zero, RealInterval};
use crate::objectives::{Objective, Outcome, Tally};
use crate::search::{Expansion, ProgramSpace};

/// The cost-bounded labeling-program space over one dataset.
pub struct NearSpace<'a> {
    data: &'a Dataset,
    objective: Objective,
    cost_bound: u32,
    policy: SplitPolicy,
    root: Ll,
}

impl<'a> NearSpace<'a> {
    pub fn new(data: &'a Dataset, objective: Objective, cost_bound: u32) -> Result<Self> {
        if data.kind != TaskKind::Labeling {
            return Err(Error::Config("the labeling DSL needs a labeling dataset".into()));
        }
        if data.outcome_count() == 0 {
            return Err(Error::EmptyDataset);
        }
        Ok(NearSpace {
            data,
            objective,
            cost_bound,
            policy: SplitPolicy::Bisect,
            root: Ll::Hole,
        })
    }

    /// Starts the search from a sketch instead of an empty hole.
    pub fn with_root(mut self, root: Ll) -> Result<Self> {
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

    pub fn cost_bound(&self) -> u32 {
        self.cost_bound
    }

    pub fn objective(&self) -> Objective {
        self.objective
    }

    pub fn dataset(&self) -> &Dataset {
        self.data
    }

    /// Concrete objective of a program on the bound dataset.
    pub fn objective_of(&self, program: &Ll) -> Result<f64> {
        let mut outcomes = Vec::with_capacity(self.data.outcome_count());
        for ex in &self.data.examples {
            let labels = ex.step_labels().expect("validated labeling dataset");
            let out = eval_ll(program, &ex.features)?;
            outcomes.extend(out.iter().zip(labels).map(|(&r, &l)| Outcome::new(r >= 0.0, l)));
        }
        self.objective.concrete(&outcomes)
    }

    /// Abstract objective of a node on the bound dataset.
    pub fn abstract_objective(&self, node: &Ll) -> Result<RealInterval> {
        let mut tally = Tally::new();
        for ex in &self.data.examples {
            let labels = ex.step_labels().expect("validated labeling dataset");
            for (r, &l) in abs_eval_ll(node, &ex.features)?.iter().zip(labels) {
                tally.add(ge_zero(r), l);
            }
        }
        self.objective.from_tally(&tally)
    }

    fn fill_ll(&self, l: &Ll, slack: i64) -> Option<Vec<Ll>> {
        match l {
            Ll::Hole => {
                let options = [
                    Ll::Map(Vv::Hole),
                    Ll::MapPrefix(Lv::Hole),
                    Ll::Ite(Box::new(Lv::Hole), Box::new(Ll::Hole), Box::new(Ll::Hole)),
                ];
                Some(
                    options
                        .into_iter()
                        .filter(|o| i64::from(near_cost(o)) - i64::from(LL_HOLE_COST) <= slack)
                        .collect(),
                )
            }
            Ll::Map(v) => self.fill_vv(v, slack, false).map(|vs| vs.into_iter().map(Ll::Map).collect()),
            Ll::MapPrefix(lv) => self
                .fill_lv(lv, slack)
                .map(|ls| ls.into_iter().map(Ll::MapPrefix).collect()),
            Ll::Ite(c, a, b) => {
                if let Some(cs) = self.fill_lv(c, slack) {
                    return Some(cs.into_iter().map(|c| Ll::Ite(Box::new(c), a.clone(), b.clone())).collect());
                }
                if let Some(as_) = self.fill_ll(a, slack) {
                    return Some(as_.into_iter().map(|a| Ll::Ite(c.clone(), Box::new(a), b.clone())).collect());
                }
                self.fill_ll(b, slack)
                    .map(|bs| bs.into_iter().map(|b| Ll::Ite(c.clone(), a.clone(), Box::new(b))).collect())
            }
        }
    }

    fn fill_lv(&self, l: &Lv, slack: i64) -> Option<Vec<Lv>> {
        match l {
            Lv::Hole => {
                let options = [
                    Lv::Fold(Vv::Hole),
                    Lv::Ite(Box::new(Lv::Hole), Box::new(Lv::Hole), Box::new(Lv::Hole)),
                ];
                Some(
                    options
                        .into_iter()
                        .filter(|o| i64::from(lv_cost(o)) - i64::from(LV_HOLE_COST) <= slack)
                        .collect(),
                )
            }
            Lv::Fold(v) => self.fill_vv(v, slack, true).map(|vs| vs.into_iter().map(Lv::Fold).collect()),
            Lv::Ite(c, a, b) => {
                if let Some(cs) = self.fill_lv(c, slack) {
                    return Some(cs.into_iter().map(|c| Lv::Ite(Box::new(c), a.clone(), b.clone())).collect());
                }
                if let Some(as_) = self.fill_lv(a, slack) {
                    return Some(as_.into_iter().map(|a| Lv::Ite(c.clone(), Box::new(a), b.clone())).collect());
                }
                self.fill_lv(b, slack)
                    .map(|bs| bs.into_iter().map(|b| Lv::Ite(c.clone(), a.clone(), Box::new(b))).collect())
            }
        }
    }

    fn fill_vv(&self, v: &Vv, slack: i64, in_fold: bool) -> Option<Vec<Vv>> {
        match v {
            Vv::Poly(_) => None,
            Vv::Hole => {
                let budget = i64::from(VV_HOLE_COST) + slack;
                if budget < 1 {
                    return Some(Vec::new());
                }
                let ctx = PolyContext {
                    dim: self.data.dim,
                    in_fold,
                };
                Some(enumerate_polys(ctx, budget as u32).into_iter().map(Vv::Poly).collect())
            }
        }
    }
}

fn replace_constant(l: &Ll, k: usize, c: Constant) -> Ll {
    let mut out = l.clone();
    let mut i = 0;
    out.for_each_constant_mut(&mut |slot| {
        if i == k {
            *slot = c;
        }
        i += 1;
    });
    out
}

impl ProgramSpace for NearSpace<'_> {
    type Node = Ll;
    type Program = Ll;

    fn root(&self) -> Ll {
        self.root.clone()
    }

    fn children(&self, node: &Ll, max_split_depth: u32) -> Expansion<Ll> {
        if node.has_structural_holes() {
            let slack = i64::from(self.cost_bound) - i64::from(near_cost(node));
            return Expansion::Children(self.fill_ll(node, slack).unwrap_or_default());
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

    fn bounds(&self, node: &Ll) -> RealInterval {
        self.abstract_objective(node).expect("features validated at construction")
    }

    fn witness(&self, node: &Ll) -> Option<Ll> {
        (!node.has_structural_holes()).then(|| node.midpoint_instance())
    }

    fn evaluate(&self, program: &Ll) -> f64 {
        self.objective_of(program).expect("features validated at construction")
    }

    fn is_concrete(&self, node: &Ll) -> bool {
        node.is_concrete()
    }

    fn show_node(&self, node: &Ll) -> String {
        print_ll(node)
    }

    fn show_program(&self, program: &Ll) -> String {
        print_ll(program)
    }

    fn example_count(&self) -> usize {
        self.data.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Example, Labels};
    use crate::near::parse_ll;
    use crate::search::{astar_synthesize, LowerBoundMode, SearchConfig};

    fn golden() -> Dataset {
        Dataset::new(
            TaskKind::Labeling,
            vec![Example {
                features: vec![vec![101.0], vec![65.0]],
                labels: Labels::PerStep(vec![false, true]),
            }],
        )
        .unwrap()
    }

    #[test]
    fn hole_expansion_respects_cost() {
        let d = golden();
        let space = NearSpace::new(&d, Objective::Accuracy, 4).unwrap();
        let Expansion::Children(kids) = space.children(&Ll::Hole, 30) else { panic!() };
        let texts: Vec<String> = kids.iter().map(print_ll).collect();
        assert_eq!(texts, vec!["map(??)", "mapprefix(??)"]);
        let Expansion::Children(kids) = space.children(&parse_ll("map(??)").unwrap(), 30) else { panic!() };
        // Budget 3 in one dimension: c, c*z1, c*z1*z1, c + c*z1.
        assert_eq!(kids.len(), 4);
        assert!(kids.iter().all(|k| near_cost(k) <= 4));
        assert!(kids.iter().all(|k| !matches!(k, Ll::Ite(..))));
    }

    #[test]
    fn constant_split_children() {
        let d = golden();
        let space = NearSpace::new(&d, Objective::Accuracy, 4).unwrap();
        let node = parse_ll("map(-1*z1 + [0,1])").unwrap();
        let Expansion::Children(kids) = space.children(&node, 30) else { panic!() };
        let texts: Vec<String> = kids.iter().map(print_ll).collect();
        assert_eq!(texts, vec!["map(-1*z1 + [0,0.5])", "map(-1*z1 + [0.5,1])"]);
        let iso = NearSpace::new(&d, Objective::Accuracy, 4).unwrap().with_split_policy(SplitPolicy::Isolate);
        let Expansion::Children(kids) = iso.children(&node, 30) else { panic!() };
        assert_eq!(kids.len(), 3);
        assert!(matches!(space.children(&parse_ll("map(-1*z1 + 3)").unwrap(), 30), Expansion::Leaf));
    }

    #[test]
    fn golden_bounds() {
        let d = golden();
        let space = NearSpace::new(&d, Objective::Accuracy, 4).unwrap();
        let b = |s: &str| space.bounds(&parse_ll(s).unwrap());
        assert_eq!(b("map(-1*z1 + [0,100])"), RealInterval::closed(0.5, 1.0));
        assert_eq!(b("map(-1*z1 + [0,50])"), RealInterval::point(0.5));
        assert_eq!(b("map(-1*z1 + [50,100])"), RealInterval::closed(0.5, 1.0));
        assert_eq!(b("map(-1*z1 + [50,75])"), RealInterval::closed(0.5, 1.0));
        assert_eq!(b("map(-1*z1 + [75,100])"), RealInterval::point(1.0));
    }

    fn golden_search(mode: LowerBoundMode) -> crate::search::SynthesisResult<Ll> {
        let d = golden();
        let space = NearSpace::new(&d, Objective::Accuracy, 4)
            .unwrap()
            .with_root(parse_ll("map(-1*z1 + [0,100])").unwrap())
            .unwrap();
        let cfg = SearchConfig {
            lower_bound: mode,
            record_trace: true,
            ..SearchConfig::default()
        };
        astar_synthesize(&space, &cfg).unwrap()
    }

    #[test]
    fn golden_search_abstract_lower_bounds() {
        let r = golden_search(LowerBoundMode::Abstract);
        let expanded: Vec<&str> = r.trace.iter().map(|n| n.program.as_str()).collect();
        assert_eq!(expanded, vec!["map(-1*z1 + [0,100])", "map(-1*z1 + [50,100])"]);
        assert!(r.converged);
        assert_eq!(r.certified_lower, 1.0);
        assert_eq!(r.best_program_text.as_deref(), Some("map(-1*z1 + 87.5)"));
    }

    #[test]
    fn golden_search_midpoint_lower_bounds() {
        let r = golden_search(LowerBoundMode::Midpoint);
        assert_eq!(r.nodes_expanded, 1);
        assert!(r.converged);
        assert_eq!(r.certified_lower, 1.0);
        assert_eq!(r.best_program_text.as_deref(), Some("map(-1*z1 + 75)"));
    }

    #[test]
    fn rejects_out_of_range_sketch() {
        let d = golden();
        let r = NearSpace::new(&d, Objective::Accuracy, 4).unwrap().with_root(parse_ll("map(z2)").unwrap());
        assert!(matches!(r, Err(Error::FeatureOutOfRange { index: 1, dim: 1 })));
    }
}
