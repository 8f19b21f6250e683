//! Brute-force references: grid search over discretized program spaces and
//! exhaustive enumeration of abstract outcome resolutions.
//!
//! Everything here is written independently of the search-side enumerators
//! and evaluators so the two can be checked against each other.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;

use crate::constants::Constant;
use crate::data::{Dataset, TaskKind};
use crate::error::{Error, Result};
use crate::interval::BoolInterval;
use crate::near::{Atom, Ll, Lv, Monomial, Poly, Vv};
use crate::objectives::{AbstractOutcome, Objective};
use crate::quivr::{BoolPredicate, Query, QuivrBounds, ScorePredicate};

/// Largest number of candidate programs a grid search will evaluate.
pub const MAX_CANDIDATES: u64 = 1_000_000;
/// Largest number of undetermined predictions `enumerate_resolutions` accepts.
pub const MAX_UNDETERMINED: usize = 20;

/// An exact non-negative objective value.
#[derive(Debug, Clone, Copy)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub fn new(num: u64, den: u64) -> Self {
        if den == 0 {
            Ratio { num: 0, den: 1 }
        } else {
            Ratio { num, den }
        }
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl PartialEq for Ratio {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Ratio {}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ratio {
    fn cmp(&self, other: &Self) -> Ordering {
        (u128::from(self.num) * u128::from(other.den)).cmp(&(u128::from(other.num) * u128::from(self.den)))
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Exact objective from (prediction, label) pairs.
pub fn exact_objective(pairs: impl IntoIterator<Item = (bool, bool)>, objective: Objective) -> Result<Ratio> {
    let (mut n, mut correct, mut tp, mut fp, mut pos) = (0u64, 0u64, 0u64, 0u64, 0u64);
    for (p, l) in pairs {
        n += 1;
        correct += u64::from(p == l);
        tp += u64::from(p && l);
        fp += u64::from(p && !l);
        pos += u64::from(l);
    }
    match objective {
        Objective::Accuracy if n == 0 => Err(Error::EmptyOutcomes),
        Objective::Accuracy => Ok(Ratio::new(correct, n)),
        Objective::F1 => Ok(Ratio::new(2 * tp, tp + fp + pos)),
    }
}

/// Evenly spaced constants including both endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl GridSpec {
    pub fn new(lo: f64, hi: f64, steps: usize) -> Result<Self> {
        let single = steps == 1 && lo == hi;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) || !(steps >= 2 || single) {
            return Err(Error::Config(format!(
                "grid needs finite lo <= hi and at least 2 steps, got [{lo}, {hi}] x {steps}"
            )));
        }
        Ok(GridSpec { lo, hi, steps })
    }

    pub fn points(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.lo];
        }
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|k| {
                if k + 1 == self.steps {
                    self.hi
                } else {
                    self.lo + (self.hi - self.lo) * k as f64 / last
                }
            })
            .collect()
    }
}

/// Which labeling programs to enumerate.
#[derive(Debug, Clone, PartialEq)]
pub enum NearStructures {
    /// Every program of structural cost at most the bound.
    CostBound(u32),
    /// The boxed constants of one sketch.
    Sketch(Ll),
}

/// Which queries to enumerate.
#[derive(Debug, Clone, PartialEq)]
pub enum QuivrStructures {
    Bounded(QuivrBounds),
    Sketch(Query),
}

/// Threshold values tried for each query constant.
#[derive(Debug, Clone, PartialEq)]
pub enum ThresholdGrid {
    /// Every realized score of the predicate plus one value above them all.
    Realized,
    Uniform(GridSpec),
}

#[derive(Debug, Clone)]
pub struct GridOptimum<P> {
    pub program: P,
    pub text: String,
    pub value: f64,
    pub exact: Ratio,
    pub candidates: u64,
}

/// Argmax over `0..total` with ties going to the lowest index.
fn best_index(total: u64, value: impl Fn(u64) -> Result<Ratio> + Sync) -> Result<(u64, Ratio)> {
    (0..total)
        .into_par_iter()
        .map(|i| value(i).map(|v| (i, v)))
        .try_reduce_with(|a, b| {
            Ok(match a.1.cmp(&b.1) {
                Ordering::Greater => a,
                Ordering::Less => b,
                Ordering::Equal if a.0 <= b.0 => a,
                Ordering::Equal => b,
            })
        })
        .ok_or(Error::EmptySpace)?
}

/// A structure whose constant slots each range over a list of values.
struct Family<P> {
    shape: P,
    choices: Vec<Vec<f64>>,
}

impl<P> Family<P> {
    fn size(&self) -> u64 {
        self.choices.iter().map(|c| c.len() as u64).product()
    }

    fn values(&self, mut k: u64) -> Vec<f64> {
        let mut out = vec![0.0; self.choices.len()];
        for (slot, c) in self.choices.iter().enumerate().rev() {
            let n = c.len() as u64;
            out[slot] = c[(k % n) as usize];
            k /= n;
        }
        out
    }
}

fn search_families<P: Clone + Sync>(
    families: &[Family<P>],
    fill: impl Fn(&P, &[f64]) -> P + Sync,
    score: impl Fn(&P) -> Result<Ratio> + Sync,
    show: impl Fn(&P) -> String,
) -> Result<GridOptimum<P>> {
    let mut offsets = Vec::with_capacity(families.len());
    let mut total: u64 = 0;
    for f in families {
        offsets.push(total);
        total = total.saturating_add(f.size());
    }
    if total > MAX_CANDIDATES {
        return Err(Error::OracleTooLarge {
            count: u128::from(total),
            limit: MAX_CANDIDATES,
        });
    }
    let locate = |i: u64| {
        let f = offsets.partition_point(|&o| o <= i) - 1;
        (f, i - offsets[f])
    };
    let program = |i: u64| {
        let (f, k) = locate(i);
        fill(&families[f].shape, &families[f].values(k))
    };
    let (best, exact) = best_index(total, |i| score(&program(i)))?;
    let p = program(best);
    Ok(GridOptimum {
        text: show(&p),
        program: p,
        value: exact.to_f64(),
        exact,
        candidates: total,
    })
}

// Labeling programs.

fn oracle_poly_cost(p: &Poly) -> u32 {
    let mut bodies: Vec<String> = Vec::new();
    let mut cost = 0;
    for m in &p.0 {
        cost += 1 + m.atoms.len() as u32;
        for a in &m.atoms {
            if let Atom::Indicator(inner) = a {
                let key = poly_key(inner);
                if !bodies.contains(&key) {
                    bodies.push(key);
                    cost += oracle_poly_cost(inner);
                }
            }
        }
    }
    cost
}

fn atom_key(a: &Atom) -> String {
    match a {
        Atom::Feature(i) => format!("z{i}"),
        Atom::FoldState => "zf".into(),
        Atom::Indicator(p) => format!("ind({})", poly_key(p)),
    }
}

fn monomial_key(m: &Monomial) -> String {
    let mut atoms: Vec<String> = m.atoms.iter().map(atom_key).collect();
    atoms.sort();
    format!("c*{}", atoms.join("*"))
}

/// Shape of a polynomial up to commutativity, ignoring coefficients.
fn poly_key(p: &Poly) -> String {
    let mut monos: Vec<String> = p.0.iter().map(monomial_key).collect();
    monos.sort();
    monos.join("+")
}

fn slot() -> Constant {
    Constant::Fixed(0.0)
}

/// All polynomial shapes of cost at most `budget` with distinct monomials.
fn oracle_polys(dim: usize, in_fold: bool, budget: u32) -> Vec<Poly> {
    if budget == 0 {
        return Vec::new();
    }
    let mut atoms: Vec<Atom> = (0..dim).map(Atom::Feature).collect();
    if in_fold {
        atoms.push(Atom::FoldState);
    }
    if budget >= 4 {
        for body in oracle_polys(dim, in_fold, budget - 2) {
            if body.0.iter().any(|m| !m.atoms.is_empty()) {
                atoms.push(Atom::Indicator(body));
            }
        }
    }
    // Monomials: atom multisets reached by appending atoms in any order,
    // deduplicated by sorted key.
    let mut monos: Vec<Monomial> = vec![Monomial::new(slot(), Vec::new())];
    let mut seen: BTreeSet<String> = BTreeSet::from([monomial_key(&monos[0])]);
    let mut frontier = monos.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for m in &frontier {
            for a in &atoms {
                let mut atoms2 = m.atoms.clone();
                atoms2.push(a.clone());
                let cand = Monomial::new(slot(), atoms2);
                if oracle_poly_cost(&Poly(vec![cand.clone()])) <= budget && seen.insert(monomial_key(&cand)) {
                    next.push(cand);
                }
            }
        }
        monos.extend(next.iter().cloned());
        frontier = next;
    }
    // Polynomials: sets of distinct monomials.
    let mut out = Vec::new();
    let mut keys = BTreeSet::new();
    fn grow(
        monos: &[Monomial],
        start: usize,
        cur: &mut Vec<Monomial>,
        budget: u32,
        out: &mut Vec<Poly>,
        keys: &mut BTreeSet<String>,
    ) {
        for k in start..monos.len() {
            cur.push(monos[k].clone());
            let p = Poly(cur.clone());
            if oracle_poly_cost(&p) <= budget {
                if keys.insert(poly_key(&p)) {
                    out.push(p);
                }
                grow(monos, k + 1, cur, budget, out, keys);
            }
            cur.pop();
        }
    }
    grow(&monos, 0, &mut Vec::new(), budget, &mut out, &mut keys);
    out
}

fn oracle_lv(dim: usize, budget: u32) -> Vec<(Lv, u32)> {
    let mut out = Vec::new();
    for p in oracle_polys(dim, true, budget) {
        let c = oracle_poly_cost(&p);
        out.push((Lv::Fold(Vv::Poly(p)), c));
    }
    // ite costs 1 plus three folds of cost at least 1 each.
    if budget >= 4 {
        let parts = oracle_lv(dim, budget - 3);
        for (c, cc) in &parts {
            for (a, ca) in &parts {
                for (b, cb) in &parts {
                    let total = 1 + cc + ca + cb;
                    if total <= budget {
                        out.push((Lv::Ite(Box::new(c.clone()), Box::new(a.clone()), Box::new(b.clone())), total));
                    }
                }
            }
        }
    }
    out
}

fn oracle_ll(dim: usize, budget: u32) -> Vec<(Ll, u32)> {
    let mut out = Vec::new();
    if budget == 0 {
        return out;
    }
    for p in oracle_polys(dim, false, budget - 1) {
        let c = 1 + oracle_poly_cost(&p);
        out.push((Ll::Map(Vv::Poly(p)), c));
    }
    for (lv, c) in oracle_lv(dim, budget - 1) {
        out.push((Ll::MapPrefix(lv), 1 + c));
    }
    if budget >= 6 {
        let conds = oracle_lv(dim, budget - 5);
        let branches = oracle_ll(dim, budget - 3);
        for (c, cc) in &conds {
            for (a, ca) in &branches {
                for (b, cb) in &branches {
                    let total = 1 + cc + ca + cb;
                    if total <= budget {
                        out.push((Ll::Ite(Box::new(c.clone()), Box::new(a.clone()), Box::new(b.clone())), total));
                    }
                }
            }
        }
    }
    out
}

/// Every labeling-program shape of structural cost at most `bound`, with
/// placeholder constants.
pub fn enumerate_near_structures(dim: usize, bound: u32) -> Vec<Ll> {
    oracle_ll(dim, bound).into_iter().map(|(l, _)| l).collect()
}

fn constant_count(l: &Ll) -> usize {
    l.constants().len()
}

fn fill_ll(shape: &Ll, values: &[f64], sketch_only: bool) -> Ll {
    let mut out = shape.clone();
    let mut k = 0;
    out.for_each_constant_mut(&mut |c| {
        if !sketch_only || matches!(c, Constant::Boxed(_)) {
            *c = Constant::Fixed(values[k]);
            k += 1;
        }
    });
    out
}

fn near_value(c: &Constant) -> Result<f64> {
    match c {
        Constant::Fixed(v) => Ok(*v),
        Constant::Boxed(h) if h.interval.is_singleton() => Ok(h.interval.lo_f64()),
        Constant::Boxed(_) => Err(Error::NotConcrete(c.to_string())),
    }
}

fn naive_poly(p: &Poly, x: &[f64], s: f64) -> Result<f64> {
    p.0.iter().try_fold(0.0, |acc, m| {
        let term = m.atoms.iter().try_fold(near_value(&m.coef)?, |t, a| {
            let v = match a {
                Atom::Feature(i) => *x.get(*i).ok_or(Error::FeatureOutOfRange { index: *i, dim: x.len() })?,
                Atom::FoldState => s,
                Atom::Indicator(q) => f64::from(u8::from(naive_poly(q, x, s)? >= 0.0)),
            };
            Ok::<f64, Error>(t * v)
        })?;
        Ok(acc + term)
    })
}

fn naive_vv(v: &Vv, x: &[f64], s: f64) -> Result<f64> {
    match v {
        Vv::Hole => Err(Error::NotConcrete("hole".into())),
        Vv::Poly(p) => naive_poly(p, x, s),
    }
}

fn naive_lv(l: &Lv, traj: &[Vec<f64>]) -> Result<f64> {
    match l {
        Lv::Hole => Err(Error::NotConcrete("hole".into())),
        Lv::Fold(v) => traj.iter().try_fold(0.0, |s, x| naive_vv(v, x, s)),
        Lv::Ite(c, a, b) => {
            if naive_lv(c, traj)? >= 0.0 {
                naive_lv(a, traj)
            } else {
                naive_lv(b, traj)
            }
        }
    }
}

/// Reference labeling semantics, re-running folds on each prefix.
pub fn naive_eval_ll(l: &Ll, traj: &[Vec<f64>]) -> Result<Vec<f64>> {
    match l {
        Ll::Hole => Err(Error::NotConcrete("hole".into())),
        Ll::Map(v) => traj.iter().map(|x| naive_vv(v, x, 0.0)).collect(),
        Ll::MapPrefix(lv) => (1..=traj.len()).map(|k| naive_lv(lv, &traj[..k])).collect(),
        Ll::Ite(c, a, b) => {
            if naive_lv(c, traj)? >= 0.0 {
                naive_eval_ll(a, traj)
            } else {
                naive_eval_ll(b, traj)
            }
        }
    }
}

fn expect_kind(data: &Dataset, kind: TaskKind) -> Result<()> {
    if data.kind != kind {
        return Err(Error::Config(format!("expected a {kind} dataset, got {}", data.kind)));
    }
    Ok(())
}

/// Exact objective of a concrete labeling program.
pub fn exact_near_objective(l: &Ll, data: &Dataset, objective: Objective) -> Result<Ratio> {
    expect_kind(data, TaskKind::Labeling)?;
    let mut pairs = Vec::new();
    for ex in &data.examples {
        let out = naive_eval_ll(l, &ex.features)?;
        let labels = ex.step_labels().expect("labeling dataset");
        pairs.extend(out.iter().zip(labels).map(|(&r, &y)| (r >= 0.0, y)));
    }
    exact_objective(pairs, objective)
}

/// Exact maximizer over a discretized labeling-program space.
pub fn grid_optimum_near(
    structures: &NearStructures,
    grid: &GridSpec,
    data: &Dataset,
    objective: Objective,
) -> Result<GridOptimum<Ll>> {
    expect_kind(data, TaskKind::Labeling)?;
    let points = grid.points();
    let (shapes, sketch_only) = match structures {
        NearStructures::CostBound(b) => (enumerate_near_structures(data.dim, *b), false),
        NearStructures::Sketch(s) => {
            if s.has_structural_holes() {
                return Err(Error::Config("an oracle sketch must not contain structural holes".into()));
            }
            (vec![s.clone()], true)
        }
    };
    let families: Vec<Family<Ll>> = shapes
        .into_iter()
        .map(|shape| {
            let n = if sketch_only {
                shape.constants().iter().filter(|c| matches!(c, Constant::Boxed(_))).count()
            } else {
                constant_count(&shape)
            };
            Family {
                shape,
                choices: vec![points.clone(); n],
            }
        })
        .collect();
    search_families(
        &families,
        |shape, values| fill_ll(shape, values, sketch_only),
        |p| exact_near_objective(p, data, objective),
        |p| p.to_string(),
    )
}

// Queries.

fn naive_score(g: ScorePredicate, seg: &[Vec<f64>]) -> Result<f64> {
    let j = g.feature();
    let mut vals = Vec::new();
    for x in seg {
        vals.push(*x.get(j).ok_or(Error::FeatureOutOfRange { index: j, dim: x.len() })?);
    }
    if vals.is_empty() {
        return Ok(match g {
            ScorePredicate::Min(_) => f64::INFINITY,
            _ => f64::NEG_INFINITY,
        });
    }
    Ok(match g {
        ScorePredicate::Max(_) => vals.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        ScorePredicate::Min(_) => vals.iter().copied().fold(f64::INFINITY, f64::min),
        ScorePredicate::Avg(_) => {
            let mut sum = 0.0;
            for v in &vals {
                sum += v;
            }
            sum / vals.len() as f64
        }
    })
}

/// Reference query semantics: direct recursion over every split point.
pub fn naive_eval_query(q: &Query, seg: &[Vec<f64>]) -> Result<bool> {
    match q {
        Query::Hole => Err(Error::NotConcrete("hole".into())),
        Query::Pred0(BoolPredicate::True) => Ok(true),
        Query::PredC(g, c) => Ok(naive_score(*g, seg)? >= near_value(c)?),
        Query::And(a, b) => Ok(naive_eval_query(a, seg)? && naive_eval_query(b, seg)?),
        Query::Seq(a, b) => {
            for k in 0..=seg.len() {
                if naive_eval_query(a, &seg[..k])? && naive_eval_query(b, &seg[k..])? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
    }
}

/// Exact objective of a concrete query.
pub fn exact_quivr_objective(q: &Query, data: &Dataset, objective: Objective) -> Result<Ratio> {
    expect_kind(data, TaskKind::Query)?;
    let mut pairs = Vec::with_capacity(data.len());
    for ex in &data.examples {
        pairs.push((naive_eval_query(q, &ex.features)?, ex.whole_label().expect("query dataset")));
    }
    exact_objective(pairs, objective)
}

/// Every query tree with at most the given numbers of leaves and
/// parameterized leaves, with placeholder constants.
pub fn enumerate_query_structures(dim: usize, bounds: QuivrBounds) -> Vec<Query> {
    let mut leaves = vec![(Query::Pred0(BoolPredicate::True), 0)];
    for j in 0..dim {
        for g in [ScorePredicate::Max(j), ScorePredicate::Min(j), ScorePredicate::Avg(j)] {
            leaves.push((Query::PredC(g, slot()), 1));
        }
    }
    // by_size[n] holds trees with exactly n leaves and their parameter counts.
    let mut by_size: Vec<Vec<(Query, usize)>> = vec![Vec::new(), leaves];
    for n in 2..=bounds.max_predicates {
        let mut trees = Vec::new();
        for left in 1..n {
            for (a, pa) in &by_size[left] {
                for (b, pb) in &by_size[n - left] {
                    if pa + pb <= bounds.max_parameters {
                        trees.push((Query::seq(a.clone(), b.clone()), pa + pb));
                        trees.push((Query::and(a.clone(), b.clone()), pa + pb));
                    }
                }
            }
        }
        by_size.push(trees);
    }
    by_size
        .into_iter()
        .take(bounds.max_predicates + 1)
        .flatten()
        .filter(|(_, p)| *p <= bounds.max_parameters)
        .map(|(q, _)| q)
        .collect()
}

/// Sorted distinct scores over all nonempty segments, computed naively.
pub fn naive_realized_scores(data: &Dataset, g: ScorePredicate) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for ex in &data.examples {
        let n = ex.features.len();
        for i in 0..n {
            for j in i + 1..=n {
                out.push(naive_score(g, &ex.features[i..j])?);
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    Ok(out)
}

fn query_slots(q: &Query, sketch_only: bool) -> Vec<ScorePredicate> {
    fn go(q: &Query, sketch_only: bool, out: &mut Vec<ScorePredicate>) {
        match q {
            Query::PredC(g, c) if !sketch_only || matches!(c, Constant::Boxed(_)) => out.push(*g),
            Query::Seq(a, b) | Query::And(a, b) => {
                go(a, sketch_only, out);
                go(b, sketch_only, out);
            }
            _ => {}
        }
    }
    let mut out = Vec::new();
    go(q, sketch_only, &mut out);
    out
}

fn fill_query(shape: &Query, values: &[f64], sketch_only: bool) -> Query {
    let mut out = shape.clone();
    let mut k = 0;
    out.for_each_constant_mut(&mut |c| {
        if !sketch_only || matches!(c, Constant::Boxed(_)) {
            *c = Constant::Fixed(values[k]);
            k += 1;
        }
    });
    out
}

/// Exact maximizer over a discretized query space.
pub fn grid_optimum_quivr(
    structures: &QuivrStructures,
    grid: &ThresholdGrid,
    data: &Dataset,
    objective: Objective,
) -> Result<GridOptimum<Query>> {
    expect_kind(data, TaskKind::Query)?;
    let (shapes, sketch_only) = match structures {
        QuivrStructures::Bounded(b) => (enumerate_query_structures(data.dim, *b), false),
        QuivrStructures::Sketch(q) => {
            if q.has_structural_holes() {
                return Err(Error::Config("an oracle sketch must not contain structural holes".into()));
            }
            (vec![q.clone()], true)
        }
    };
    let mut cache: Vec<(ScorePredicate, Vec<f64>)> = Vec::new();
    let mut choices_for = |g: ScorePredicate| -> Result<Vec<f64>> {
        if let Some((_, v)) = cache.iter().find(|(h, _)| *h == g) {
            return Ok(v.clone());
        }
        let v = match grid {
            ThresholdGrid::Uniform(spec) => spec.points(),
            ThresholdGrid::Realized => {
                let mut v = naive_realized_scores(data, g)?;
                let top = v.last().copied().unwrap_or(0.0);
                v.push(top + 1.0);
                v
            }
        };
        cache.push((g, v.clone()));
        Ok(v)
    };
    let mut families = Vec::with_capacity(shapes.len());
    for shape in shapes {
        let choices = query_slots(&shape, sketch_only)
            .into_iter()
            .map(&mut choices_for)
            .collect::<Result<Vec<_>>>()?;
        families.push(Family { shape, choices });
    }
    search_families(
        &families,
        |shape, values| fill_query(shape, values, sketch_only),
        |q| exact_quivr_objective(q, data, objective),
        |q| q.to_string(),
    )
}

/// Exact min and max of the objective over every resolution of the
/// undetermined predictions.
pub fn enumerate_resolutions(w: &[AbstractOutcome], objective: Objective) -> Result<(f64, f64)> {
    let open: Vec<usize> = (0..w.len()).filter(|&i| w[i].pred == BoolInterval::Top).collect();
    if open.len() > MAX_UNDETERMINED {
        return Err(Error::TooManyUndetermined {
            undetermined: open.len(),
            limit: MAX_UNDETERMINED,
        });
    }
    let mut lo: Option<Ratio> = None;
    let mut hi: Option<Ratio> = None;
    for mask in 0u32..(1u32 << open.len()) {
        let mut preds: Vec<bool> = w.iter().map(|o| o.pred.lo()).collect();
        for (bit, &i) in open.iter().enumerate() {
            preds[i] = mask & (1 << bit) != 0;
        }
        let v = exact_objective(preds.into_iter().zip(w.iter().map(|o| o.label)), objective)?;
        lo = Some(lo.map_or(v, |l| l.min(v)));
        hi = Some(hi.map_or(v, |h| h.max(v)));
    }
    let (lo, hi) = (lo.ok_or(Error::EmptyOutcomes)?, hi.ok_or(Error::EmptyOutcomes)?);
    Ok((lo.to_f64(), hi.to_f64()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Example, Labels};
    use crate::near::parse_ll;
    use crate::quivr::parse_query;

    fn toy() -> Dataset {
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
    fn toy_grid() {
        let d = toy();
        let sketch = parse_ll("map(-1*z1 + [0,100])").unwrap();
        let grid = GridSpec::new(0.0, 100.0, 101).unwrap();
        let r = grid_optimum_near(&NearStructures::Sketch(sketch), &grid, &d, Objective::Accuracy).unwrap();
        assert_eq!(r.value, 1.0);
        assert_eq!(r.text, "map(-1*z1 + 65)");
        assert_eq!(r.candidates, 101);
    }

    #[test]
    fn single_point_grid() {
        let d = toy();
        let sketch = parse_ll("map(-1*z1 + [0,100])").unwrap();
        let grid = GridSpec::new(70.0, 70.0, 1).unwrap();
        let r = grid_optimum_near(&NearStructures::Sketch(sketch), &grid, &d, Objective::Accuracy).unwrap();
        assert_eq!(r.candidates, 1);
        assert_eq!(r.text, "map(-1*z1 + 70)");
        assert!(GridSpec::new(0.0, 1.0, 1).is_err());
        assert!(GridSpec::new(1.0, 0.0, 3).is_err());
    }

    #[test]
    fn grid_points_include_endpoints() {
        let p = GridSpec::new(-1.0, 1.0, 21).unwrap().points();
        assert_eq!(p.len(), 21);
        assert_eq!(p[0], -1.0);
        assert_eq!(p[10], 0.0);
        assert_eq!(p[20], 1.0);
    }

    #[test]
    fn near_structure_counts() {
        assert_eq!(enumerate_near_structures(2, 3).len(), 7);
        assert_eq!(enumerate_near_structures(2, 4).len(), 21);
        assert!(enumerate_near_structures(1, 1).is_empty());
    }

    #[test]
    fn query_structure_counts() {
        let one = |p, q| {
            enumerate_query_structures(
                1,
                QuivrBounds {
                    max_predicates: p,
                    max_parameters: q,
                },
            )
            .len()
        };
        assert_eq!(one(1, 1), 4);
        assert_eq!(one(1, 0), 1);
        // 4 leaves, then 2 operators over 4 x 4 pairs.
        assert_eq!(one(2, 2), 4 + 32);
    }

    #[test]
    fn oversize_grids_are_rejected() {
        let d = toy();
        let sketch = parse_ll("map([-1,1]*z1 + [0,100])").unwrap();
        let grid = GridSpec::new(0.0, 1.0, 1001).unwrap();
        assert!(matches!(
            grid_optimum_near(&NearStructures::Sketch(sketch), &grid, &d, Objective::Accuracy),
            Err(Error::OracleTooLarge { .. })
        ));
    }

    #[test]
    fn quivr_single_predicate() {
        let ex = |xs: &[f64], label| Example {
            features: xs.iter().map(|&v| vec![v]).collect(),
            labels: Labels::Whole(label),
        };
        let d = Dataset::new(
            TaskKind::Query,
            vec![ex(&[0.9, 0.1], true), ex(&[0.2, 0.3], false), ex(&[0.5], true)],
        )
        .unwrap();
        let sketch = parse_query("max0 >= [0,1]").unwrap();
        let r = grid_optimum_quivr(&QuivrStructures::Sketch(sketch), &ThresholdGrid::Realized, &d, Objective::F1).unwrap();
        assert_eq!(r.value, 1.0);
        assert_eq!(r.text, "(max0 >= 0.5)");
    }

    #[test]
    fn naive_query_examples() {
        let x = vec![vec![0.2], vec![0.9]];
        assert!(naive_eval_query(&parse_query("(max0 >= 0.1) ; (max0 >= 0.8)").unwrap(), &x).unwrap());
        assert!(!naive_eval_query(&parse_query("(max0 >= 0.8) ; (max0 >= 0.1)").unwrap(), &x).unwrap());
    }

    #[test]
    fn resolutions() {
        use BoolInterval::*;
        let w = |ps: &[(BoolInterval, bool)]| ps.iter().map(|&(p, l)| AbstractOutcome::new(p, l)).collect::<Vec<_>>();
        let f1_case = w(&[(True, true), (Top, true), (Top, false)]);
        assert_eq!(enumerate_resolutions(&f1_case, Objective::F1).unwrap(), (0.5, 1.0));
        let det = w(&[(True, true), (False, true)]);
        assert_eq!(enumerate_resolutions(&det, Objective::Accuracy).unwrap(), (0.5, 0.5));
        assert_eq!(enumerate_resolutions(&w(&[(True, true), (Top, false)]), Objective::Accuracy).unwrap(), (0.5, 1.0));
        assert_eq!(enumerate_resolutions(&w(&[(False, true), (Top, false)]), Objective::Accuracy).unwrap(), (0.0, 0.5));
        let many = vec![AbstractOutcome::new(Top, true); 21];
        assert!(matches!(enumerate_resolutions(&many, Objective::F1), Err(Error::TooManyUndetermined { .. })));
    }

    #[test]
    fn ratios_compare_exactly() {
        assert_eq!(Ratio::new(1, 2), Ratio::new(2, 4));
        assert!(Ratio::new(2, 3) > Ratio::new(3, 5));
        assert_eq!(Ratio::new(0, 0).to_f64(), 0.0);
    }
}
