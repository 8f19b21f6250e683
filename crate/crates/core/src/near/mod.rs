//! Trajectory-labeling DSL: `map`/`mapprefix`/`fold`/`ite` over polynomials
//! in the features `z_i`, the fold state `z_f`, and indicator variables.

mod enumerate;
mod eval;
mod space;
mod text;

pub use enumerate::{enumerate_polys, PolyContext};
pub use eval::{
    abs_eval_ll, abs_eval_lv_prefixes, abs_eval_vv, eval_ll, eval_lv, eval_lv_prefixes, eval_vv, ite_encoding,
    threshold_labels,
};
pub use space::NearSpace;
pub use text::{parse_ll, parse_vv};

use crate::constants::Constant;

/// A polynomial variable.
#[derive(Debug, Clone, PartialEq)]
pub enum Atom {
    /// `z_{i+1}`; stored 0-based.
    Feature(usize),
    /// `z_f`
    FoldState,
    /// `I(p >= 0)`
    Indicator(Poly),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub coef: Constant,
    pub atoms: Vec<Atom>,
}

/// A sum of monomials.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly(pub Vec<Monomial>);

#[derive(Debug, Clone, PartialEq)]
pub enum Vv {
    Hole,
    Poly(Poly),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Lv {
    Hole,
    Fold(Vv),
    Ite(Box<Lv>, Box<Lv>, Box<Lv>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Ll {
    Hole,
    Map(Vv),
    MapPrefix(Lv),
    Ite(Box<Lv>, Box<Ll>, Box<Ll>),
}

impl Monomial {
    pub fn new(coef: Constant, atoms: Vec<Atom>) -> Self {
        Monomial { coef, atoms }
    }
}

// Minimum costs of structural holes: the cheapest completion of each.
pub(crate) const LL_HOLE_COST: u32 = 2;
pub(crate) const LV_HOLE_COST: u32 = 1;
pub(crate) const VV_HOLE_COST: u32 = 1;

pub fn poly_cost(p: &Poly) -> u32 {
    let mut seen: Vec<&Poly> = Vec::new();
    let mut cost = 0;
    for m in &p.0 {
        cost += 1 + m.atoms.len() as u32;
        for a in &m.atoms {
            if let Atom::Indicator(inner) = a {
                if !seen.contains(&inner) {
                    seen.push(inner);
                    cost += poly_cost(inner);
                }
            }
        }
    }
    cost
}

pub fn vv_cost(v: &Vv) -> u32 {
    match v {
        Vv::Hole => VV_HOLE_COST,
        Vv::Poly(p) => poly_cost(p),
    }
}

pub fn lv_cost(l: &Lv) -> u32 {
    match l {
        Lv::Hole => LV_HOLE_COST,
        Lv::Fold(v) => vv_cost(v),
        Lv::Ite(c, a, b) => 1 + lv_cost(c) + lv_cost(a) + lv_cost(b),
    }
}

/// Structural cost. Holes count as their cheapest completion.
pub fn near_cost(l: &Ll) -> u32 {
    match l {
        Ll::Hole => LL_HOLE_COST,
        Ll::Map(v) => 1 + vv_cost(v),
        Ll::MapPrefix(lv) => 1 + lv_cost(lv),
        Ll::Ite(c, a, b) => 1 + lv_cost(c) + near_cost(a) + near_cost(b),
    }
}

impl Ll {
    pub fn has_structural_holes(&self) -> bool {
        match self {
            Ll::Hole => true,
            Ll::Map(v) => v.has_structural_holes(),
            Ll::MapPrefix(l) => l.has_structural_holes(),
            Ll::Ite(c, a, b) => c.has_structural_holes() || a.has_structural_holes() || b.has_structural_holes(),
        }
    }

    /// Constants in pre-order.
    pub fn constants(&self) -> Vec<&Constant> {
        let mut out = Vec::new();
        visit_ll(self, &mut |c| out.push(c));
        out
    }

    pub fn for_each_constant_mut(&mut self, f: &mut dyn FnMut(&mut Constant)) {
        visit_ll_mut(self, f)
    }

    /// Every boxed constant replaced by its midpoint.
    pub fn midpoint_instance(&self) -> Ll {
        let mut out = self.clone();
        out.for_each_constant_mut(&mut |c| *c = c.instantiate_midpoint());
        out
    }

    /// True if no structural holes remain and every constant is determined.
    pub fn is_concrete(&self) -> bool {
        !self.has_structural_holes() && self.constants().iter().all(|c| c.is_determined())
    }

    /// Largest feature index referenced, if any.
    pub fn max_feature(&self) -> Option<usize> {
        let mut best = None;
        visit_atoms_ll(self, &mut |a| {
            if let Atom::Feature(i) = a {
                best = Some(best.map_or(*i, |b: usize| b.max(*i)));
            }
        });
        best
    }
}

impl Lv {
    pub fn has_structural_holes(&self) -> bool {
        match self {
            Lv::Hole => true,
            Lv::Fold(v) => v.has_structural_holes(),
            Lv::Ite(c, a, b) => c.has_structural_holes() || a.has_structural_holes() || b.has_structural_holes(),
        }
    }
}

impl Vv {
    pub fn has_structural_holes(&self) -> bool {
        matches!(self, Vv::Hole)
    }
}

fn visit_poly<'a>(p: &'a Poly, f: &mut dyn FnMut(&'a Constant)) {
    for m in &p.0 {
        f(&m.coef);
        for a in &m.atoms {
            if let Atom::Indicator(inner) = a {
                visit_poly(inner, f);
            }
        }
    }
}

fn visit_vv<'a>(v: &'a Vv, f: &mut dyn FnMut(&'a Constant)) {
    if let Vv::Poly(p) = v {
        visit_poly(p, f);
    }
}

fn visit_lv<'a>(l: &'a Lv, f: &mut dyn FnMut(&'a Constant)) {
    match l {
        Lv::Hole => {}
        Lv::Fold(v) => visit_vv(v, f),
        Lv::Ite(c, a, b) => {
            visit_lv(c, f);
            visit_lv(a, f);
            visit_lv(b, f);
        }
    }
}

fn visit_ll<'a>(l: &'a Ll, f: &mut dyn FnMut(&'a Constant)) {
    match l {
        Ll::Hole => {}
        Ll::Map(v) => visit_vv(v, f),
        Ll::MapPrefix(lv) => visit_lv(lv, f),
        Ll::Ite(c, a, b) => {
            visit_lv(c, f);
            visit_ll(a, f);
            visit_ll(b, f);
        }
    }
}

fn visit_poly_mut(p: &mut Poly, f: &mut dyn FnMut(&mut Constant)) {
    for m in &mut p.0 {
        f(&mut m.coef);
        for a in &mut m.atoms {
            if let Atom::Indicator(inner) = a {
                visit_poly_mut(inner, f);
            }
        }
    }
}

fn visit_vv_mut(v: &mut Vv, f: &mut dyn FnMut(&mut Constant)) {
    if let Vv::Poly(p) = v {
        visit_poly_mut(p, f);
    }
}

fn visit_lv_mut(l: &mut Lv, f: &mut dyn FnMut(&mut Constant)) {
    match l {
        Lv::Hole => {}
        Lv::Fold(v) => visit_vv_mut(v, f),
        Lv::Ite(c, a, b) => {
            visit_lv_mut(c, f);
            visit_lv_mut(a, f);
            visit_lv_mut(b, f);
        }
    }
}

fn visit_ll_mut(l: &mut Ll, f: &mut dyn FnMut(&mut Constant)) {
    match l {
        Ll::Hole => {}
        Ll::Map(v) => visit_vv_mut(v, f),
        Ll::MapPrefix(lv) => visit_lv_mut(lv, f),
        Ll::Ite(c, a, b) => {
            visit_lv_mut(c, f);
            visit_ll_mut(a, f);
            visit_ll_mut(b, f);
        }
    }
}

fn visit_atoms_poly(p: &Poly, f: &mut dyn FnMut(&Atom)) {
    for m in &p.0 {
        for a in &m.atoms {
            f(a);
            if let Atom::Indicator(inner) = a {
                visit_atoms_poly(inner, f);
            }
        }
    }
}

fn visit_atoms_lv(l: &Lv, f: &mut dyn FnMut(&Atom)) {
    match l {
        Lv::Hole | Lv::Fold(Vv::Hole) => {}
        Lv::Fold(Vv::Poly(p)) => visit_atoms_poly(p, f),
        Lv::Ite(c, a, b) => {
            visit_atoms_lv(c, f);
            visit_atoms_lv(a, f);
            visit_atoms_lv(b, f);
        }
    }
}

fn visit_atoms_ll(l: &Ll, f: &mut dyn FnMut(&Atom)) {
    match l {
        Ll::Hole | Ll::Map(Vv::Hole) => {}
        Ll::Map(Vv::Poly(p)) => visit_atoms_poly(p, f),
        Ll::MapPrefix(lv) => visit_atoms_lv(lv, f),
        Ll::Ite(c, a, b) => {
            visit_atoms_lv(c, f);
            visit_atoms_ll(a, f);
            visit_atoms_ll(b, f);
        }
    }
}
