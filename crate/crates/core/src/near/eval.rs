//! Concrete and interval semantics.

use super::{Atom, Ll, Lv, Poly, Vv};
use crate::constants::Constant;
use crate::error::{Error, Result};
use crate::interval::{ge_zero, interval_add, interval_indicator, interval_mul, RealInterval};

fn feature(x: &[f64], i: usize) -> Result<f64> {
    x.get(i).copied().ok_or(Error::FeatureOutOfRange { index: i, dim: x.len() })
}

fn concrete(c: &Constant) -> Result<f64> {
    match c {
        Constant::Fixed(v) => Ok(*v),
        Constant::Boxed(h) if h.interval.is_singleton() => Ok(h.interval.lo_f64()),
        Constant::Boxed(h) => Err(Error::NotConcrete(format!("constant box {}", h.interval))),
    }
}

fn hole() -> Error {
    Error::NotConcrete("structural hole".into())
}

pub(crate) fn eval_poly(p: &Poly, x: &[f64], s: f64) -> Result<f64> {
    let mut total = 0.0;
    for m in &p.0 {
        let mut term = concrete(&m.coef)?;
        for a in &m.atoms {
            term *= match a {
                Atom::Feature(i) => feature(x, *i)?,
                Atom::FoldState => s,
                Atom::Indicator(inner) => {
                    if eval_poly(inner, x, s)? >= 0.0 {
                        1.0
                    } else {
                        0.0
                    }
                }
            };
        }
        total += term;
    }
    Ok(total)
}

/// Evaluates a polynomial on one feature vector with fold state `s`.
pub fn eval_vv(e: &Vv, x: &[f64], s: f64) -> Result<f64> {
    match e {
        Vv::Hole => Err(hole()),
        Vv::Poly(p) => eval_poly(p, x, s),
    }
}

/// Left fold from 0; `ite` branches on `cond >= 0`.
pub fn eval_lv(e: &Lv, traj: &[Vec<f64>]) -> Result<f64> {
    match e {
        Lv::Hole => Err(hole()),
        Lv::Fold(body) => {
            let mut s = 0.0;
            for x in traj {
                s = eval_vv(body, x, s)?;
            }
            Ok(s)
        }
        Lv::Ite(c, a, b) => {
            if eval_lv(c, traj)? >= 0.0 {
                eval_lv(a, traj)
            } else {
                eval_lv(b, traj)
            }
        }
    }
}

/// `eval_lv` on every nonempty prefix, in one pass.
pub fn eval_lv_prefixes(e: &Lv, traj: &[Vec<f64>]) -> Result<Vec<f64>> {
    match e {
        Lv::Hole => Err(hole()),
        Lv::Fold(body) => {
            let mut s = 0.0;
            let mut out = Vec::with_capacity(traj.len());
            for x in traj {
                s = eval_vv(body, x, s)?;
                out.push(s);
            }
            Ok(out)
        }
        Lv::Ite(c, a, b) => {
            let c = eval_lv_prefixes(c, traj)?;
            let a = eval_lv_prefixes(a, traj)?;
            let b = eval_lv_prefixes(b, traj)?;
            Ok((0..traj.len()).map(|k| if c[k] >= 0.0 { a[k] } else { b[k] }).collect())
        }
    }
}

pub fn eval_ll(e: &Ll, traj: &[Vec<f64>]) -> Result<Vec<f64>> {
    match e {
        Ll::Hole => Err(hole()),
        Ll::Map(body) => traj.iter().map(|x| eval_vv(body, x, 0.0)).collect(),
        Ll::MapPrefix(lv) => eval_lv_prefixes(lv, traj),
        Ll::Ite(c, a, b) => {
            if eval_lv(c, traj)? >= 0.0 {
                eval_ll(a, traj)
            } else {
                eval_ll(b, traj)
            }
        }
    }
}

/// Step label is `t` iff the output is `>= 0`.
pub fn threshold_labels(r: &[f64]) -> Vec<bool> {
    r.iter().map(|&v| v >= 0.0).collect()
}

/// `I(c >= 0) * a + I(c < 0) * b`.
pub fn ite_encoding(cond: &RealInterval, a: &RealInterval, b: &RealInterval) -> RealInterval {
    let pos = ge_zero(cond);
    interval_add(
        &interval_mul(&interval_indicator(pos), a),
        &interval_mul(&interval_indicator(!pos), b),
    )
}

pub(crate) fn abs_eval_poly(p: &Poly, x: &[f64], s: &RealInterval) -> Result<RealInterval> {
    let mut total = RealInterval::point(0.0);
    for m in &p.0 {
        let mut term = m.coef.abstract_value();
        for a in &m.atoms {
            let v = match a {
                Atom::Feature(i) => RealInterval::point(feature(x, *i)?),
                Atom::FoldState => *s,
                Atom::Indicator(inner) => interval_indicator(ge_zero(&abs_eval_poly(inner, x, s)?)),
            };
            term = interval_mul(&term, &v);
        }
        total = interval_add(&total, &term);
    }
    Ok(total)
}

/// Interval semantics; a structural hole denotes `(-inf, inf)`.
pub fn abs_eval_vv(e: &Vv, x: &[f64], s: &RealInterval) -> Result<RealInterval> {
    match e {
        Vv::Hole => Ok(RealInterval::top()),
        Vv::Poly(p) => abs_eval_poly(p, x, s),
    }
}

pub(crate) fn abs_eval_lv(e: &Lv, traj: &[Vec<f64>]) -> Result<RealInterval> {
    match e {
        Lv::Hole => Ok(RealInterval::top()),
        Lv::Fold(body) => {
            let mut s = RealInterval::point(0.0);
            for x in traj {
                s = abs_eval_vv(body, x, &s)?;
            }
            Ok(s)
        }
        Lv::Ite(c, a, b) => Ok(ite_encoding(
            &abs_eval_lv(c, traj)?,
            &abs_eval_lv(a, traj)?,
            &abs_eval_lv(b, traj)?,
        )),
    }
}

pub fn abs_eval_lv_prefixes(e: &Lv, traj: &[Vec<f64>]) -> Result<Vec<RealInterval>> {
    match e {
        Lv::Hole => Ok(vec![RealInterval::top(); traj.len()]),
        Lv::Fold(body) => {
            let mut s = RealInterval::point(0.0);
            let mut out = Vec::with_capacity(traj.len());
            for x in traj {
                s = abs_eval_vv(body, x, &s)?;
                out.push(s);
            }
            Ok(out)
        }
        Lv::Ite(c, a, b) => {
            let c = abs_eval_lv_prefixes(c, traj)?;
            let a = abs_eval_lv_prefixes(a, traj)?;
            let b = abs_eval_lv_prefixes(b, traj)?;
            Ok((0..traj.len()).map(|k| ite_encoding(&c[k], &a[k], &b[k])).collect())
        }
    }
}

pub fn abs_eval_ll(e: &Ll, traj: &[Vec<f64>]) -> Result<Vec<RealInterval>> {
    match e {
        Ll::Hole => Ok(vec![RealInterval::top(); traj.len()]),
        Ll::Map(body) => {
            let zero = RealInterval::point(0.0);
            traj.iter().map(|x| abs_eval_vv(body, x, &zero)).collect()
        }
        Ll::MapPrefix(lv) => abs_eval_lv_prefixes(lv, traj),
        Ll::Ite(c, a, b) => {
            let c = abs_eval_lv(c, traj)?;
            let a = abs_eval_ll(a, traj)?;
            let b = abs_eval_ll(b, traj)?;
            Ok(a.iter().zip(&b).map(|(a, b)| ite_encoding(&c, a, b)).collect())
        }
    }
}
