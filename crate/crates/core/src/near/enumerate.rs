//! Canonical sum-of-products enumeration.
//!
//! Atoms are drawn from a fixed alphabet (features, then `z_f`, then
//! indicators). A monomial is a non-decreasing sequence of alphabet indices
//! and a polynomial is a strictly increasing sequence of monomials, so each
//! polynomial shape appears once up to commutativity and associativity.

use super::{poly_cost, Atom, Monomial, Poly};
use crate::constants::Constant;
use crate::interval::RealInterval;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PolyContext {
    pub dim: usize,
    /// `z_f` is only offered inside a fold, where it is not constantly 0.
    pub in_fold: bool,
}

struct Letter {
    atom: Atom,
    /// One-time cost of an indicator's body.
    body_cost: u32,
}

fn alphabet(ctx: PolyContext, budget: u32) -> Vec<Letter> {
    let mut out: Vec<Letter> = (0..ctx.dim)
        .map(|i| Letter {
            atom: Atom::Feature(i),
            body_cost: 0,
        })
        .collect();
    if ctx.in_fold {
        out.push(Letter {
            atom: Atom::FoldState,
            body_cost: 0,
        });
    }
    // An indicator needs a monomial (1), the atom (1) and a body with at
    // least one atom (2).
    if budget >= 4 {
        for inner in enumerate_polys(ctx, budget - 2) {
            if inner.0.iter().all(|m| m.atoms.is_empty()) {
                continue;
            }
            let body_cost = poly_cost(&inner);
            out.push(Letter {
                atom: Atom::Indicator(inner),
                body_cost,
            });
        }
    }
    out
}

fn monomial_cost(letters: &[Letter], m: &[usize]) -> u32 {
    let mut cost = 1 + m.len() as u32;
    let mut last = None;
    for &i in m {
        if Some(i) != last {
            cost += letters[i].body_cost;
            last = Some(i);
        }
    }
    cost
}

fn monomials(letters: &[Letter], budget: u32) -> Vec<Vec<usize>> {
    fn go(letters: &[Letter], budget: u32, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        out.push(cur.clone());
        for i in start..letters.len() {
            cur.push(i);
            if monomial_cost(letters, cur) <= budget {
                go(letters, budget, i, cur, out);
            }
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if budget >= 1 {
        go(letters, budget, 0, &mut Vec::new(), &mut out);
    }
    out
}

fn poly_shape_cost(letters: &[Letter], monos: &[Vec<usize>], chosen: &[usize]) -> u32 {
    let mut used: Vec<usize> = Vec::new();
    let mut cost = 0;
    for &k in chosen {
        cost += 1 + monos[k].len() as u32;
        for &i in &monos[k] {
            if !used.contains(&i) {
                used.push(i);
                cost += letters[i].body_cost;
            }
        }
    }
    cost
}

fn fresh_coefficient() -> Constant {
    Constant::boxed(RealInterval::closed(-1.0, 1.0))
}

/// All canonical polynomials with cost at most `budget`, every coefficient
/// boxed in `[-1, 1]`.
pub fn enumerate_polys(ctx: PolyContext, budget: u32) -> Vec<Poly> {
    let letters = alphabet(ctx, budget);
    let monos = monomials(&letters, budget);
    let mut shapes: Vec<Vec<usize>> = Vec::new();
    fn go(
        letters: &[Letter],
        monos: &[Vec<usize>],
        budget: u32,
        start: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        for k in start..monos.len() {
            cur.push(k);
            if poly_shape_cost(letters, monos, cur) <= budget {
                out.push(cur.clone());
                go(letters, monos, budget, k + 1, cur, out);
            }
            cur.pop();
        }
    }
    go(&letters, &monos, budget, 0, &mut Vec::new(), &mut shapes);
    shapes
        .into_iter()
        .map(|shape| {
            Poly(
                shape
                    .into_iter()
                    .map(|k| {
                        Monomial::new(
                            fresh_coefficient(),
                            monos[k].iter().map(|&i| letters[i].atom.clone()).collect(),
                        )
                    })
                    .collect(),
            )
        })
        .collect()
}
