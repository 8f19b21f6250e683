//! Interval abstract domains.
//!
//! Real intervals are closed by default. The isolating split policy produces
//! half-open boxes, so real endpoints carry an `open` flag; every operation
//! below is exact about whether an endpoint is attained.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// A carrier value extended with `-inf` and `+inf`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub enum Extended<T> {
    NegInf,
    Finite(T),
    PosInf,
}

impl<T> Extended<T> {
    pub fn is_finite(&self) -> bool {
        matches!(self, Extended::Finite(_))
    }

    pub fn finite(self) -> Option<T> {
        match self {
            Extended::Finite(v) => Some(v),
            _ => None,
        }
    }
}

impl Extended<f64> {
    /// Maps `f64` infinities onto the infinite tags. NaN is rejected.
    pub fn from_f64(v: f64) -> Self {
        assert!(!v.is_nan(), "NaN is not an extended real");
        if v == f64::INFINITY {
            Extended::PosInf
        } else if v == f64::NEG_INFINITY {
            Extended::NegInf
        } else {
            Extended::Finite(v)
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Extended::NegInf => f64::NEG_INFINITY,
            Extended::Finite(v) => v,
            Extended::PosInf => f64::INFINITY,
        }
    }
}

/// An interval `(lo, hi)` with `lo <= hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval<T> {
    lo: Extended<T>,
    hi: Extended<T>,
    lo_open: bool,
    hi_open: bool,
}

impl<T: Copy + PartialOrd + fmt::Debug> Interval<T> {
    /// Closed interval. Panics if `lo > hi` or the endpoints are incomparable.
    pub fn new(lo: Extended<T>, hi: Extended<T>) -> Self {
        Self::with_openness(lo, false, hi, false)
    }

    /// Interval with explicit endpoint openness. Infinite endpoints are never
    /// attained, so their flags are normalized to `false`.
    pub fn with_openness(lo: Extended<T>, lo_open: bool, hi: Extended<T>, hi_open: bool) -> Self {
        match lo.partial_cmp(&hi) {
            Some(Ordering::Less) => {}
            Some(Ordering::Equal) => assert!(
                !(lo_open || hi_open) || !lo.is_finite(),
                "empty interval {lo:?}..{hi:?}"
            ),
            _ => panic!("interval endpoints out of order: {lo:?} > {hi:?}"),
        }
        Interval {
            lo,
            hi,
            lo_open: lo_open && lo.is_finite(),
            hi_open: hi_open && hi.is_finite(),
        }
    }

    pub fn lo(&self) -> Extended<T> {
        self.lo
    }

    pub fn hi(&self) -> Extended<T> {
        self.hi
    }

    pub fn lo_open(&self) -> bool {
        self.lo_open
    }

    pub fn hi_open(&self) -> bool {
        self.hi_open
    }

    pub fn is_singleton(&self) -> bool {
        self.lo.is_finite() && self.lo == self.hi
    }

    /// Membership under the carrier order, honoring open endpoints.
    pub fn contains(&self, v: T) -> bool {
        let v = Extended::Finite(v);
        let above = if self.lo_open { self.lo < v } else { self.lo <= v };
        let below = if self.hi_open { v < self.hi } else { v <= self.hi };
        above && below
    }

    /// True if every member of `self` is a member of `other`.
    pub fn is_subset_of(&self, other: &Self) -> bool {
        let lo_ok = match other.lo.partial_cmp(&self.lo) {
            Some(Ordering::Less) => true,
            Some(Ordering::Equal) => !other.lo_open || self.lo_open,
            _ => false,
        };
        let hi_ok = match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Less) => true,
            Some(Ordering::Equal) => !other.hi_open || self.hi_open,
            _ => false,
        };
        lo_ok && hi_ok
    }
}

/// An abstract value: an interval or the inert bottom element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AbstractValue<T> {
    Bottom,
    Interval(Interval<T>),
}

impl<T: Copy + PartialOrd + fmt::Debug> AbstractValue<T> {
    pub fn contains(&self, v: T) -> bool {
        match self {
            AbstractValue::Bottom => false,
            AbstractValue::Interval(iv) => iv.contains(v),
        }
    }
}

/// `alpha(v) = (v, v)`.
pub fn abstract_singleton<T: Copy + PartialOrd + fmt::Debug>(v: T) -> Interval<T> {
    Interval::new(Extended::Finite(v), Extended::Finite(v))
}

pub fn contains<T: Copy + PartialOrd + fmt::Debug>(iv: &Interval<T>, v: T) -> bool {
    iv.contains(v)
}

/// Monotonicity of one argument of a lifted function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Increasing,
    Decreasing,
}

/// Interval transformer for a function monotone in each argument.
///
/// `f` is only called on finite endpoint tuples. If the endpoint tuple for a
/// bound contains an infinity, that bound saturates outward. The result is
/// closed.
pub fn lift_monotone<T, U, F>(f: F, args: &[Interval<T>], dirs: &[Direction]) -> Interval<U>
where
    T: Copy + PartialOrd + fmt::Debug,
    U: Copy + PartialOrd + fmt::Debug,
    F: Fn(&[T]) -> U,
{
    assert_eq!(args.len(), dirs.len(), "one direction per argument");
    let pick = |want_lo: bool| -> Extended<U> {
        let mut point = Vec::with_capacity(args.len());
        for (iv, dir) in args.iter().zip(dirs) {
            let use_lo = want_lo == (*dir == Direction::Increasing);
            match if use_lo { iv.lo } else { iv.hi } {
                Extended::Finite(v) => point.push(v),
                _ if want_lo => return Extended::NegInf,
                _ => return Extended::PosInf,
            }
        }
        Extended::Finite(f(&point))
    };
    let lo = pick(true);
    let hi = pick(false);
    Interval::new(lo, hi)
}

/// Real intervals.
pub type RealInterval = Interval<f64>;

impl Interval<f64> {
    /// Closed real interval; `f64` infinities become infinite endpoints.
    pub fn closed(lo: f64, hi: f64) -> Self {
        Interval::new(Extended::from_f64(lo), Extended::from_f64(hi))
    }

    pub fn real(lo: f64, lo_open: bool, hi: f64, hi_open: bool) -> Self {
        Interval::with_openness(Extended::from_f64(lo), lo_open, Extended::from_f64(hi), hi_open)
    }

    pub fn point(v: f64) -> Self {
        Interval::closed(v, v)
    }

    pub fn top() -> Self {
        Interval::closed(f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn lo_f64(&self) -> f64 {
        self.lo.to_f64()
    }

    pub fn hi_f64(&self) -> f64 {
        self.hi.to_f64()
    }

    pub fn width(&self) -> f64 {
        self.hi_f64() - self.lo_f64()
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    /// Midpoint of a bounded interval. Always a member, including for
    /// half-open intervals wide enough to split.
    pub fn midpoint(&self) -> f64 {
        let (lo, hi) = (self.lo_f64(), self.hi_f64());
        if lo == hi {
            lo
        } else {
            0.5 * (lo + hi)
        }
    }

    fn from_ends(lo: End, hi: End) -> Self {
        Interval::real(lo.v, lo.open, hi.v, hi.open)
    }

    fn lo_end(&self) -> End {
        End {
            v: self.lo_f64(),
            open: self.lo_open,
        }
    }

    fn hi_end(&self) -> End {
        End {
            v: self.hi_f64(),
            open: self.hi_open,
        }
    }
}

impl fmt::Display for Interval<f64> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{},{}{}",
            if self.lo_open { '(' } else { '[' },
            fmt_real(self.lo_f64()),
            fmt_real(self.hi_f64()),
            if self.hi_open { ')' } else { ']' }
        )
    }
}

/// Shortest round-tripping text for a real, with `inf`/`-inf`.
pub fn fmt_real(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".to_string()
    } else if v == f64::NEG_INFINITY {
        "-inf".to_string()
    } else if v == 0.0 {
        "0".to_string()
    } else {
        format!("{v}")
    }
}

#[derive(Debug, Clone, Copy)]
struct End {
    v: f64,
    open: bool,
}

/// `a + b`, endpoint-wise. `inf - inf` saturates outward.
pub fn interval_add(a: &RealInterval, b: &RealInterval) -> RealInterval {
    let lo = add_end(a.lo_end(), b.lo_end(), f64::NEG_INFINITY);
    let hi = add_end(a.hi_end(), b.hi_end(), f64::INFINITY);
    Interval::from_ends(lo, hi)
}

fn add_end(x: End, y: End, saturate: f64) -> End {
    let v = x.v + y.v;
    if v.is_nan() {
        return End {
            v: saturate,
            open: false,
        };
    }
    End {
        v,
        open: x.open || y.open,
    }
}

pub fn interval_neg(a: &RealInterval) -> RealInterval {
    Interval::real(-a.hi_f64(), a.hi_open, -a.lo_f64(), a.lo_open)
}

/// Product: min and max over the four endpoint products. `0 * inf` saturates
/// the affected bound outward.
pub fn interval_mul(a: &RealInterval, b: &RealInterval) -> RealInterval {
    if a.is_singleton() && b.is_singleton() {
        return Interval::point(a.lo_f64() * b.lo_f64());
    }
    let xs = [a.lo_end(), a.hi_end()];
    let ys = [b.lo_end(), b.hi_end()];
    let mut lo: Option<End> = None;
    let mut hi: Option<End> = None;
    for x in xs {
        for y in ys {
            let l = mul_end(x, y, f64::NEG_INFINITY);
            let h = mul_end(x, y, f64::INFINITY);
            lo = Some(match lo {
                None => l,
                Some(cur) => pick_end(cur, l, true),
            });
            hi = Some(match hi {
                None => h,
                Some(cur) => pick_end(cur, h, false),
            });
        }
    }
    Interval::from_ends(lo.expect("four candidates"), hi.expect("four candidates"))
}

fn mul_end(x: End, y: End, saturate: f64) -> End {
    let v = x.v * y.v;
    if v.is_nan() {
        return End {
            v: saturate,
            open: false,
        };
    }
    // A closed zero factor pins the product to zero for every value of the
    // other factor, so the endpoint is attained.
    let pinned = (x.v == 0.0 && !x.open) || (y.v == 0.0 && !y.open);
    End {
        v,
        open: !pinned && (x.open || y.open),
    }
}

fn pick_end(cur: End, cand: End, min: bool) -> End {
    if cand.v == cur.v {
        End {
            v: cur.v,
            open: cur.open && cand.open,
        }
    } else if (cand.v < cur.v) == min {
        cand
    } else {
        cur
    }
}

/// Multiplication by a constant scalar.
pub fn interval_scale(a: &RealInterval, k: f64) -> RealInterval {
    interval_mul(a, &Interval::point(k))
}

/// Boolean intervals over `f < t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum BoolInterval {
    /// `(f, f)`
    False,
    /// `(f, t)`
    Top,
    /// `(t, t)`
    True,
}

impl BoolInterval {
    pub fn from_bounds(lo: bool, hi: bool) -> Self {
        match (lo, hi) {
            (false, false) => BoolInterval::False,
            (false, true) => BoolInterval::Top,
            (true, true) => BoolInterval::True,
            (true, false) => panic!("boolean interval (t, f) is empty"),
        }
    }

    /// Clamps an extended Boolean interval onto the three inhabitants.
    pub fn from_interval(iv: &Interval<bool>) -> Self {
        let lo = match iv.lo() {
            Extended::NegInf => false,
            Extended::Finite(b) => b,
            Extended::PosInf => true,
        };
        let hi = match iv.hi() {
            Extended::NegInf => false,
            Extended::Finite(b) => b,
            Extended::PosInf => true,
        };
        BoolInterval::from_bounds(lo, hi)
    }

    pub fn singleton(b: bool) -> Self {
        if b {
            BoolInterval::True
        } else {
            BoolInterval::False
        }
    }

    pub fn lo(self) -> bool {
        self == BoolInterval::True
    }

    pub fn hi(self) -> bool {
        self != BoolInterval::False
    }

    pub fn contains(self, b: bool) -> bool {
        if b {
            self.hi()
        } else {
            !self.lo()
        }
    }

    pub fn is_determined(self) -> bool {
        self != BoolInterval::Top
    }

}

impl std::ops::Not for BoolInterval {
    type Output = Self;

    fn not(self) -> Self {
        match self {
            BoolInterval::False => BoolInterval::True,
            BoolInterval::Top => BoolInterval::Top,
            BoolInterval::True => BoolInterval::False,
        }
    }
}

impl fmt::Display for BoolInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoolInterval::False => "(f,f)",
            BoolInterval::Top => "(f,t)",
            BoolInterval::True => "(t,t)",
        })
    }
}

pub fn bool_and(a: BoolInterval, b: BoolInterval) -> BoolInterval {
    BoolInterval::from_bounds(a.lo() && b.lo(), a.hi() && b.hi())
}

pub fn bool_or(a: BoolInterval, b: BoolInterval) -> BoolInterval {
    BoolInterval::from_bounds(a.lo() || b.lo(), a.hi() || b.hi())
}

/// `(f,f) -> (0,0)`, `(f,t) -> (0,1)`, `(t,t) -> (1,1)`.
pub fn interval_indicator(c: BoolInterval) -> RealInterval {
    match c {
        BoolInterval::False => Interval::point(0.0),
        BoolInterval::Top => Interval::closed(0.0, 1.0),
        BoolInterval::True => Interval::point(1.0),
    }
}

/// Abstract `r >= 0`.
pub fn ge_zero(r: &RealInterval) -> BoolInterval {
    let (lo, hi) = (r.lo_f64(), r.hi_f64());
    if lo >= 0.0 {
        BoolInterval::True
    } else if hi < 0.0 || (hi == 0.0 && r.hi_open()) {
        BoolInterval::False
    } else {
        BoolInterval::Top
    }
}

/// Abstract `score >= c` for a concrete score and a threshold box; monotone
/// decreasing in `c`.
pub fn threshold_ge(score: f64, c: &RealInterval) -> BoolInterval {
    if score == f64::INFINITY {
        return BoolInterval::True;
    }
    if score == f64::NEG_INFINITY {
        return BoolInterval::False;
    }
    let (lo, hi) = (c.lo_f64(), c.hi_f64());
    if score >= hi {
        BoolInterval::True
    } else if score < lo || (score == lo && c.lo_open()) {
        BoolInterval::False
    } else {
        BoolInterval::Top
    }
}

/// Bisects a bounded interval at its midpoint. Both halves contain the
/// midpoint; outer endpoint openness is preserved.
pub fn split_interval(iv: &RealInterval) -> Result<(RealInterval, RealInterval)> {
    let m = split_point(iv)?;
    Ok((
        Interval::real(iv.lo_f64(), iv.lo_open, m, false),
        Interval::real(m, false, iv.hi_f64(), iv.hi_open),
    ))
}

/// Splits into `(lo, m)`, `[m, m]`, `(m, hi)`: a partition of the input.
pub fn split_isolating(iv: &RealInterval) -> Result<[RealInterval; 3]> {
    let m = split_point(iv)?;
    Ok([
        Interval::real(iv.lo_f64(), iv.lo_open, m, true),
        Interval::point(m),
        Interval::real(m, true, iv.hi_f64(), iv.hi_open),
    ])
}

fn split_point(iv: &RealInterval) -> Result<f64> {
    if !iv.is_bounded() {
        return Err(Error::InfiniteSplit(iv.to_string()));
    }
    let (lo, hi) = (iv.lo_f64(), iv.hi_f64());
    let m = 0.5 * (lo + hi);
    if !(lo < m && m < hi) {
        return Err(Error::DegenerateSplit(iv.to_string()));
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn iv(lo: f64, hi: f64) -> RealInterval {
        Interval::closed(lo, hi)
    }

    #[test]
    fn singleton_and_contains() {
        assert_eq!(abstract_singleton(50.0), iv(50.0, 50.0));
        let t = abstract_singleton(true);
        assert!(t.contains(true) && !t.contains(false));
        assert_eq!(abstract_singleton(0.0), Interval::point(0.0));
        assert!(contains(&iv(50.0, 75.0), 65.0));
        assert!(!contains(&iv(50.0, 75.0), 101.0));
        assert!(Interval::top().contains(-1e300));
        assert!(!AbstractValue::<f64>::Bottom.contains(0.0));
    }

    #[test]
    fn lift_examples() {
        let plus = |xs: &[f64]| xs[0] + xs[1];
        let inc = [Direction::Increasing; 2];
        assert_eq!(lift_monotone(plus, &[iv(1.0, 2.0), iv(3.0, 4.0)], &inc), iv(4.0, 6.0));
        assert_eq!(lift_monotone(plus, &[iv(0.0, 0.0), iv(0.0, 0.0)], &inc), iv(0.0, 0.0));
        let ge = |xs: &[f64]| 65.0 >= xs[0];
        let out = lift_monotone(ge, &[iv(50.0, 75.0)], &[Direction::Decreasing]);
        assert_eq!(BoolInterval::from_interval(&out), BoolInterval::Top);
    }

    #[test]
    fn lift_saturates_infinities() {
        let plus = |xs: &[f64]| xs[0] + xs[1];
        let out = lift_monotone(plus, &[iv(f64::NEG_INFINITY, 1.0), iv(0.0, 1.0)], &[Direction::Increasing; 2]);
        assert_eq!(out, iv(f64::NEG_INFINITY, 2.0));
        let minus = |xs: &[f64]| xs[0] - xs[1];
        let out = lift_monotone(
            minus,
            &[iv(0.0, 1.0), iv(0.0, f64::INFINITY)],
            &[Direction::Increasing, Direction::Decreasing],
        );
        assert_eq!(out, iv(f64::NEG_INFINITY, 1.0));
    }

    #[test]
    fn mul_examples() {
        assert_eq!(interval_mul(&iv(-1.0, 2.0), &iv(3.0, 4.0)), iv(-4.0, 8.0));
        assert_eq!(interval_mul(&iv(2.0, 2.0), &iv(3.0, 3.0)), iv(6.0, 6.0));
        assert_eq!(interval_mul(&iv(-1.0, 1.0), &iv(-1.0, 1.0)), iv(-1.0, 1.0));
    }

    #[test]
    fn mul_zero_times_infinity_saturates() {
        let out = interval_mul(&iv(0.0, 1.0), &Interval::top());
        assert_eq!(out, Interval::top());
        let out = interval_mul(&iv(0.0, 0.0), &iv(1.0, f64::INFINITY));
        assert_eq!(out, Interval::top());
    }

    #[test]
    fn mul_tracks_open_endpoints() {
        // (0, 1] * [-2, -2] = [-2, 0)
        let out = interval_mul(&Interval::real(0.0, true, 1.0, false), &iv(-2.0, -2.0));
        assert_eq!(out, Interval::real(-2.0, false, 0.0, true));
        assert_eq!(ge_zero(&out), BoolInterval::False);
        // [0, 1] * (-2, -1): zero is attained via the closed zero factor.
        let out = interval_mul(&iv(0.0, 1.0), &Interval::real(-2.0, true, -1.0, true));
        assert_eq!(out, Interval::real(-2.0, true, 0.0, false));
        assert_eq!(ge_zero(&out), BoolInterval::Top);
    }

    #[test]
    fn indicator_table() {
        assert_eq!(interval_indicator(BoolInterval::False), iv(0.0, 0.0));
        assert_eq!(interval_indicator(BoolInterval::Top), iv(0.0, 1.0));
        assert_eq!(interval_indicator(BoolInterval::True), iv(1.0, 1.0));
    }

    #[test]
    fn bool_tables() {
        use BoolInterval::*;
        assert_eq!(bool_and(Top, True), Top);
        assert_eq!(bool_and(False, Top), False);
        assert_eq!(bool_or(Top, True), True);
        assert_eq!(bool_and(True, True), True);
        assert_eq!(bool_or(False, False), False);
        assert_eq!(bool_or(False, Top), Top);
    }

    #[test]
    fn threshold_table() {
        let c = iv(50.0, 75.0);
        assert_eq!(threshold_ge(40.0, &c), BoolInterval::False);
        assert_eq!(threshold_ge(50.0, &c), BoolInterval::Top);
        assert_eq!(threshold_ge(65.0, &c), BoolInterval::Top);
        assert_eq!(threshold_ge(75.0, &c), BoolInterval::True);
        assert_eq!(threshold_ge(f64::NEG_INFINITY, &c), BoolInterval::False);
        assert_eq!(threshold_ge(f64::INFINITY, &c), BoolInterval::True);
        assert_eq!(threshold_ge(50.0, &Interval::real(50.0, true, 75.0, false)), BoolInterval::False);
    }

    #[test]
    fn split_examples() {
        assert_eq!(split_interval(&iv(50.0, 100.0)).unwrap(), (iv(50.0, 75.0), iv(75.0, 100.0)));
        assert_eq!(split_interval(&iv(0.0, 100.0)).unwrap(), (iv(0.0, 50.0), iv(50.0, 100.0)));
        assert_eq!(split_interval(&iv(-1.0, 1.0)).unwrap(), (iv(-1.0, 0.0), iv(0.0, 1.0)));
        assert!(matches!(split_interval(&iv(1.0, 1.0)), Err(Error::DegenerateSplit(_))));
        assert!(matches!(split_interval(&Interval::top()), Err(Error::InfiniteSplit(_))));
    }

    #[test]
    fn isolating_split_partitions() {
        let [a, b, c] = split_isolating(&iv(-1.0, 1.0)).unwrap();
        assert_eq!(a, Interval::real(-1.0, false, 0.0, true));
        assert_eq!(b, Interval::point(0.0));
        assert_eq!(c, Interval::real(0.0, true, 1.0, false));
        assert_eq!(a.to_string(), "[-1,0)");
    }

    #[test]
    fn subset() {
        assert!(iv(0.0, 1.0).is_subset_of(&iv(0.0, 1.0)));
        assert!(!iv(0.0, 1.0).is_subset_of(&Interval::real(0.0, true, 1.0, false)));
        assert!(Interval::real(0.0, true, 1.0, false).is_subset_of(&iv(0.0, 1.0)));
    }

    fn arb_interval() -> impl Strategy<Value = RealInterval> {
        (-50.0f64..50.0, 0.0f64..20.0, any::<bool>(), any::<bool>()).prop_map(|(lo, w, lo_open, hi_open)| {
            if w == 0.0 {
                Interval::point(lo)
            } else {
                Interval::real(lo, lo_open, lo + w, hi_open)
            }
        })
    }

    fn sample(iv: &RealInterval, t: f64) -> f64 {
        let (lo, hi) = (iv.lo_f64(), iv.hi_f64());
        let mut v = lo + t * (hi - lo);
        if !iv.contains(v) {
            v = iv.midpoint();
        }
        v
    }

    proptest! {
        #[test]
        fn add_mul_contain_samples(a in arb_interval(), b in arb_interval(), s in 0.0f64..=1.0, t in 0.0f64..=1.0) {
            let (x, y) = (sample(&a, s), sample(&b, t));
            prop_assert!(interval_add(&a, &b).contains(x + y));
            prop_assert!(interval_mul(&a, &b).contains(x * y));
            prop_assert!(interval_neg(&a).contains(-x));
        }

        #[test]
        fn singleton_exactness(x in -50.0f64..50.0, y in -50.0f64..50.0) {
            let (a, b) = (Interval::point(x), Interval::point(y));
            prop_assert_eq!(interval_add(&a, &b), Interval::point(x + y));
            prop_assert_eq!(interval_mul(&a, &b), Interval::point(x * y));
        }

        #[test]
        fn split_children_cover(a in arb_interval(), t in 0.0f64..=1.0) {
            prop_assume!(a.width() > 1e-9);
            let v = sample(&a, t);
            let (l, r) = split_interval(&a).unwrap();
            prop_assert!(l.contains(v) || r.contains(v));
            let parts = split_isolating(&a).unwrap();
            prop_assert_eq!(parts.iter().filter(|p| p.contains(v)).count(), 1);
        }

        #[test]
        fn lift_matches_grid_extremes(lo1 in -5.0f64..5.0, w1 in 0.0f64..5.0, lo2 in -5.0f64..5.0, w2 in 0.0f64..5.0) {
            let f = |xs: &[f64]| xs[0].powi(3) + 2.0 * xs[1];
            let out = lift_monotone(f, &[iv(lo1, lo1 + w1), iv(lo2, lo2 + w2)], &[Direction::Increasing; 2]);
            let (mut mn, mut mx) = (f64::INFINITY, f64::NEG_INFINITY);
            for i in 0..10 {
                for j in 0..10 {
                    let v = f(&[lo1 + w1 * i as f64 / 9.0, lo2 + w2 * j as f64 / 9.0]);
                    mn = mn.min(v);
                    mx = mx.max(v);
                }
            }
            prop_assert!((out.lo_f64() - mn).abs() <= 1e-12 * (1.0 + mn.abs()));
            prop_assert!((out.hi_f64() - mx).abs() <= 1e-12 * (1.0 + mx.abs()));
        }
    }
}
