//! Text form, e.g. `(max0 >= [0.1,0.8]) ; (avg1 >= 0.3)`.
//!
//! `&` binds tighter than `;` and both associate to the right.

use std::fmt;

use super::{predicate_by_name, PredicateRef, Query};
use crate::constants::Constant;
use crate::error::{Error, Result};
use crate::lex::{Lexer, Token};

fn print(q: &Query) -> String {
    match q {
        Query::Hole => "??".into(),
        Query::Pred0(f) => f.to_string(),
        Query::PredC(g, c) => format!("({g} >= {c})"),
        Query::Seq(a, b) => {
            let left = if matches!(**a, Query::Seq(..)) {
                format!("({})", print(a))
            } else {
                print(a)
            };
            format!("{left} ; {}", print(b))
        }
        Query::And(a, b) => {
            let wrap = |x: &Query, left: bool| match x {
                Query::Seq(..) => format!("({})", print(x)),
                Query::And(..) if left => format!("({})", print(x)),
                _ => print(x),
            };
            format!("{} & {}", wrap(a, true), wrap(b, false))
        }
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print(self))
    }
}

pub fn parse_query(src: &str) -> Result<Query> {
    let mut p = Lexer::new(src)?;
    let q = seq(&mut p)?;
    p.finish()?;
    Ok(q)
}

fn seq(p: &mut Lexer) -> Result<Query> {
    let a = and(p)?;
    if p.eat(&Token::Semi) {
        return Ok(Query::seq(a, seq(p)?));
    }
    Ok(a)
}

fn and(p: &mut Lexer) -> Result<Query> {
    let a = atom(p)?;
    if p.eat(&Token::Amp) {
        return Ok(Query::and(a, and(p)?));
    }
    Ok(a)
}

fn atom(p: &mut Lexer) -> Result<Query> {
    if p.eat(&Token::Hole) {
        return Ok(Query::Hole);
    }
    if p.eat(&Token::LParen) {
        let q = seq(p)?;
        p.expect(&Token::RParen)?;
        return Ok(q);
    }
    let col = p.column();
    let name = p.ident()?;
    match predicate_by_name(&name).map_err(|_| Error::parse(col, format!("unknown predicate `{name}`")))? {
        PredicateRef::Bool(f) => Ok(Query::Pred0(f)),
        PredicateRef::Score(g) => {
            p.expect(&Token::Ge)?;
            let c = match p.peek() {
                Token::LBracket | Token::LParen => Constant::boxed(p.interval()?),
                _ => Constant::Fixed(p.number()?),
            };
            Ok(Query::PredC(g, c))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::RealInterval;
    use crate::quivr::{BoolPredicate, ScorePredicate};
    use proptest::prelude::*;

    #[test]
    fn round_trips_examples() {
        for src in [
            "(max0 >= [0.1,0.8]) ; (avg1 >= 0.3)",
            "true",
            "??",
            "?? ; ?? & ??",
            "(?? ; ??) & true",
            "((max0 >= 0.7) ; (max0 >= 0.2)) ; true",
            "(true & true) & (min2 >= (0,1])",
            "(max0 >= -inf) ; (min0 >= inf)",
        ] {
            assert_eq!(parse_query(src).unwrap().to_string(), src);
        }
    }

    #[test]
    fn precedence() {
        let q = parse_query("true ; true & true").unwrap();
        assert!(matches!(q, Query::Seq(_, ref b) if matches!(**b, Query::And(..))));
        let q = parse_query("max0 >= 1 ; min1 >= 2").unwrap();
        assert_eq!(q.to_string(), "(max0 >= 1) ; (min1 >= 2)");
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_query("median0 >= 1").is_err());
        assert!(parse_query("max0").is_err());
        assert!(parse_query("max0 >= ").is_err());
        assert!(parse_query("true ;").is_err());
        assert!(parse_query("(true").is_err());
    }

    fn arb_query() -> impl Strategy<Value = Query> {
        let pred = (0usize..3, 0usize..3).prop_map(|(k, j)| match k {
            0 => ScorePredicate::Max(j),
            1 => ScorePredicate::Min(j),
            _ => ScorePredicate::Avg(j),
        });
        let c = prop_oneof![
            (-2.0f64..2.0).prop_map(Constant::Fixed),
            (-2.0f64..2.0, 0.001f64..1.0, any::<bool>(), any::<bool>())
                .prop_map(|(lo, w, a, b)| Constant::boxed(RealInterval::real(lo, a, lo + w, b))),
        ];
        let leaf = prop_oneof![
            Just(Query::Hole),
            Just(Query::Pred0(BoolPredicate::True)),
            (pred, c).prop_map(|(g, c)| Query::PredC(g, c)),
        ];
        leaf.prop_recursive(3, 12, 2, |inner| {
            (inner.clone(), inner, any::<bool>())
                .prop_map(|(a, b, s)| if s { Query::seq(a, b) } else { Query::and(a, b) })
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(q in arb_query()) {
            prop_assert_eq!(parse_query(&q.to_string()).unwrap(), q);
        }
    }
}
