//! Text form, e.g. `map(-1*z4 + [0.5,0.75])`.

use std::fmt;

use super::{Atom, Ll, Lv, Monomial, Poly, Vv};
use crate::constants::Constant;
use crate::error::{Error, Result};
use crate::lex::{Lexer, Token};

pub fn print_poly(p: &Poly) -> String {
    p.0.iter().map(print_monomial).collect::<Vec<_>>().join(" + ")
}

fn print_monomial(m: &Monomial) -> String {
    let mut s = m.coef.to_string();
    for a in &m.atoms {
        s.push('*');
        s.push_str(&print_atom(a));
    }
    s
}

fn print_atom(a: &Atom) -> String {
    match a {
        Atom::Feature(i) => format!("z{}", i + 1),
        Atom::FoldState => "zf".into(),
        Atom::Indicator(p) => format!("ind({})", print_poly(p)),
    }
}

fn print_vv(v: &Vv) -> String {
    match v {
        Vv::Hole => "??".into(),
        Vv::Poly(p) => print_poly(p),
    }
}

fn print_lv(l: &Lv) -> String {
    match l {
        Lv::Hole => "??".into(),
        Lv::Fold(v) => format!("fold({})", print_vv(v)),
        Lv::Ite(c, a, b) => format!("ite({}, {}, {})", print_lv(c), print_lv(a), print_lv(b)),
    }
}

pub fn print_ll(l: &Ll) -> String {
    match l {
        Ll::Hole => "??".into(),
        Ll::Map(v) => format!("map({})", print_vv(v)),
        Ll::MapPrefix(lv) => format!("mapprefix({})", print_lv(lv)),
        Ll::Ite(c, a, b) => format!("ite({}, {}, {})", print_lv(c), print_ll(a), print_ll(b)),
    }
}

impl fmt::Display for Ll {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_ll(self))
    }
}

impl fmt::Display for Lv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_lv(self))
    }
}

impl fmt::Display for Vv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_vv(self))
    }
}

pub fn parse_ll(src: &str) -> Result<Ll> {
    let mut p = Lexer::new(src)?;
    let out = ll(&mut p)?;
    p.finish()?;
    Ok(out)
}

pub fn parse_vv(src: &str) -> Result<Vv> {
    let mut p = Lexer::new(src)?;
    let out = vv(&mut p)?;
    p.finish()?;
    Ok(out)
}

fn ll(p: &mut Lexer) -> Result<Ll> {
    if p.eat(&Token::Hole) {
        return Ok(Ll::Hole);
    }
    let col = p.column();
    let name = p.ident()?;
    p.expect(&Token::LParen)?;
    let out = match name.as_str() {
        "map" => Ll::Map(vv(p)?),
        "mapprefix" | "mapprefixes" => Ll::MapPrefix(lv(p)?),
        "ite" => {
            let c = lv(p)?;
            p.expect(&Token::Comma)?;
            let a = ll(p)?;
            p.expect(&Token::Comma)?;
            let b = ll(p)?;
            Ll::Ite(Box::new(c), Box::new(a), Box::new(b))
        }
        other => return Err(Error::parse(col, format!("expected map, mapprefix or ite, found `{other}`"))),
    };
    p.expect(&Token::RParen)?;
    Ok(out)
}

fn lv(p: &mut Lexer) -> Result<Lv> {
    if p.eat(&Token::Hole) {
        return Ok(Lv::Hole);
    }
    let col = p.column();
    let name = p.ident()?;
    p.expect(&Token::LParen)?;
    let out = match name.as_str() {
        "fold" => Lv::Fold(vv(p)?),
        "ite" => {
            let c = lv(p)?;
            p.expect(&Token::Comma)?;
            let a = lv(p)?;
            p.expect(&Token::Comma)?;
            let b = lv(p)?;
            Lv::Ite(Box::new(c), Box::new(a), Box::new(b))
        }
        other => return Err(Error::parse(col, format!("expected fold or ite, found `{other}`"))),
    };
    p.expect(&Token::RParen)?;
    Ok(out)
}

fn vv(p: &mut Lexer) -> Result<Vv> {
    if p.eat(&Token::Hole) {
        return Ok(Vv::Hole);
    }
    Ok(Vv::Poly(poly(p)?))
}

fn poly(p: &mut Lexer) -> Result<Poly> {
    let mut monos = vec![monomial(p)?];
    while p.eat(&Token::Plus) {
        monos.push(monomial(p)?);
    }
    Ok(Poly(monos))
}

fn monomial(p: &mut Lexer) -> Result<Monomial> {
    let mut coef: Option<Constant> = None;
    let mut atoms = Vec::new();
    let mut negate = false;
    if p.eat(&Token::Minus) {
        negate = true;
    }
    loop {
        let col = p.column();
        match p.peek().clone() {
            Token::Number(v) => {
                p.bump();
                set_coef(&mut coef, Constant::Fixed(v), col)?;
            }
            Token::LBracket | Token::LParen => {
                let iv = p.interval()?;
                set_coef(&mut coef, Constant::boxed(iv), col)?;
            }
            Token::Ident(name) => {
                p.bump();
                atoms.push(atom(p, &name, col)?);
            }
            other => return Err(Error::parse(col, format!("expected a factor, found {other}"))),
        }
        if !p.eat(&Token::Star) {
            break;
        }
    }
    let mut coef = coef.unwrap_or(Constant::Fixed(1.0));
    if negate {
        coef = match coef {
            Constant::Fixed(v) => Constant::Fixed(-v),
            Constant::Boxed(_) => return Err(Error::parse(p.column(), "cannot negate an interval")),
        };
    }
    Ok(Monomial::new(coef, atoms))
}

fn set_coef(slot: &mut Option<Constant>, c: Constant, col: usize) -> Result<()> {
    if slot.is_some() {
        return Err(Error::parse(col, "a monomial has at most one coefficient"));
    }
    *slot = Some(c);
    Ok(())
}

fn atom(p: &mut Lexer, name: &str, col: usize) -> Result<Atom> {
    if name == "zf" {
        return Ok(Atom::FoldState);
    }
    if name == "ind" {
        p.expect(&Token::LParen)?;
        let inner = poly(p)?;
        p.expect(&Token::RParen)?;
        return Ok(Atom::Indicator(inner));
    }
    if let Some(digits) = name.strip_prefix('z') {
        if let Ok(i) = digits.parse::<usize>() {
            if i >= 1 {
                return Ok(Atom::Feature(i - 1));
            }
        }
    }
    Err(Error::parse(col, format!("unknown atom `{name}` (features are z1, z2, ...)")))
}
