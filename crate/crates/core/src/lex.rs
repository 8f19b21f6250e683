//! Tokenizer shared by the program parsers.

use std::fmt;

use crate::error::{Error, Result};
use crate::interval::RealInterval;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Token {
    Ident(String),
    Number(f64),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Plus,
    Minus,
    Star,
    Semi,
    Amp,
    Ge,
    Hole,
    Eof,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Ident(s) => write!(f, "`{s}`"),
            Token::Number(v) => write!(f, "`{v}`"),
            Token::LParen => f.write_str("`(`"),
            Token::RParen => f.write_str("`)`"),
            Token::LBracket => f.write_str("`[`"),
            Token::RBracket => f.write_str("`]`"),
            Token::Comma => f.write_str("`,`"),
            Token::Plus => f.write_str("`+`"),
            Token::Minus => f.write_str("`-`"),
            Token::Star => f.write_str("`*`"),
            Token::Semi => f.write_str("`;`"),
            Token::Amp => f.write_str("`&`"),
            Token::Ge => f.write_str("`>=`"),
            Token::Hole => f.write_str("`??`"),
            Token::Eof => f.write_str("end of input"),
        }
    }
}

pub(crate) struct Lexer {
    tokens: Vec<(Token, usize)>,
    pos: usize,
}

fn number_starts(chars: &[char], i: usize) -> bool {
    let c = chars[i];
    c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()))
}

fn tokenize(src: &str) -> Result<Vec<(Token, usize)>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let simple = match c {
            '(' => Some(Token::LParen),
            ')' => Some(Token::RParen),
            '[' => Some(Token::LBracket),
            ']' => Some(Token::RBracket),
            ',' => Some(Token::Comma),
            '+' => Some(Token::Plus),
            '*' => Some(Token::Star),
            ';' => Some(Token::Semi),
            '&' => Some(Token::Amp),
            _ => None,
        };
        if let Some(t) = simple {
            out.push((t, col));
            i += 1;
            continue;
        }
        if c == '>' && chars.get(i + 1) == Some(&'=') {
            out.push((Token::Ge, col));
            i += 2;
            continue;
        }
        if c == '?' && chars.get(i + 1) == Some(&'?') {
            out.push((Token::Hole, col));
            i += 2;
            continue;
        }
        let negative = c == '-';
        let body = if negative { i + 1 } else { i };
        let is_inf = chars[body..].starts_with(&['i', 'n', 'f']) && !chars.get(body + 3).is_some_and(|d| d.is_alphanumeric());
        if body < chars.len() && (number_starts(&chars, body) || (negative && is_inf)) {
            let mut j = body;
            if is_inf {
                j += 3;
            } else {
                while j < chars.len() {
                    let d = chars[j];
                    let exp_sign = (d == '-' || d == '+') && matches!(chars[j - 1], 'e' | 'E');
                    if d.is_ascii_digit() || d == '.' || d == 'e' || d == 'E' || exp_sign {
                        j += 1;
                    } else {
                        break;
                    }
                }
            }
            let text: String = chars[i..j].iter().collect();
            let v: f64 = text
                .parse()
                .map_err(|_| Error::parse(col, format!("malformed number `{text}`")))?;
            out.push((Token::Number(v), col));
            i = j;
            continue;
        }
        if negative {
            out.push((Token::Minus, col));
            i += 1;
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            let word: String = chars[i..j].iter().collect();
            if word == "inf" {
                out.push((Token::Number(f64::INFINITY), col));
            } else {
                out.push((Token::Ident(word), col));
            }
            i = j;
            continue;
        }
        return Err(Error::parse(col, format!("unexpected character `{c}`")));
    }
    out.push((Token::Eof, chars.len() + 1));
    Ok(out)
}

impl Lexer {
    pub(crate) fn new(src: &str) -> Result<Self> {
        Ok(Lexer {
            tokens: tokenize(src)?,
            pos: 0,
        })
    }

    pub(crate) fn peek(&self) -> &Token {
        &self.tokens[self.pos].0
    }

    pub(crate) fn column(&self) -> usize {
        self.tokens[self.pos].1
    }

    pub(crate) fn bump(&mut self) {
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
    }

    pub(crate) fn eat(&mut self, t: &Token) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, t: &Token) -> Result<()> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(Error::parse(self.column(), format!("expected {t}, found {}", self.peek())))
        }
    }

    pub(crate) fn ident(&mut self) -> Result<String> {
        match self.peek().clone() {
            Token::Ident(s) => {
                self.bump();
                Ok(s)
            }
            other => Err(Error::parse(self.column(), format!("expected a name, found {other}"))),
        }
    }

    pub(crate) fn number(&mut self) -> Result<f64> {
        match *self.peek() {
            Token::Number(v) => {
                self.bump();
                Ok(v)
            }
            ref other => Err(Error::parse(self.column(), format!("expected a number, found {other}"))),
        }
    }

    /// `[lo,hi]`, `(lo,hi]`, `[lo,hi)` or `(lo,hi)`.
    pub(crate) fn interval(&mut self) -> Result<RealInterval> {
        let col = self.column();
        let lo_open = match self.peek() {
            Token::LBracket => false,
            Token::LParen => true,
            other => return Err(Error::parse(col, format!("expected an interval, found {other}"))),
        };
        self.bump();
        let lo = self.number()?;
        self.expect(&Token::Comma)?;
        let hi = self.number()?;
        let hi_open = match self.peek() {
            Token::RBracket => false,
            Token::RParen => true,
            other => return Err(Error::parse(self.column(), format!("expected `]` or `)`, found {other}"))),
        };
        self.bump();
        if !(lo < hi || (lo == hi && !lo_open && !hi_open)) {
            return Err(Error::parse(col, format!("empty interval [{lo},{hi}]")));
        }
        Ok(RealInterval::real(lo, lo_open, hi, hi_open))
    }

    pub(crate) fn finish(&self) -> Result<()> {
        match self.peek() {
            Token::Eof => Ok(()),
            other => Err(Error::parse(self.column(), format!("unexpected trailing {other}"))),
        }
    }
}
