//! Parser for coupling functions written as trigonometric polynomials.
//!
//! Grammar, with `*` optional between factors:
//!
//! ```text
//! sum     = product (("+" | "-") product)*
//! product = unary ("*"? unary)*
//! unary   = "-" unary | power
//! power   = atom ("^" integer)?
//! atom    = number | "(" sum ")" | ("cos" | "sin") "(" harmonic ")"
//! harmonic = "-"? integer? "*"? ("p1" | "p2" | "p3")
//! ```
//!
//! Every expression is expanded exactly into the product basis of
//! [`TrigSeries`], e.g. `(1 - cos(p1))(cos(p1) + 0.5)` becomes
//! `cos(p1)/2 - cos(2p1)/2`.

use friedrichs_core::{TrigSeries, VFunction};
use thiserror::Error;

/// Largest exponent accepted after `^`.
pub const MAX_POWER: u32 = 8;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("cannot parse coupling function at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Open,
    Close,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        match c {
            ' ' | '\t' | '\n' => {
                i += 1;
                continue;
            }
            '+' => out.push((i, Tok::Plus)),
            '-' => out.push((i, Tok::Minus)),
            '*' => out.push((i, Tok::Star)),
            '^' => out.push((i, Tok::Caret)),
            '(' => out.push((i, Tok::Open)),
            ')' => out.push((i, Tok::Close)),
            '0'..='9' | '.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                // exponent only when followed by a digit, so "2e" stays an error
                if i + 1 < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if bytes[j] == b'+' || bytes[j] == b'-' {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text = &src[start..i];
                let x = text.parse::<f64>().map_err(|_| ParseError {
                    pos: start,
                    msg: format!("bad number {text:?}"),
                })?;
                out.push((start, Tok::Num(x)));
                continue;
            }
            c if c.is_ascii_alphabetic() => {
                while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                out.push((start, Tok::Ident(src[start..i].to_ascii_lowercase())));
                continue;
            }
            _ => {
                return Err(ParseError {
                    pos: i,
                    msg: format!("unexpected character {:?}", src[i..].chars().next().unwrap_or('?')),
                })
            }
        }
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(p, _)| *p)
    }

    fn fail<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok, what: &str) -> Result<(), ParseError> {
        if self.eat(t) {
            Ok(())
        } else {
            self.fail(format!("expected {what}"))
        }
    }

    fn sum(&mut self) -> Result<TrigSeries, ParseError> {
        let mut acc = self.product()?;
        loop {
            if self.eat(&Tok::Plus) {
                acc = acc.add(&self.product()?);
            } else if self.eat(&Tok::Minus) {
                acc = acc.add(&self.product()?.scaled(-1.0));
            } else {
                return Ok(acc);
            }
        }
    }

    fn product(&mut self) -> Result<TrigSeries, ParseError> {
        let mut acc = self.unary()?;
        loop {
            // explicit `*` or juxtaposition
            if self.eat(&Tok::Star) || matches!(self.peek(), Some(Tok::Num(_) | Tok::Ident(_) | Tok::Open)) {
                acc = acc.mul(&self.unary()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<TrigSeries, ParseError> {
        if self.eat(&Tok::Minus) {
            return Ok(self.unary()?.scaled(-1.0));
        }
        let base = self.atom()?;
        if !self.eat(&Tok::Caret) {
            return Ok(base);
        }
        let n = match self.peek() {
            Some(Tok::Num(x)) if x.fract() == 0.0 && *x >= 0.0 && *x <= MAX_POWER as f64 => *x as u32,
            _ => return self.fail(format!("exponent must be an integer in 0..={MAX_POWER}")),
        };
        self.at += 1;
        let mut out = TrigSeries::constant(1.0);
        for _ in 0..n {
            out = out.mul(&base);
        }
        Ok(out)
    }

    fn atom(&mut self) -> Result<TrigSeries, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Num(x)) => {
                self.at += 1;
                Ok(TrigSeries::constant(x))
            }
            Some(Tok::Open) => {
                self.at += 1;
                let inner = self.sum()?;
                self.expect(&Tok::Close, "')'")?;
                Ok(inner)
            }
            Some(Tok::Ident(name)) if name == "cos" || name == "sin" => {
                self.at += 1;
                self.expect(&Tok::Open, "'(' after function name")?;
                let (n, axis) = self.harmonic()?;
                self.expect(&Tok::Close, "')'")?;
                Ok(basis_term(name == "sin", n, axis))
            }
            Some(Tok::Ident(name)) => self.fail(format!("unknown name {name:?}; use cos(n*pj) or sin(n*pj)")),
            Some(_) => self.fail("expected a number, '(' or cos/sin"),
            None => self.fail("unexpected end of input"),
        }
    }

    fn harmonic(&mut self) -> Result<(i64, usize), ParseError> {
        let sign = if self.eat(&Tok::Minus) { -1 } else { 1 };
        let mut n = 1;
        if let Some(Tok::Num(x)) = self.peek() {
            if x.fract() != 0.0 || *x > 64.0 {
                return self.fail("harmonic index must be a small integer");
            }
            n = *x as i64;
            self.at += 1;
            self.eat(&Tok::Star);
        }
        let axis = match self.peek() {
            Some(Tok::Ident(v)) if v == "p1" => 0,
            Some(Tok::Ident(v)) if v == "p2" => 1,
            Some(Tok::Ident(v)) if v == "p3" => 2,
            _ => return self.fail("expected p1, p2 or p3"),
        };
        self.at += 1;
        Ok((sign * n, axis))
    }
}

/// `cos(n p)` or `sin(n p)` in the `b(n, ·)` basis, which stores `sin` under
/// negative indices.
fn basis_term(sine: bool, n: i64, axis: usize) -> TrigSeries {
    let (abs, sign) = (n.unsigned_abs(), n.signum());
    if abs == 0 {
        return TrigSeries::constant(if sine { 0.0 } else { 1.0 });
    }
    // clamp keeps the conversion total; VFunction rejects degrees above 4
    let idx = abs.min(i8::MAX as u64) as i8;
    if sine {
        TrigSeries::harmonic(axis, -idx).scaled(sign as f64)
    } else {
        TrigSeries::harmonic(axis, idx)
    }
}

/// Parses and expands an expression into a trigonometric series.
pub fn parse_series(src: &str) -> Result<TrigSeries, ParseError> {
    let toks = lex(src)?;
    if toks.is_empty() {
        return Err(ParseError {
            pos: 0,
            msg: "empty expression".into(),
        });
    }
    let mut p = Parser {
        toks,
        at: 0,
        end: src.len(),
    };
    let s = p.sum()?;
    if p.at != p.toks.len() {
        return p.fail("trailing input");
    }
    Ok(s)
}

/// Parses a coupling function; the degree limit of [`VFunction`] applies.
pub fn parse_v(src: &str) -> Result<VFunction, ParseError> {
    let s = parse_series(src)?;
    if s.terms().any(|(_, c)| !c.is_finite()) {
        return Err(ParseError {
            pos: 0,
            msg: "coefficients overflow".into(),
        });
    }
    VFunction::from_series(s).map_err(|e| ParseError {
        pos: 0,
        msg: e.to_string(),
    })
}
