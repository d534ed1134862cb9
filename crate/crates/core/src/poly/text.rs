//! Text form of polynomials.
//!
//! Input grammar (whitespace ignored):
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ('^' (integer | atom))*
//! atom   := rational | identifier | 'd/d' identifier | '(' expr ')'
//! ```
//!
//! `^` followed by an integer is a power; between two multivector factors it is
//! the wedge product. Basis atoms (`d/dx12`) are only meaningful to the
//! multivector reader. Output never contains parentheses or powers of sums.

use std::fmt::Write as _;
use std::sync::Arc;

use super::{Monomial, PolyError, Polynomial, VarTable};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Basis(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>, PolyError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let ident_len = |from: usize| {
        let mut j = from;
        while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
            j += 1;
        }
        j
    };
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => out.push((Tok::Plus, start)),
            b'-' => out.push((Tok::Minus, start)),
            b'*' => out.push((Tok::Star, start)),
            b'^' => out.push((Tok::Caret, start)),
            b'(' => out.push((Tok::LParen, start)),
            b')' => out.push((Tok::RParen, start)),
            b'0'..=b'9' => {
                let mut j = i;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                if j + 1 < bytes.len() && bytes[j] == b'/' && bytes[j + 1].is_ascii_digit() {
                    j += 1;
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                }
                let lit = &src[i..j];
                let r: Rational = lit.parse().map_err(|_| PolyError::Syntax {
                    pos: start,
                    msg: format!("bad number `{lit}`"),
                })?;
                out.push((Tok::Num(r), start));
                i = j;
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let j = ident_len(i);
                let word = &src[i..j];
                if word == "d" && src[j..].starts_with("/d") {
                    let k = ident_len(j + 2);
                    if k == j + 2 {
                        return Err(PolyError::Syntax {
                            pos: j,
                            msg: "expected coordinate name after `d/d`".into(),
                        });
                    }
                    out.push((Tok::Basis(src[j + 2..k].to_string()), start));
                    i = k;
                } else {
                    out.push((Tok::Ident(word.to_string()), start));
                    i = j;
                }
                continue;
            }
            other => {
                return Err(PolyError::Syntax {
                    pos: start,
                    msg: format!("unexpected character `{}`", other as char),
                })
            }
        }
        i += 1;
    }
    Ok(out)
}

/// Parsed expression tree, evaluated by the polynomial and multivector readers.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Expr {
    Num(Rational),
    Var(String, usize),
    Basis(String, usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Wedge(Box<Expr>, Box<Expr>),
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |&(_, p)| p)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, PolyError> {
        Err(PolyError::Syntax {
            pos: self.here(),
            msg: msg.into(),
        })
    }

    fn expr(&mut self) -> Result<Expr, PolyError> {
        let mut lhs = match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                Expr::Neg(Box::new(self.term()?))
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, PolyError> {
        let mut lhs = self.factor()?;
        while let Some(Tok::Star) = self.peek() {
            self.pos += 1;
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr, PolyError> {
        let mut base = self.atom()?;
        while let Some(Tok::Caret) = self.peek() {
            self.pos += 1;
            match self.peek() {
                Some(Tok::Num(r)) => {
                    let r = r.clone();
                    if !r.is_integer() || r.is_negative() {
                        return self.err("exponent must be a non-negative integer");
                    }
                    let e: u32 = r.to_string().parse().or_else(|_| self.err("exponent too large"))?;
                    self.pos += 1;
                    base = Expr::Pow(Box::new(base), e);
                }
                _ => base = Expr::Wedge(Box::new(base), Box::new(self.atom()?)),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, PolyError> {
        let pos = self.here();
        match self.toks.get(self.pos).map(|(t, _)| t.clone()) {
            Some(Tok::Num(r)) => {
                self.pos += 1;
                Ok(Expr::Num(r))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                Ok(Expr::Var(name, pos))
            }
            Some(Tok::Basis(name)) => {
                self.pos += 1;
                Ok(Expr::Basis(name, pos))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                match self.peek() {
                    Some(Tok::RParen) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    _ => self.err("expected `)`"),
                }
            }
            Some(Tok::Minus) => {
                // allows `2*-x` and `(-x)^2`-style input
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.factor()?)))
            }
            Some(t) => self.err(format!("unexpected token {t:?}")),
            None => self.err("unexpected end of input"),
        }
    }
}

pub(crate) fn parse_expr(src: &str) -> Result<Expr, PolyError> {
    let toks = tokenize(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: src.len(),
    };
    if p.peek().is_none() {
        return p.err("empty expression");
    }
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

fn eval_poly(e: &Expr, vars: &Arc<VarTable>) -> Result<Polynomial, PolyError> {
    Ok(match e {
        Expr::Num(r) => Polynomial::constant(vars, r.clone()),
        Expr::Var(name, pos) => match vars.lookup(name) {
            Some(v) => Polynomial::var(vars, v),
            None => {
                return Err(PolyError::UnknownVariableAt {
                    name: name.clone(),
                    pos: *pos,
                })
            }
        },
        Expr::Basis(_, pos) => {
            return Err(PolyError::Syntax {
                pos: *pos,
                msg: "basis vector in a scalar polynomial".into(),
            })
        }
        Expr::Wedge(a, _) => {
            return Err(PolyError::Syntax {
                pos: first_pos(a),
                msg: "wedge product in a scalar polynomial".into(),
            })
        }
        Expr::Neg(a) => -eval_poly(a, vars)?,
        Expr::Add(a, b) => eval_poly(a, vars)? + eval_poly(b, vars)?,
        Expr::Sub(a, b) => eval_poly(a, vars)? - eval_poly(b, vars)?,
        Expr::Mul(a, b) => eval_poly(a, vars)? * eval_poly(b, vars)?,
        Expr::Pow(a, k) => eval_poly(a, vars)?.pow(*k),
    })
}

pub(crate) fn first_pos(e: &Expr) -> usize {
    match e {
        Expr::Var(_, p) | Expr::Basis(_, p) => *p,
        Expr::Num(_) => 0,
        Expr::Neg(a) | Expr::Pow(a, _) => first_pos(a),
        Expr::Add(a, _) | Expr::Sub(a, _) | Expr::Mul(a, _) | Expr::Wedge(a, _) => first_pos(a),
    }
}

/// Parses polynomial text over `vars`.
pub fn parse_polynomial(src: &str, vars: &Arc<VarTable>) -> Result<Polynomial, PolyError> {
    eval_poly(&parse_expr(src)?, vars)
}

fn format_monomial(m: &Monomial, vars: &VarTable) -> String {
    let mut s = String::new();
    for (i, (v, e)) in m.powers().enumerate() {
        if i > 0 {
            s.push('*');
        }
        s.push_str(vars.name(v));
        if e > 1 {
            let _ = write!(s, "^{e}");
        }
    }
    s
}

/// Canonical text: terms in grlex order, ` + `/` - ` separators, unit
/// coefficients omitted.
pub fn format_polynomial(p: &Polynomial) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut s = String::new();
    for (i, (m, c)) in p.terms().iter().enumerate() {
        let neg = c.is_negative();
        match (i, neg) {
            (0, true) => s.push('-'),
            (0, false) => {}
            (_, true) => s.push_str(" - "),
            (_, false) => s.push_str(" + "),
        }
        let a = c.abs();
        if m.is_one() {
            let _ = write!(s, "{a}");
        } else {
            if !a.is_one() {
                let _ = write!(s, "{a}*");
            }
            s.push_str(&format_monomial(m, p.vars()));
        }
    }
    s
}
