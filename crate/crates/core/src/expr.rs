//! Class expressions over an ambient `M̄_{g,n}`.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | atom
//! atom    := integer | '(' expr ')' | psi(j) | kappa(i) | bd(graph)
//!          | pullback(graph, expr) | pushforward_forget(expr)
//! graph   := alias | inline graph JSON | path to a graph JSON file
//! ```
//!
//! Aliases: `trivial`, `delta0` (also `delta_irr`, `irr`), `c0` (genus
//! `g-2` with two self-edges), `delta<i>` (genus `i` without legs joined to
//! genus `g-i` with all legs), and `e11x11` (two genus-1 vertices carrying
//! legs 1-11 and 12-22, one edge). Inside `pushforward_forget` the ambient is
//! `M̄_{g,n+1}`.

use std::fmt;

use num_traits::{One, Zero};

use crate::boundary::{forgetful_pushforward, xi_pullback, FactorwiseClass};
use crate::error::{Ambient, Error, Result};
use crate::graph::StableGraph;
use crate::json;
use crate::strata::{TautClass, Q};
use crate::structures::{irreducible_divisor, separating_divisor};

#[derive(Debug, Clone, PartialEq)]
pub struct GraphRef {
    pub text: String,
    pub pos: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Number(Q),
    Psi(u32),
    Kappa(u32),
    Boundary(GraphRef),
    Pullback(GraphRef, Box<Expr>),
    PushforwardForget(Box<Expr>),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub pos: usize,
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, pos: usize, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos,
            msg: msg.into(),
        })
    }

    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.text.len() - trimmed.len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    fn expect(&mut self, c: char) -> Result<()> {
        match self.peek() {
            Some(x) if x == c => {
                self.pos += c.len_utf8();
                Ok(())
            }
            Some(x) => self.err(self.pos, format!("expected '{c}', found '{x}'")),
            None => self.err(self.pos, format!("expected '{c}', found end of input")),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let pos = self.pos;
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    lhs = Expr {
                        kind: ExprKind::Add(Box::new(lhs), Box::new(rhs)),
                        pos,
                    };
                }
                Some('-') => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    lhs = Expr {
                        kind: ExprKind::Sub(Box::new(lhs), Box::new(rhs)),
                        pos,
                    };
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let pos = self.pos;
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    lhs = Expr {
                        kind: ExprKind::Mul(Box::new(lhs), Box::new(rhs)),
                        pos,
                    };
                }
                Some('/') => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    lhs = Expr {
                        kind: ExprKind::Div(Box::new(lhs), Box::new(rhs)),
                        pos,
                    };
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek() == Some('-') {
            let pos = self.pos;
            self.pos += 1;
            let inner = self.unary()?;
            return Ok(Expr {
                kind: ExprKind::Neg(Box::new(inner)),
                pos,
            });
        }
        self.atom()
    }

    fn integer(&mut self) -> Result<(num_bigint::BigInt, usize)> {
        self.skip_ws();
        let start = self.pos;
        let len = self
            .rest()
            .chars()
            .take_while(|c| c.is_ascii_digit())
            .count();
        if len == 0 {
            return self.err(start, "expected an integer");
        }
        self.pos += len;
        Ok((self.text[start..self.pos].parse().expect("digits"), start))
    }

    fn small_integer(&mut self) -> Result<u32> {
        let (n, pos) = self.integer()?;
        u32::try_from(n).or_else(|_| self.err(pos, "integer too large"))
    }

    fn ident(&mut self) -> String {
        self.skip_ws();
        let len = self
            .rest()
            .chars()
            .take_while(|c| c.is_ascii_alphanumeric() || *c == '_')
            .count();
        let s = self.rest()[..len].to_string();
        self.pos += len;
        s
    }

    /// Raw text up to a top-level `,` or `)`.
    fn graph_ref(&mut self) -> Result<GraphRef> {
        self.skip_ws();
        let start = self.pos;
        let mut depth = 0i32;
        let mut in_string = false;
        for (i, c) in self.rest().char_indices() {
            if in_string {
                if c == '"' {
                    in_string = false;
                }
                continue;
            }
            match c {
                '"' => in_string = true,
                '{' | '[' | '(' => depth += 1,
                '}' | ']' => depth -= 1,
                ')' if depth == 0 => {
                    return self.finish_ref(start, i);
                }
                ')' => depth -= 1,
                ',' if depth == 0 => return self.finish_ref(start, i),
                _ => {}
            }
        }
        self.err(start, "unterminated graph argument")
    }

    fn finish_ref(&mut self, start: usize, len: usize) -> Result<GraphRef> {
        let text = self.text[start..start + len].trim().to_string();
        if text.is_empty() {
            return self.err(start, "missing graph argument");
        }
        self.pos = start + len;
        Ok(GraphRef { text, pos: start })
    }

    fn atom(&mut self) -> Result<Expr> {
        let pos = {
            self.skip_ws();
            self.pos
        };
        match self.peek() {
            None => self.err(pos, "unexpected end of input"),
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let (n, _) = self.integer()?;
                Ok(Expr {
                    kind: ExprKind::Number(Q::from_integer(n)),
                    pos,
                })
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let name = self.ident();
                self.expect('(')?;
                let kind = match name.as_str() {
                    "psi" => ExprKind::Psi(self.small_integer()?),
                    "kappa" => ExprKind::Kappa(self.small_integer()?),
                    "bd" => ExprKind::Boundary(self.graph_ref()?),
                    "pullback" => {
                        let g = self.graph_ref()?;
                        self.expect(',')?;
                        ExprKind::Pullback(g, Box::new(self.expr()?))
                    }
                    "pushforward_forget" => ExprKind::PushforwardForget(Box::new(self.expr()?)),
                    other => return self.err(pos, format!("unknown function '{other}'")),
                };
                self.expect(')')?;
                Ok(Expr { kind, pos })
            }
            Some(c) => self.err(pos, format!("unexpected character '{c}'")),
        }
    }
}

pub fn parse(text: &str) -> Result<Expr> {
    let mut p = Parser { text, pos: 0 };
    let e = p.expr()?;
    if let Some(c) = p.peek() {
        return p.err(p.pos, format!("unexpected '{c}' after expression"));
    }
    Ok(e)
}

/// Resolves an alias, inline JSON or file path to a graph over `ambient`.
pub fn resolve_graph(r: &GraphRef, ambient: Ambient) -> Result<StableGraph> {
    let (g, n) = (ambient.genus, ambient.n);
    let need = |ok: bool, what: &str| -> Result<()> {
        if ok {
            Ok(())
        } else {
            Err(Error::Input(format!(
                "alias '{}' is undefined on M_{ambient}: {what}",
                r.text
            )))
        }
    };
    let graph = match r.text.as_str() {
        "trivial" => StableGraph::trivial(g, n),
        "delta0" | "delta_irr" | "irr" => {
            need(g >= 1, "needs genus at least 1")?;
            irreducible_divisor(g, n)
        }
        "c0" => {
            need(g >= 2, "needs genus at least 2")?;
            let legs: Vec<(u32, usize)> = (1..=n).map(|m| (m, 0)).collect();
            StableGraph::from_edges(vec![g - 2], &[(0, 0), (0, 0)], &legs)
        }
        "e11x11" => {
            let legs: Vec<(u32, usize)> = (1..=22).map(|m| (m, usize::from(m > 11))).collect();
            StableGraph::from_edges(vec![1, 1], &[(0, 1)], &legs)
        }
        t if t.starts_with("delta")
            && t[5..].chars().all(|c| c.is_ascii_digit())
            && t.len() > 5 =>
        {
            let i: u32 = t[5..].parse().map_err(|_| Error::Parse {
                pos: r.pos,
                msg: "bad alias index".to_string(),
            })?;
            need(
                i >= 1 && i <= g && (n > 0 || i < g),
                "needs 1 <= i <= g with both sides stable",
            )?;
            separating_divisor(g, n, i, &[])
        }
        t if t.starts_with('{') => json::parse_graph(t).map_err(|e| shift(e, r.pos))?,
        path => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Input(format!("cannot read graph file '{path}': {e}")))?;
            json::parse_graph(&text)?
        }
    };
    let report = graph.validate();
    if !report.is_valid() {
        return Err(Error::InvalidGraph(report.to_string()));
    }
    if graph.ambient() != ambient {
        return Err(Error::AmbientMismatch {
            expected: ambient,
            found: graph.ambient(),
        });
    }
    Ok(graph)
}

fn shift(e: Error, by: usize) -> Error {
    match e {
        Error::Parse { pos, msg } => Error::Parse { pos: pos + by, msg },
        other => other,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Scalar(Q),
    Class(TautClass),
    Factorwise(FactorwiseClass),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Scalar(q) => write!(f, "{}/{}", q.numer(), q.denom()),
            Value::Class(t) => write!(f, "{t}"),
            Value::Factorwise(x) => write!(f, "{x}"),
        }
    }
}

impl Value {
    /// Scalars become multiples of the fundamental class.
    pub fn into_class(self, ambient: Ambient) -> Result<TautClass> {
        match self {
            Value::Scalar(q) => Ok(TautClass::fundamental(ambient).scale(&q)),
            Value::Class(t) => Ok(t),
            Value::Factorwise(_) => Err(Error::Input(
                "expected a class on the ambient space, found a factorwise class".to_string(),
            )),
        }
    }
}

fn combine(a: Value, b: Value, ambient: Ambient, sum: bool) -> Result<Value> {
    use Value::*;
    Ok(match (a, b) {
        (Scalar(x), Scalar(y)) => Scalar(if sum { x + y } else { x * y }),
        (Scalar(x), Class(t)) | (Class(t), Scalar(x)) => {
            if sum {
                Class(t.add(&TautClass::fundamental(ambient).scale(&x))?)
            } else {
                Class(t.scale(&x))
            }
        }
        (Class(s), Class(t)) => Class(if sum { s.add(&t)? } else { s.mul(&t)? }),
        (Scalar(x), Factorwise(f)) | (Factorwise(f), Scalar(x)) => {
            if sum {
                let unit = FactorwiseClass::unit(f.base()).scale(&x);
                Factorwise(f.add(&unit)?)
            } else {
                Factorwise(f.scale(&x))
            }
        }
        (Factorwise(f), Factorwise(g)) => Factorwise(if sum { f.add(&g)? } else { f.mul(&g)? }),
        _ => {
            return Err(Error::Input(
                "cannot combine a class on the ambient space with a factorwise class".to_string(),
            ))
        }
    })
}

fn negate(v: Value) -> Value {
    match v {
        Value::Scalar(q) => Value::Scalar(-q),
        Value::Class(t) => Value::Class(t.scale(&-Q::one())),
        Value::Factorwise(f) => Value::Factorwise(f.scale(&-Q::one())),
    }
}

pub fn eval(e: &Expr, ambient: Ambient) -> Result<Value> {
    if !ambient.is_stable() {
        return Err(Error::Unstable(ambient));
    }
    Ok(match &e.kind {
        ExprKind::Number(q) => Value::Scalar(q.clone()),
        ExprKind::Psi(j) => Value::Class(TautClass::psi(ambient, *j)?),
        ExprKind::Kappa(i) => Value::Class(TautClass::kappa(ambient, *i)),
        ExprKind::Boundary(r) => Value::Class(TautClass::boundary(&resolve_graph(r, ambient)?)?),
        ExprKind::Pullback(r, inner) => {
            let g = resolve_graph(r, ambient)?;
            let t = eval(inner, ambient)?.into_class(ambient)?;
            Value::Factorwise(xi_pullback(&g, &t)?)
        }
        ExprKind::PushforwardForget(inner) => {
            let up = Ambient::new(ambient.genus, ambient.n + 1);
            let t = eval(inner, up)?.into_class(up)?;
            Value::Class(forgetful_pushforward(&t)?)
        }
        ExprKind::Neg(inner) => negate(eval(inner, ambient)?),
        ExprKind::Add(a, b) => combine(eval(a, ambient)?, eval(b, ambient)?, ambient, true)?,
        ExprKind::Sub(a, b) => {
            combine(eval(a, ambient)?, negate(eval(b, ambient)?), ambient, true)?
        }
        ExprKind::Mul(a, b) => combine(eval(a, ambient)?, eval(b, ambient)?, ambient, false)?,
        ExprKind::Div(a, b) => {
            let lhs = eval(a, ambient)?;
            match eval(b, ambient)? {
                Value::Scalar(q) if !q.is_zero() => {
                    combine(lhs, Value::Scalar(q.recip()), ambient, false)?
                }
                Value::Scalar(_) => {
                    return Err(Error::Parse {
                        pos: b.pos,
                        msg: "division by zero".to_string(),
                    })
                }
                _ => {
                    return Err(Error::Parse {
                        pos: b.pos,
                        msg: "only division by a rational number is supported".to_string(),
                    })
                }
            }
        }
    })
}

/// Parses and evaluates in one step.
pub fn evaluate(text: &str, ambient: Ambient) -> Result<Value> {
    eval(&parse(text)?, ambient)
}
