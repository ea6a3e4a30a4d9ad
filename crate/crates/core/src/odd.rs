//! Formal odd cohomology of `M̄_{1,12}` and of its square.
//!
//! The odd part is taken to be four families of eleven classes each:
//! `a_i`, `b_i` in bidegrees (11,0), (0,11), and `c_i`, `d_i` in (12,1),
//! (1,12). Elements of the second factor of a product carry a tilde.
//! ψ classes are even and act by `Ψ(a_i) = c_i`, `Ψ(b_i) = d_i`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::strata::{q, Q};

pub const RANK: u8 = 11;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::A, Family::B, Family::C, Family::D];

    pub fn bidegree(self) -> (u32, u32) {
        match self {
            Family::A => (11, 0),
            Family::B => (0, 11),
            Family::C => (12, 1),
            Family::D => (1, 12),
        }
    }

    pub fn degree(self) -> u32 {
        let (p, q) = self.bidegree();
        p + q
    }

    fn letter(self) -> char {
        match self {
            Family::A => 'a',
            Family::B => 'b',
            Family::C => 'c',
            Family::D => 'd',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Side {
    First,
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct OddBasisElement {
    pub family: Family,
    pub index: u8,
    pub side: Side,
}

impl OddBasisElement {
    pub fn new(family: Family, index: u8, side: Side) -> Result<Self> {
        if index == 0 || index > RANK {
            return Err(Error::Input(format!(
                "odd basis index {index} outside 1..={RANK}"
            )));
        }
        Ok(OddBasisElement {
            family,
            index,
            side,
        })
    }

    fn raw(family: Family, index: u8, side: Side) -> Self {
        OddBasisElement {
            family,
            index,
            side,
        }
    }

    pub fn bidegree(&self) -> (u32, u32) {
        self.family.bidegree()
    }

    pub fn with_side(self, side: Side) -> Self {
        OddBasisElement { side, ..self }
    }
}

impl fmt::Display for OddBasisElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tilde = if self.side == Side::Second { "~" } else { "" };
        write!(f, "{}{}_{}", self.family.letter(), tilde, self.index)
    }
}

/// `∫ x ∪ y` on one factor. The dual pairs are `(a_i, d_i)` and
/// `(c_i, b_i)`; the reversed orders pick up the sign `(-1)^{11·13}`.
pub fn pairing(x: OddBasisElement, y: OddBasisElement) -> Result<Q> {
    if x.side != y.side {
        return Err(Error::Input("pairing across tensor factors".to_string()));
    }
    if x.index != y.index {
        return Ok(Q::zero());
    }
    Ok(match (x.family, y.family) {
        (Family::A, Family::D) | (Family::C, Family::B) => Q::one(),
        (Family::D, Family::A) | (Family::B, Family::C) => -Q::one(),
        _ => Q::zero(),
    })
}

/// The action of ψ at the marking: raises bidegree by (1,1).
pub fn psi_action(x: OddBasisElement) -> Option<OddBasisElement> {
    match x.family {
        Family::A => Some(OddBasisElement {
            family: Family::C,
            ..x
        }),
        Family::B => Some(OddBasisElement {
            family: Family::D,
            ..x
        }),
        Family::C | Family::D => None,
    }
}

/// A rational combination of ordered pairs `x ⊗ ỹ`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OddTensor {
    terms: BTreeMap<(OddBasisElement, OddBasisElement), Q>,
}

impl OddTensor {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn add_term(&mut self, c: Q, x: OddBasisElement, y: OddBasisElement) {
        let key = (x.with_side(Side::First), y.with_side(Side::Second));
        let entry = self.terms.entry(key).or_insert_with(Q::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn terms(&self) -> &BTreeMap<(OddBasisElement, OddBasisElement), Q> {
        &self.terms
    }

    pub fn coefficient(&self, x: OddBasisElement, y: OddBasisElement) -> Q {
        self.terms
            .get(&(x.with_side(Side::First), y.with_side(Side::Second)))
            .cloned()
            .unwrap_or_else(Q::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &OddTensor) -> OddTensor {
        let mut out = self.clone();
        for ((x, y), c) in &other.terms {
            out.add_term(c.clone(), *x, *y);
        }
        out
    }

    /// `(Ψ ⊗ 1)` applied to every term.
    pub fn psi_first(&self) -> OddTensor {
        let mut out = OddTensor::zero();
        for ((x, y), c) in &self.terms {
            if let Some(px) = psi_action(*x) {
                out.add_term(c.clone(), px, *y);
            }
        }
        out
    }

    /// `(1 ⊗ Ψ̃)` applied to every term; ψ is even so no sign appears.
    pub fn psi_second(&self) -> OddTensor {
        let mut out = OddTensor::zero();
        for ((x, y), c) in &self.terms {
            if let Some(py) = psi_action(*y) {
                out.add_term(c.clone(), *x, py);
            }
        }
        out
    }

    pub fn scale(&self, s: &Q) -> OddTensor {
        let mut out = OddTensor::zero();
        for ((x, y), c) in &self.terms {
            out.add_term(c * s, *x, *y);
        }
        out
    }

    /// `Σ c · ∫(ỹ ∪ z̃) · x` over the terms `c · x ⊗ ỹ`.
    pub fn contract_second(&self, z: OddBasisElement) -> BTreeMap<OddBasisElement, Q> {
        let z = z.with_side(Side::Second);
        let mut out: BTreeMap<OddBasisElement, Q> = BTreeMap::new();
        for ((x, y), c) in &self.terms {
            let p = pairing(*y, z).expect("same side");
            if !p.is_zero() {
                *out.entry(*x).or_insert_with(Q::zero) += c * p;
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }
}

fn render_coefficient(c: &Q) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for OddTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let lines: Vec<String> = self
            .terms
            .iter()
            .map(|((x, y), c)| {
                let sign = if c.is_negative() { "" } else { "+" };
                format!("{sign}{} {x} ⊗ {y}", render_coefficient(c))
            })
            .collect();
        write!(f, "{}", lines.join("\n"))
    }
}

/// Odd⊗odd part of the class of the diagonal:
/// `Σ −a_i⊗d̃_i + b_i⊗c̃_i − c_i⊗b̃_i + d_i⊗ã_i`.
pub fn diagonal_odd_part() -> OddTensor {
    use Family::*;
    let mut t = OddTensor::zero();
    for i in 1..=RANK {
        let e = |f| OddBasisElement::raw(f, i, Side::First);
        t.add_term(q(-1), e(A), e(D));
        t.add_term(q(1), e(B), e(C));
        t.add_term(q(-1), e(C), e(B));
        t.add_term(q(1), e(D), e(A));
    }
    t
}

/// `[Δ] ∪ (−ψ_p − ψ_p̃)` on the odd part.
pub fn self_intersection_odd() -> OddTensor {
    let d = diagonal_odd_part();
    d.psi_first().add(&d.psi_second()).scale(&q(-1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Nontautological,
    NoObstruction,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Nontautological => write!(f, "nontautological"),
            Verdict::NoObstruction => write!(f, "no obstruction detected"),
        }
    }
}

/// A nonzero odd⊗odd Künneth component rules out a tautological Künneth
/// decomposition, since tautological classes of `M̄_{1,12}` are even.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OddReport {
    pub verdict: Verdict,
    pub witness: Option<(Q, OddBasisElement, OddBasisElement)>,
    pub tensor: OddTensor,
}

pub fn nontautological_report(t: &OddTensor) -> OddReport {
    let witness = t
        .terms()
        .iter()
        .next()
        .map(|((x, y), c)| (c.clone(), *x, *y));
    OddReport {
        verdict: if witness.is_some() {
            Verdict::Nontautological
        } else {
            Verdict::NoObstruction
        },
        witness,
        tensor: t.clone(),
    }
}

impl fmt::Display for OddReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "odd⊗odd terms: {}", self.tensor.len())?;
        writeln!(f, "{}", self.tensor)?;
        if let Some((c, x, y)) = &self.witness {
            writeln!(f, "witness: {} {x} ⊗ {y}", render_coefficient(c))?;
        }
        write!(f, "verdict: {}", self.verdict)
    }
}
