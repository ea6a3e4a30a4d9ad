//! Tautological classes as rational combinations of decorated strata.
//!
//! A decorated stratum `(Γ, θ)` stands for the class
//! `ξ_{Γ*}(θ) / |Aut Γ|`, where `θ` is a monomial in ψ classes of the
//! flags and κ classes of the vertices and `Aut Γ` is the automorphism group
//! of the undecorated graph. With this normalization a stratum with trivial
//! decoration is the class of the closed stratum itself.
//!
//! No relations are imposed apart from dimension vanishing at each vertex:
//! two classes compare equal when their normalized expressions agree, which
//! is sufficient but not necessary for equality in the tautological ring.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::canon::{self, Colors};
use crate::error::{Ambient, Error, Result};
use crate::graph::{Point, StableGraph};

pub type Q = num_rational::BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub(crate) fn render_q(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Monomial `∏ κ_i^{e_i}`, stored as sorted `(i, e_i)` with `e_i > 0`.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct KappaMonomial(Vec<(u32, u32)>);

impl KappaMonomial {
    pub fn one() -> Self {
        KappaMonomial(Vec::new())
    }

    pub fn single(index: u32) -> Self {
        KappaMonomial(vec![(index, 1)])
    }

    pub fn from_factors(factors: &[(u32, u32)]) -> Self {
        let mut m = KappaMonomial::one();
        for &(i, e) in factors {
            for _ in 0..e {
                m.push(i);
            }
        }
        m
    }

    pub fn factors(&self) -> &[(u32, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    /// `κ_i` has degree `i`.
    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(i, e)| i * e).sum()
    }

    pub fn push(&mut self, index: u32) {
        match self.0.binary_search_by_key(&index, |&(i, _)| i) {
            Ok(pos) => self.0[pos].1 += 1,
            Err(pos) => self.0.insert(pos, (index, 1)),
        }
    }

    pub fn mul(&self, other: &KappaMonomial) -> KappaMonomial {
        let mut m = self.clone();
        for &(i, e) in &other.0 {
            for _ in 0..e {
                m.push(i);
            }
        }
        m
    }

    /// Each factor `κ_i` listed `e_i` times.
    pub fn expanded(&self) -> Vec<u32> {
        self.0
            .iter()
            .flat_map(|&(i, e)| std::iter::repeat_n(i, e as usize))
            .collect()
    }

    fn encode(&self) -> Vec<u32> {
        self.0.iter().flat_map(|&(i, e)| [i, e]).collect()
    }

    fn decode(v: &[u32]) -> Self {
        KappaMonomial(v.chunks(2).map(|c| (c[0], c[1])).collect())
    }
}

/// ψ and κ exponents on one stratum: per half-edge, per leg (in
/// `graph.legs()` order) and per vertex.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Decoration {
    pub psi_half: Vec<u32>,
    pub psi_leg: Vec<u32>,
    pub kappa: Vec<KappaMonomial>,
}

impl Decoration {
    pub fn trivial(g: &StableGraph) -> Self {
        Decoration {
            psi_half: vec![0; g.num_half_edges()],
            psi_leg: vec![0; g.num_legs()],
            kappa: vec![KappaMonomial::one(); g.num_vertices()],
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.psi_half.iter().all(|&e| e == 0)
            && self.psi_leg.iter().all(|&e| e == 0)
            && self.kappa.iter().all(|k| k.is_one())
    }

    pub fn degree_at(&self, g: &StableGraph, v: usize) -> u32 {
        let psi: u32 = g
            .half_edges_at(v)
            .iter()
            .map(|&h| self.psi_half[h])
            .sum::<u32>()
            + g.legs()
                .iter()
                .enumerate()
                .filter(|(_, l)| l.vertex == v)
                .map(|(i, _)| self.psi_leg[i])
                .sum::<u32>();
        psi + self.kappa[v].degree()
    }

    pub fn degree(&self) -> u32 {
        self.psi_half.iter().sum::<u32>()
            + self.psi_leg.iter().sum::<u32>()
            + self.kappa.iter().map(|k| k.degree()).sum::<u32>()
    }

    pub fn mul(&self, other: &Decoration) -> Decoration {
        Decoration {
            psi_half: self
                .psi_half
                .iter()
                .zip(&other.psi_half)
                .map(|(a, b)| a + b)
                .collect(),
            psi_leg: self
                .psi_leg
                .iter()
                .zip(&other.psi_leg)
                .map(|(a, b)| a + b)
                .collect(),
            kappa: self
                .kappa
                .iter()
                .zip(&other.kappa)
                .map(|(a, b)| a.mul(b))
                .collect(),
        }
    }

    fn colors(&self) -> Colors {
        Colors {
            vertex: self.kappa.iter().map(|k| k.encode()).collect(),
            half: self.psi_half.clone(),
            leg: self.psi_leg.clone(),
        }
    }
}

/// The monomial `θ_v` at a single vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexDecoration {
    pub psi: BTreeMap<Point, u32>,
    pub kappa: KappaMonomial,
}

impl VertexDecoration {
    pub fn degree(&self) -> u32 {
        self.psi.values().sum::<u32>() + self.kappa.degree()
    }
}

/// A stable graph with one ψ/κ monomial per vertex.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DecoratedStratum {
    pub graph: StableGraph,
    pub decoration: Decoration,
}

impl DecoratedStratum {
    pub fn new(graph: StableGraph, decoration: Decoration) -> Result<Self> {
        if decoration.psi_half.len() != graph.num_half_edges()
            || decoration.psi_leg.len() != graph.num_legs()
            || decoration.kappa.len() != graph.num_vertices()
        {
            return Err(Error::Input(
                "decoration does not match the graph".to_string(),
            ));
        }
        Ok(DecoratedStratum { graph, decoration })
    }

    pub fn fundamental(graph: StableGraph) -> Self {
        let decoration = Decoration::trivial(&graph);
        DecoratedStratum { graph, decoration }
    }

    pub fn ambient(&self) -> Ambient {
        self.graph.ambient()
    }

    /// `e(Γ) + deg θ`.
    pub fn codimension(&self) -> u32 {
        self.graph.num_edges() as u32 + self.decoration.degree()
    }

    /// True when some vertex monomial exceeds the vertex dimension.
    pub fn vanishes(&self) -> bool {
        (0..self.graph.num_vertices()).any(|v| {
            self.decoration.degree_at(&self.graph, v) as i64 > self.graph.vertex_dimension(v)
        })
    }

    pub fn vertex_decoration(&self, v: usize) -> VertexDecoration {
        let mut psi = BTreeMap::new();
        for p in self.graph.points(v) {
            let e = match p {
                Point::Leg(m) => self.decoration.psi_leg[self.graph.leg_index(m).expect("leg")],
                Point::HalfEdge(h) => self.decoration.psi_half[h],
            };
            if e > 0 {
                psi.insert(p, e);
            }
        }
        VertexDecoration {
            psi,
            kappa: self.decoration.kappa[v].clone(),
        }
    }

    /// Representative of the isomorphism class (decoration-aware).
    pub fn canonical(&self) -> DecoratedStratum {
        let c = canon::canonize(&self.graph, &self.decoration.colors());
        DecoratedStratum {
            decoration: Decoration {
                psi_half: c.colors.half,
                psi_leg: c.colors.leg,
                kappa: c
                    .colors
                    .vertex
                    .iter()
                    .map(|v| KappaMonomial::decode(v))
                    .collect(),
            },
            graph: c.graph,
        }
    }

    /// `|Aut Γ|` of the undecorated graph.
    pub fn graph_automorphisms(&self) -> u64 {
        canon::automorphism_count(&self.graph)
    }

    /// Product with the class `∏ψ_{leg}^{a} · κ` pulled back from the
    /// trivial graph: ψ of a leg moves to the vertex carrying it, each κ_i
    /// becomes the sum of κ_i over all vertices.
    pub fn times_monomial(&self, psi_legs: &[u32], kappa: &KappaMonomial) -> DecoPoly {
        let mut d = self.decoration.clone();
        for (i, &e) in psi_legs.iter().enumerate() {
            d.psi_leg[i] += e;
        }
        let mut poly = DecoPoly::from([(d, Q::one())]);
        for i in kappa.expanded() {
            let incs: Vec<(Q, Inc)> = (0..self.graph.num_vertices())
                .map(|u| (Q::one(), Inc::Kappa(u, i)))
                .collect();
            poly = multiply_linear(&poly, &incs);
        }
        poly
    }
}

impl fmt::Display for DecoratedStratum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} : ", self.graph)?;
        let mut parts = Vec::new();
        for (h, &e) in self.decoration.psi_half.iter().enumerate() {
            if e > 0 {
                parts.push(format!("psi[h{h}]^{e}"));
            }
        }
        for (i, &e) in self.decoration.psi_leg.iter().enumerate() {
            if e > 0 {
                parts.push(format!("psi[L{}]^{e}", self.graph.legs()[i].marking));
            }
        }
        for (v, k) in self.decoration.kappa.iter().enumerate() {
            for &(i, e) in k.factors() {
                parts.push(format!("kappa[{i}]^{e}@v{v}"));
            }
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join(" "))
        }
    }
}

/// Polynomial in decorations of one fixed graph.
pub(crate) type DecoPoly = BTreeMap<Decoration, Q>;

#[derive(Debug, Clone, Copy)]
pub(crate) enum Inc {
    PsiHalf(usize),
    Kappa(usize, u32),
}

/// `poly · Σ q_j · x_j` for single-variable increments `x_j`.
pub(crate) fn multiply_linear(poly: &DecoPoly, form: &[(Q, Inc)]) -> DecoPoly {
    let mut out = DecoPoly::new();
    for (d, c) in poly {
        for (qj, inc) in form {
            let mut nd = d.clone();
            match *inc {
                Inc::PsiHalf(h) => nd.psi_half[h] += 1,
                Inc::Kappa(u, i) => nd.kappa[u].push(i),
            }
            let entry = out.entry(nd).or_insert_with(Q::zero);
            *entry += c * qj;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// A normalized rational combination of decorated strata on `M̄_{g,n}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TautClass {
    ambient: Ambient,
    terms: BTreeMap<DecoratedStratum, Q>,
}

impl TautClass {
    pub fn zero(ambient: Ambient) -> Self {
        TautClass {
            ambient,
            terms: BTreeMap::new(),
        }
    }

    pub fn fundamental(ambient: Ambient) -> Self {
        Self::from_stratum(DecoratedStratum::fundamental(StableGraph::trivial(
            ambient.genus,
            ambient.n,
        )))
    }

    pub fn from_stratum(s: DecoratedStratum) -> Self {
        let ambient = s.ambient();
        let mut t = Self::zero(ambient);
        t.add_term(Q::one(), s);
        t
    }

    /// Class of the closed boundary stratum of `graph`.
    pub fn boundary(graph: &StableGraph) -> Result<Self> {
        graph.genus()?;
        Ok(Self::from_stratum(DecoratedStratum::fundamental(
            graph.clone(),
        )))
    }

    pub fn psi(ambient: Ambient, marking: u32) -> Result<Self> {
        if marking == 0 || marking > ambient.n {
            return Err(Error::UnknownMarking(marking));
        }
        let g = StableGraph::trivial(ambient.genus, ambient.n);
        let mut d = Decoration::trivial(&g);
        d.psi_leg[marking as usize - 1] = 1;
        Ok(Self::from_stratum(DecoratedStratum::new(g, d)?))
    }

    pub fn kappa(ambient: Ambient, index: u32) -> Self {
        let g = StableGraph::trivial(ambient.genus, ambient.n);
        let mut d = Decoration::trivial(&g);
        d.kappa[0] = KappaMonomial::single(index);
        Self::from_stratum(DecoratedStratum {
            graph: g,
            decoration: d,
        })
    }

    /// Merges isomorphic terms, drops zero and dimension-vanishing terms.
    pub fn normalize<I>(ambient: Ambient, raw: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Q, DecoratedStratum)>,
    {
        let mut t = Self::zero(ambient);
        for (c, s) in raw {
            let found = s.ambient();
            if found != ambient {
                return Err(Error::AmbientMismatch {
                    expected: ambient,
                    found,
                });
            }
            t.add_term(c, s);
        }
        Ok(t)
    }

    /// Adds `c · s` without an ambient check.
    pub(crate) fn add_term(&mut self, c: Q, s: DecoratedStratum) {
        if c.is_zero() || s.vanishes() {
            return;
        }
        let key = s.canonical();
        let entry = self.terms.entry(key).or_insert_with(Q::zero);
        *entry += c;
        if entry.is_zero() {
            let key = s.canonical();
            self.terms.remove(&key);
        }
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn terms(&self) -> &BTreeMap<DecoratedStratum, Q> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, s: &DecoratedStratum) -> Q {
        self.terms
            .get(&s.canonical())
            .cloned()
            .unwrap_or_else(Q::zero)
    }

    fn check(&self, other: &TautClass) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(Error::AmbientMismatch {
                expected: self.ambient,
                found: other.ambient,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &TautClass) -> Result<TautClass> {
        self.check(other)?;
        let mut t = self.clone();
        for (s, c) in &other.terms {
            t.add_term(c.clone(), s.clone());
        }
        Ok(t)
    }

    pub fn sub(&self, other: &TautClass) -> Result<TautClass> {
        self.add(&other.scale(&-Q::one()))
    }

    pub fn scale(&self, x: &Q) -> TautClass {
        if x.is_zero() {
            return TautClass::zero(self.ambient);
        }
        TautClass {
            ambient: self.ambient,
            terms: self.terms.iter().map(|(s, c)| (s.clone(), c * x)).collect(),
        }
    }

    /// Intersection product.
    pub fn mul(&self, other: &TautClass) -> Result<TautClass> {
        self.check(other)?;
        let mut out = TautClass::zero(self.ambient);
        for (s1, c1) in &self.terms {
            for (s2, c2) in &other.terms {
                let p = if s2.graph.num_edges() > s1.graph.num_edges() {
                    crate::boundary::stratum_product(s2, s1)
                } else {
                    crate::boundary::stratum_product(s1, s2)
                };
                let coef = c1 * c2;
                for (s, c) in p.terms {
                    out.add_term(c * &coef, s);
                }
            }
        }
        Ok(out)
    }

    /// Codimensions occurring in the class.
    pub fn codimensions(&self) -> Vec<u32> {
        let mut c: Vec<u32> = self.terms.keys().map(|s| s.codimension()).collect();
        c.sort_unstable();
        c.dedup();
        c
    }

    pub fn has_negative_coefficient(&self) -> bool {
        self.terms.values().any(|c| c.is_negative())
    }

    pub fn render(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for TautClass {
    /// One term per line, `p/q <graph> : <decorations>`, in canonical order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let lines: Vec<String> = self
            .terms
            .iter()
            .map(|(s, c)| format!("{} {}", render_q(c), s))
            .collect();
        write!(f, "{}", lines.join("\n"))
    }
}
