//! Gluing pushforwards and pullbacks, the intersection product, and
//! pushforward along the map forgetting a marking.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::canon;
use crate::error::{Ambient, Error, Result};
use crate::glue::glue;
use crate::graph::{Point, StableGraph};
use crate::strata::{
    multiply_linear, render_q, DecoPoly, DecoratedStratum, Decoration, Inc, KappaMonomial,
    TautClass, Q,
};
use crate::structures::for_each_candidate;

/// A sum of pure tensors over the vertices of a base graph `A`.
///
/// The factor at vertex `v` lives on `M̄_{g(v),n(v)}` whose markings
/// `1..=n(v)` are the points of `v` in [`StableGraph::points`] order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorwiseClass {
    base: StableGraph,
    terms: BTreeMap<Vec<DecoratedStratum>, Q>,
}

impl FactorwiseClass {
    pub fn zero(base: &StableGraph) -> Self {
        FactorwiseClass {
            base: base.clone(),
            terms: BTreeMap::new(),
        }
    }

    /// The fundamental class of `M̄_A`.
    pub fn unit(base: &StableGraph) -> Self {
        let mut f = Self::zero(base);
        let factors = (0..base.num_vertices())
            .map(|v| {
                DecoratedStratum::fundamental(StableGraph::trivial(
                    base.vertex_genus(v),
                    base.valence(v) as u32,
                ))
            })
            .collect();
        f.add_term(Q::one(), factors);
        f
    }

    pub fn base(&self) -> &StableGraph {
        &self.base
    }

    pub fn factor_ambient(&self, v: usize) -> Ambient {
        Ambient::new(self.base.vertex_genus(v), self.base.valence(v) as u32)
    }

    pub fn terms(&self) -> &BTreeMap<Vec<DecoratedStratum>, Q> {
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

    /// Adds `c · ⊗ factors`; checks factor ambients.
    pub fn add_pure(&mut self, c: Q, factors: Vec<DecoratedStratum>) -> Result<()> {
        if factors.len() != self.base.num_vertices() {
            return Err(Error::Input("one factor per vertex expected".to_string()));
        }
        for (v, f) in factors.iter().enumerate() {
            if f.ambient() != self.factor_ambient(v) {
                return Err(Error::AmbientMismatch {
                    expected: self.factor_ambient(v),
                    found: f.ambient(),
                });
            }
        }
        self.add_term(c, factors);
        Ok(())
    }

    pub(crate) fn add_term(&mut self, c: Q, factors: Vec<DecoratedStratum>) {
        if c.is_zero() || factors.iter().any(|f| f.vanishes()) {
            return;
        }
        let key: Vec<DecoratedStratum> = factors.iter().map(|f| f.canonical()).collect();
        let entry = self.terms.entry(key.clone()).or_insert_with(Q::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    fn check(&self, other: &FactorwiseClass) -> Result<()> {
        if self.base != other.base {
            return Err(Error::GraphMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &FactorwiseClass) -> Result<FactorwiseClass> {
        self.check(other)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(c.clone(), k.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, x: &Q) -> FactorwiseClass {
        let mut out = Self::zero(&self.base);
        for (k, c) in &self.terms {
            out.add_term(c * x, k.clone());
        }
        out
    }

    /// Factorwise product.
    pub fn mul(&self, other: &FactorwiseClass) -> Result<FactorwiseClass> {
        self.check(other)?;
        let mut out = Self::zero(&self.base);
        for (k1, c1) in &self.terms {
            for (k2, c2) in &other.terms {
                let mut partial: Vec<(Q, Vec<DecoratedStratum>)> = vec![(c1 * c2, Vec::new())];
                for (x, y) in k1.iter().zip(k2) {
                    let p = TautClass::from_stratum(x.clone())
                        .mul(&TautClass::from_stratum(y.clone()))?;
                    let mut next = Vec::new();
                    for (c, fs) in &partial {
                        for (s, d) in p.terms() {
                            let mut fs = fs.clone();
                            fs.push(s.clone());
                            next.push((c * d, fs));
                        }
                    }
                    partial = next;
                }
                for (c, fs) in partial {
                    out.add_term(c, fs);
                }
            }
        }
        Ok(out)
    }

    /// Product with a monomial `θ` in the ψ and κ classes of `M̄_A`.
    pub fn times_decoration(&self, deco: &Decoration) -> FactorwiseClass {
        let a = &self.base;
        let mut out = Self::zero(a);
        for (factors, c) in &self.terms {
            let mut partial: Vec<(Q, Vec<DecoratedStratum>)> = vec![(c.clone(), Vec::new())];
            for (v, f) in factors.iter().enumerate() {
                let psi: Vec<u32> = a
                    .points(v)
                    .iter()
                    .map(|p| match *p {
                        Point::Leg(m) => deco.psi_leg[a.leg_index(m).expect("leg")],
                        Point::HalfEdge(h) => deco.psi_half[h],
                    })
                    .collect();
                let poly = f.times_monomial(&psi, &deco.kappa[v]);
                let mut next = Vec::new();
                for (x, fs) in &partial {
                    for (d, y) in &poly {
                        let mut fs = fs.clone();
                        fs.push(DecoratedStratum {
                            graph: f.graph.clone(),
                            decoration: d.clone(),
                        });
                        next.push((x * y, fs));
                    }
                }
                partial = next;
            }
            for (x, fs) in partial {
                out.add_term(x, fs);
            }
        }
        out
    }

    /// Each term as a list of per-vertex one-term classes.
    pub fn pure_tensors(&self) -> Vec<(Q, Vec<TautClass>)> {
        self.terms
            .iter()
            .map(|(k, c)| {
                (
                    c.clone(),
                    k.iter()
                        .map(|s| TautClass::from_stratum(s.clone()))
                        .collect(),
                )
            })
            .collect()
    }
}

impl fmt::Display for FactorwiseClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let lines: Vec<String> = self
            .terms
            .iter()
            .map(|(k, c)| {
                let parts: Vec<String> = k.iter().map(|s| format!("[{s}]")).collect();
                format!("{} {}", render_q(c), parts.join(" ⊗ "))
            })
            .collect();
        write!(f, "{}", lines.join("\n"))
    }
}

/// `ξ_{A*}` of a factorwise class.
pub fn xi_pushforward(a: &StableGraph, f: &FactorwiseClass) -> Result<TautClass> {
    if f.base() != a {
        return Err(Error::GraphMismatch);
    }
    let ambient = a.ambient();
    let mut out = TautClass::zero(ambient);
    for (factors, c) in f.terms() {
        let graphs: Vec<&StableGraph> = factors.iter().map(|s| &s.graph).collect();
        let glued = glue(a, &graphs);
        let decos: Vec<Decoration> = factors.iter().map(|s| s.decoration.clone()).collect();
        let decoration = glued.join(&graphs, &decos);
        let factor_auts: u64 = factors.iter().map(|s| s.graph_automorphisms()).product();
        let auts = canon::automorphism_count(&glued.graph);
        let coef = c * Q::new(BigInt::from(auts), BigInt::from(factor_auts));
        out.add_term(
            coef,
            DecoratedStratum {
                graph: glued.graph,
                decoration,
            },
        );
    }
    Ok(out)
}

/// `ξ_A^*` of a class.
pub fn xi_pullback(a: &StableGraph, t: &TautClass) -> Result<FactorwiseClass> {
    a.genus()?;
    if a.ambient() != t.ambient() {
        return Err(Error::AmbientMismatch {
            expected: a.ambient(),
            found: t.ambient(),
        });
    }
    let mut out = FactorwiseClass::zero(a);
    for (s, c) in t.terms() {
        let p = stratum_pullback(a, s);
        for (k, d) in p.terms {
            out.add_term(c * d, k);
        }
    }
    Ok(out)
}

/// `ξ_A^*⟨B, θ⟩`: a sum over generic (A,B)-graphs `C` of the excess class
/// of the shared edges times the pulled-back decoration.
pub(crate) fn stratum_pullback(a: &StableGraph, s: &DecoratedStratum) -> FactorwiseClass {
    let b = &s.graph;
    let mut out = FactorwiseClass::zero(a);
    let a_edges = a.edges();
    let b_auts = Q::from_integer(BigInt::from(canon::automorphism_count(b)));
    for_each_candidate(a, b, |cand| {
        let glued = cand.glued;
        let c = &glued.graph;
        let in_s: Vec<bool> = (0..a_edges.len())
            .map(|e| cand.contracted.contains(&e))
            .collect();
        // Excess class: the shared edges.
        let shared: Vec<(usize, usize)> = (0..a_edges.len())
            .filter(|&e| !in_s[e])
            .map(|e| (glued.a_half[a_edges[e].0], glued.a_half[a_edges[e].1]))
            .collect();
        let internal = c.num_edges() - a_edges.len();
        if (internal + shared.len()) as i64 + s.decoration.degree() as i64 > a.dimension() {
            return;
        }
        let mut excess = DecoPoly::from([(Decoration::trivial(c), Q::one())]);
        for &(h, k) in &shared {
            excess = multiply_linear(
                &excess,
                &[(-Q::one(), Inc::PsiHalf(h)), (-Q::one(), Inc::PsiHalf(k))],
            );
        }
        for iso in cand.isos {
            let poly = pull_decoration(c, cand.contraction, iso, s, &excess);
            for (deco, coef) in poly {
                let parts = glued.split(&cand.factors, &deco);
                let factors: Vec<DecoratedStratum> = cand
                    .factors
                    .iter()
                    .zip(parts)
                    .map(|(g, d)| DecoratedStratum {
                        graph: (*g).clone(),
                        decoration: d,
                    })
                    .collect();
                out.add_term(coef / &b_auts, factors);
            }
        }
    });
    out
}

/// `excess · σ^*θ` on `C`, with `σ: C/S -> B`.
fn pull_decoration(
    c: &StableGraph,
    contraction: &crate::graph::Contraction,
    iso: &canon::Morphism,
    s: &DecoratedStratum,
    excess: &DecoPoly,
) -> DecoPoly {
    let theta = &s.decoration;
    let b = &s.graph;
    let mut base = Decoration::trivial(c);
    for h in 0..c.num_half_edges() {
        if let Some(k) = contraction.half_edge_map[h] {
            base.psi_half[h] = theta.psi_half[iso.half[k]];
        }
    }
    for (i, leg) in c.legs().iter().enumerate() {
        base.psi_leg[i] = theta.psi_leg[b.leg_index(leg.marking).expect("leg")];
    }
    let mut poly: DecoPoly = excess
        .iter()
        .map(|(d, q)| (d.mul(&base), q.clone()))
        .collect();
    for w in 0..b.num_vertices() {
        let over: Vec<usize> = (0..c.num_vertices())
            .filter(|&u| iso.vertex[contraction.vertex_map[u]] == w)
            .collect();
        for i in theta.kappa[w].expanded() {
            let form: Vec<(Q, Inc)> = over.iter().map(|&u| (Q::one(), Inc::Kappa(u, i))).collect();
            poly = multiply_linear(&poly, &form);
        }
    }
    poly
}

/// Product of two decorated strata; pulls back onto the first.
pub(crate) fn stratum_product(s1: &DecoratedStratum, s2: &DecoratedStratum) -> TautClass {
    let ambient = s1.ambient();
    if (s1.codimension() + s2.codimension()) as i64 > ambient.dimension() {
        return TautClass::zero(ambient);
    }
    let a = &s1.graph;
    let pulled = stratum_pullback(a, s2).times_decoration(&s1.decoration);
    let auts = Q::from_integer(BigInt::from(canon::automorphism_count(a)));
    xi_pushforward(a, &pulled)
        .expect("same base graph")
        .scale(&(Q::one() / auts))
}

/// `ξ_B^* κ_i = Σ_v κ_i` at the vertices of `B`.
pub fn kappa_pullback(b: &StableGraph, index: u32) -> Result<FactorwiseClass> {
    b.genus()?;
    let mut out = FactorwiseClass::zero(b);
    let unit = FactorwiseClass::unit(b);
    let (factors, _) = unit.terms().iter().next().expect("unit term");
    for v in 0..b.num_vertices() {
        let mut fs = factors.clone();
        fs[v].decoration.kappa[0] = KappaMonomial::single(index);
        out.add_term(Q::one(), fs);
    }
    Ok(out)
}

/// `ξ_B^* ψ_m` is ψ at the factor leg standing for marking `m`.
pub fn psi_pullback(b: &StableGraph, marking: u32) -> Result<FactorwiseClass> {
    b.genus()?;
    let idx = b.leg_index(marking).ok_or(Error::UnknownMarking(marking))?;
    let v = b.legs()[idx].vertex;
    let slot = b
        .points(v)
        .iter()
        .position(|p| *p == Point::Leg(marking))
        .expect("point");
    let unit = FactorwiseClass::unit(b);
    let (factors, _) = unit.terms().iter().next().expect("unit term");
    let mut fs = factors.clone();
    fs[v].decoration.psi_leg[slot] = 1;
    let mut out = FactorwiseClass::zero(b);
    out.add_term(Q::one(), fs);
    Ok(out)
}

/// Divisor `D_{ip}`: a genus-0 vertex carrying legs `i` and `p` attached to
/// a genus-`g` vertex with the remaining legs.
pub fn forgetful_divisor(ambient: Ambient, forgotten: u32, p: u32) -> StableGraph {
    let legs: Vec<(u32, usize)> = (1..=ambient.n)
        .map(|m| (m, if m == forgotten || m == p { 1 } else { 0 }))
        .collect();
    StableGraph::from_edges(vec![ambient.genus, 0], &[(0, 1)], &legs)
}

/// `π_i^*(ψ_p) = ψ_p − [D_{ip}]` on `ambient`, where `π_i` forgets marking
/// `forgotten`.
pub fn forgetful_pullback_psi(ambient: Ambient, p: u32, forgotten: u32) -> Result<TautClass> {
    for m in [p, forgotten] {
        if m == 0 || m > ambient.n {
            return Err(Error::UnknownMarking(m));
        }
    }
    if p == forgotten {
        return Err(Error::Input(
            "the forgotten marking must differ from p".to_string(),
        ));
    }
    let down = Ambient::new(ambient.genus, ambient.n - 1);
    if !down.is_stable() {
        return Err(Error::Unstable(down));
    }
    let d = TautClass::boundary(&forgetful_divisor(ambient, forgotten, p))?;
    TautClass::psi(ambient, p)?.sub(&d)
}

/// Order in which upstairs factors are rewritten by [`forgetful_pushforward`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RewriteOrder {
    #[default]
    Forward,
    Reverse,
}

/// A term during the rewriting: downstairs monomial, power of `ψ_{n+1}`,
/// optional divisor `D_{j,n+1}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Partial {
    psi: Vec<u32>,
    kappa: KappaMonomial,
    top: u32,
    divisor: Option<usize>,
}

#[derive(Debug, Clone, Copy)]
enum Factor {
    Psi(usize),
    Top,
    Kappa(u32),
}

fn times_factor(terms: BTreeMap<Partial, Q>, f: Factor) -> BTreeMap<Partial, Q> {
    let mut out: BTreeMap<Partial, Q> = BTreeMap::new();
    let mut push = |p: Partial, c: Q| {
        // D_j · ψ_{n+1} = 0.
        if p.divisor.is_some() && p.top > 0 {
            return;
        }
        *out.entry(p).or_insert_with(Q::zero) += c;
    };
    for (t, c) in terms {
        match f {
            Factor::Top => {
                let mut p = t.clone();
                p.top += 1;
                push(p, c);
            }
            Factor::Kappa(a) => {
                let mut p = t.clone();
                p.kappa.push(a);
                push(p, c.clone());
                let mut p = t;
                p.top += a;
                push(p, c);
            }
            Factor::Psi(j) => {
                let mut p = t.clone();
                p.psi[j] += 1;
                push(p, c.clone());
                // times D_j
                match t.divisor {
                    None => {
                        let mut p = t;
                        p.divisor = Some(j);
                        push(p, c);
                    }
                    Some(k) if k == j => {
                        // D_j² = −π^*ψ_j · D_j
                        let mut p = t;
                        p.psi[j] += 1;
                        push(p, -c);
                    }
                    Some(_) => {}
                }
            }
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// `π_*` along the map `M̄_{g,n+1} → M̄_{g,n}` forgetting the last marking,
/// for polynomials in ψ and κ classes on the trivial graph.
pub fn forgetful_pushforward(t: &TautClass) -> Result<TautClass> {
    forgetful_pushforward_ordered(t, RewriteOrder::Forward)
}

pub fn forgetful_pushforward_ordered(t: &TautClass, order: RewriteOrder) -> Result<TautClass> {
    let up = t.ambient();
    if up.n == 0 {
        return Err(Error::Input("no marking to forget".to_string()));
    }
    let down = Ambient::new(up.genus, up.n - 1);
    if !down.is_stable() {
        return Err(Error::Unstable(down));
    }
    let n = down.n as usize;
    let mut out = TautClass::zero(down);
    let target = StableGraph::trivial(down.genus, down.n);
    for (s, c) in t.terms() {
        if s.graph.num_edges() > 0 {
            return Err(Error::Unsupported(
                "forgetful pushforward of classes supported on the boundary".to_string(),
            ));
        }
        let d = &s.decoration;
        let mut factors = Vec::new();
        for (j, &e) in d.psi_leg.iter().enumerate() {
            for _ in 0..e {
                factors.push(if j == n { Factor::Top } else { Factor::Psi(j) });
            }
        }
        for i in d.kappa[0].expanded() {
            factors.push(Factor::Kappa(i));
        }
        if order == RewriteOrder::Reverse {
            factors.reverse();
        }
        let start = Partial {
            psi: vec![0; n],
            kappa: KappaMonomial::one(),
            top: 0,
            divisor: None,
        };
        let mut terms = BTreeMap::from([(start, c.clone())]);
        for f in factors {
            terms = times_factor(terms, f);
        }
        for (p, x) in terms {
            let mut kappa = p.kappa.clone();
            match (p.divisor, p.top) {
                (Some(_), _) => {}
                (None, 0) => continue,
                (None, e) => kappa.push(e - 1),
            }
            let mut deco = Decoration::trivial(&target);
            deco.psi_leg = p.psi.clone();
            deco.kappa[0] = kappa;
            out.add_term(
                x,
                DecoratedStratum {
                    graph: target.clone(),
                    decoration: deco,
                },
            );
        }
    }
    Ok(out)
}

/// Explicit listing of a factorwise class as pure tensors.
pub fn kunneth_report(f: &FactorwiseClass) -> String {
    let mut lines = vec![format!("base {}", f.base())];
    for (v, _) in f.base().genera().iter().enumerate() {
        lines.push(format!("factor v{v} on {}", f.factor_ambient(v)));
    }
    lines.push(format!("pure tensors: {}", f.len()));
    lines.push(f.to_string());
    lines.join("\n")
}
