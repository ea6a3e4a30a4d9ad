//! JSON schemas for graphs, covers and classes.
//!
//! Graphs: `{"vertices": [{"genus": g}], "edges": [[v, w]], "legs": [[m, v]]}`
//! with edge `k` giving half-edges `2k`, `2k+1`.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::boundary::FactorwiseClass;
use crate::covers::{CoverGraph, EdgeFiber, LegFiber};
use crate::error::{Ambient, Error, Result};
use crate::graph::StableGraph;
use crate::strata::{render_q, DecoratedStratum, Decoration, KappaMonomial, TautClass, Q};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexJson {
    pub genus: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphJson {
    pub vertices: Vec<VertexJson>,
    pub edges: Vec<[usize; 2]>,
    pub legs: Vec<(u32, usize)>,
}

impl GraphJson {
    pub fn from_graph(g: &StableGraph) -> Self {
        GraphJson {
            vertices: g
                .genera()
                .iter()
                .map(|&genus| VertexJson { genus })
                .collect(),
            edges: g
                .edges()
                .iter()
                .map(|&(h, k)| [g.vertex_of(h), g.vertex_of(k)])
                .collect(),
            legs: g.legs().iter().map(|l| (l.marking, l.vertex)).collect(),
        }
    }

    /// Builds the graph; index ranges are checked, stability is not.
    pub fn to_graph(&self) -> Result<StableGraph> {
        let nv = self.vertices.len();
        if nv == 0 {
            return Err(Error::Input("graph has no vertices".to_string()));
        }
        for e in &self.edges {
            if e.iter().any(|&v| v >= nv) {
                return Err(Error::Input(format!(
                    "edge {e:?} references a missing vertex"
                )));
            }
        }
        for &(m, v) in &self.legs {
            if v >= nv {
                return Err(Error::Input(format!("leg {m} references a missing vertex")));
            }
        }
        let edges: Vec<(usize, usize)> = self.edges.iter().map(|e| (e[0], e[1])).collect();
        Ok(StableGraph::from_edges(
            self.vertices.iter().map(|v| v.genus).collect(),
            &edges,
            &self.legs,
        ))
    }
}

fn parse_error(text: &str, e: serde_json::Error) -> Error {
    let offset: usize = text
        .split_inclusive('\n')
        .take(e.line().saturating_sub(1))
        .map(str::len)
        .sum::<usize>()
        + e.column().saturating_sub(1);
    Error::Parse {
        pos: offset,
        msg: e.to_string(),
    }
}

pub fn parse_graph(text: &str) -> Result<StableGraph> {
    let g: GraphJson = serde_json::from_str(text).map_err(|e| parse_error(text, e))?;
    g.to_graph()
}

pub fn graph_to_json(g: &StableGraph) -> String {
    serde_json::to_string(&GraphJson::from_graph(g)).expect("serializable")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverJson {
    pub target: GraphJson,
    pub source: GraphJson,
    pub vertex_map: Vec<usize>,
    pub edge_fibers: Vec<EdgeFiber>,
    pub leg_fibers: Vec<LegFiber>,
}

impl CoverJson {
    pub fn from_cover(c: &CoverGraph) -> Self {
        CoverJson {
            target: GraphJson::from_graph(&c.target),
            source: GraphJson::from_graph(&c.source),
            vertex_map: c.vertex_map.clone(),
            edge_fibers: c.edge_fibers.clone(),
            leg_fibers: c.leg_fibers.clone(),
        }
    }

    pub fn to_cover(&self) -> Result<CoverGraph> {
        Ok(CoverGraph {
            target: self.target.to_graph()?,
            source: self.source.to_graph()?,
            vertex_map: self.vertex_map.clone(),
            edge_fibers: self.edge_fibers.clone(),
            leg_fibers: self.leg_fibers.clone(),
        })
    }
}

pub fn parse_cover(text: &str) -> Result<CoverGraph> {
    let c: CoverJson = serde_json::from_str(text).map_err(|e| parse_error(text, e))?;
    c.to_cover()
}

pub fn parse_covers(text: &str) -> Result<Vec<CoverGraph>> {
    let c: Vec<CoverJson> = serde_json::from_str(text).map_err(|e| parse_error(text, e))?;
    c.iter().map(CoverJson::to_cover).collect()
}

pub fn cover_to_json(cover: &CoverGraph) -> String {
    serde_json::to_string_pretty(&CoverJson::from_cover(cover)).expect("serializable")
}

pub fn covers_to_json(covers: &[CoverGraph]) -> String {
    let list: Vec<CoverJson> = covers.iter().map(CoverJson::from_cover).collect();
    serde_json::to_string_pretty(&list).expect("serializable")
}

/// A decorated stratum with ψ exponents listed per edge end and per leg.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumJson {
    pub graph: GraphJson,
    /// `[ψ at the first end, ψ at the second end]` per edge.
    pub psi_edges: Vec<[u32; 2]>,
    /// `[marking, exponent]` for legs with nonzero exponent.
    pub psi_legs: Vec<(u32, u32)>,
    /// Per vertex, `[index, exponent]` pairs of the κ monomial.
    pub kappa: Vec<Vec<(u32, u32)>>,
}

impl StratumJson {
    pub fn from_stratum(s: &DecoratedStratum) -> Self {
        let g = &s.graph;
        let d = &s.decoration;
        StratumJson {
            graph: GraphJson::from_graph(g),
            psi_edges: g
                .edges()
                .iter()
                .map(|&(h, k)| [d.psi_half[h], d.psi_half[k]])
                .collect(),
            psi_legs: g
                .legs()
                .iter()
                .zip(&d.psi_leg)
                .filter(|(_, &e)| e > 0)
                .map(|(l, &e)| (l.marking, e))
                .collect(),
            kappa: d.kappa.iter().map(|k| k.factors().to_vec()).collect(),
        }
    }

    pub fn to_stratum(&self) -> Result<DecoratedStratum> {
        let graph = self.graph.to_graph()?;
        if self.psi_edges.len() != graph.num_edges() || self.kappa.len() != graph.num_vertices() {
            return Err(Error::Input(
                "decoration does not match the graph".to_string(),
            ));
        }
        let mut d = Decoration::trivial(&graph);
        for (e, &[a, b]) in self.psi_edges.iter().enumerate() {
            d.psi_half[2 * e] = a;
            d.psi_half[2 * e + 1] = b;
        }
        for &(m, e) in &self.psi_legs {
            let i = graph.leg_index(m).ok_or(Error::UnknownMarking(m))?;
            d.psi_leg[i] = e;
        }
        for (v, k) in self.kappa.iter().enumerate() {
            d.kappa[v] = KappaMonomial::from_factors(k);
        }
        DecoratedStratum::new(graph, d)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub coefficient: String,
    #[serde(flatten)]
    pub stratum: StratumJson,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmbientJson {
    pub genus: u32,
    pub n: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassJson {
    pub ambient: AmbientJson,
    pub terms: Vec<TermJson>,
}

pub fn parse_rational(s: &str) -> Result<Q> {
    let bad = || Error::Input(format!("malformed rational {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d == BigInt::from(0) {
        return Err(bad());
    }
    Ok(Q::new(n, d))
}

impl ClassJson {
    pub fn from_class(t: &TautClass) -> Self {
        let a = t.ambient();
        ClassJson {
            ambient: AmbientJson {
                genus: a.genus,
                n: a.n,
            },
            terms: t
                .terms()
                .iter()
                .map(|(s, c)| TermJson {
                    coefficient: render_q(c),
                    stratum: StratumJson::from_stratum(s),
                })
                .collect(),
        }
    }

    pub fn to_class(&self) -> Result<TautClass> {
        let ambient = Ambient::new(self.ambient.genus, self.ambient.n);
        let raw = self
            .terms
            .iter()
            .map(|t| Ok((parse_rational(&t.coefficient)?, t.stratum.to_stratum()?)))
            .collect::<Result<Vec<_>>>()?;
        TautClass::normalize(ambient, raw)
    }
}

pub fn class_to_json(t: &TautClass) -> String {
    serde_json::to_string_pretty(&ClassJson::from_class(t)).expect("serializable")
}

pub fn parse_class(text: &str) -> Result<TautClass> {
    let c: ClassJson = serde_json::from_str(text).map_err(|e| parse_error(text, e))?;
    c.to_class()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorTermJson {
    pub coefficient: String,
    pub factors: Vec<StratumJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorwiseJson {
    pub base: GraphJson,
    pub terms: Vec<TensorTermJson>,
}

impl FactorwiseJson {
    pub fn from_factorwise(f: &FactorwiseClass) -> Self {
        FactorwiseJson {
            base: GraphJson::from_graph(f.base()),
            terms: f
                .terms()
                .iter()
                .map(|(k, c)| TensorTermJson {
                    coefficient: render_q(c),
                    factors: k.iter().map(StratumJson::from_stratum).collect(),
                })
                .collect(),
        }
    }

    pub fn to_factorwise(&self) -> Result<FactorwiseClass> {
        let base = self.base.to_graph()?;
        let mut f = FactorwiseClass::zero(&base);
        for t in &self.terms {
            let factors = t
                .factors
                .iter()
                .map(StratumJson::to_stratum)
                .collect::<Result<Vec<_>>>()?;
            f.add_pure(parse_rational(&t.coefficient)?, factors)?;
        }
        Ok(f)
    }
}

pub fn factorwise_to_json(f: &FactorwiseClass) -> String {
    serde_json::to_string_pretty(&FactorwiseJson::from_factorwise(f)).expect("serializable")
}

pub fn parse_factorwise(text: &str) -> Result<FactorwiseClass> {
    let c: FactorwiseJson = serde_json::from_str(text).map_err(|e| parse_error(text, e))?;
    c.to_factorwise()
}
