//! Graph-level admissible double covers of a stable target graph.
//!
//! The target has `b` branch legs (markings `1..=b`) followed by `k` étale
//! legs. The étale leg with marking `b + i` has the two source markings `i`
//! and `k + i`; ramification points over branch legs are not marked on the
//! source. Source edges are numbered as in [`StableGraph::from_edges`], and
//! the first half-edge of a source edge lies over the first half-edge of its
//! target edge.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::canon::{self, Colors};
use crate::error::{Error, Result};
use crate::graph::StableGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeFiber {
    /// Two source edges.
    Etale([usize; 2]),
    /// One source edge, locally `u = x², v = y²`.
    Ramified(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LegFiber {
    /// The source vertex carrying the ramification point.
    Branch(usize),
    /// The two source markings.
    Etale([u32; 2]),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverGraph {
    pub target: StableGraph,
    pub source: StableGraph,
    /// Source vertex -> target vertex.
    pub vertex_map: Vec<usize>,
    /// Per target edge, in `target.edges()` order.
    pub edge_fibers: Vec<EdgeFiber>,
    /// Per target leg, by marking.
    pub leg_fibers: Vec<LegFiber>,
}

impl CoverGraph {
    pub fn branch_count(&self) -> u32 {
        self.leg_fibers
            .iter()
            .filter(|f| matches!(f, LegFiber::Branch(_)))
            .count() as u32
    }

    pub fn etale_count(&self) -> u32 {
        self.leg_fibers.len() as u32 - self.branch_count()
    }

    /// Local degree of the map at a source vertex.
    pub fn local_degree(&self, w: usize) -> u32 {
        let v = self.vertex_map[w];
        if self.vertex_map.iter().filter(|&&x| x == v).count() == 1 {
            2
        } else {
            1
        }
    }

    /// Arithmetic genus of the (possibly unstable) source.
    pub fn source_genus(&self) -> i64 {
        self.source.genera().iter().map(|&g| g as i64).sum::<i64>() + self.source.h1()
    }

    /// Ramified legs and ramified edge ends at a target vertex.
    pub fn ramification_at(&self, v: usize) -> u32 {
        let legs = self
            .target
            .legs()
            .iter()
            .zip(&self.leg_fibers)
            .filter(|(l, f)| l.vertex == v && matches!(f, LegFiber::Branch(_)))
            .count();
        let ends: usize = self
            .target
            .edges()
            .iter()
            .zip(&self.edge_fibers)
            .filter(|(_, f)| matches!(f, EdgeFiber::Ramified(_)))
            .map(|(&(h, k), _)| {
                usize::from(self.target.vertex_of(h) == v)
                    + usize::from(self.target.vertex_of(k) == v)
            })
            .sum();
        (legs + ends) as u32
    }

    /// Colors recording the map to the target, for isomorphism tests over
    /// the identity of the target.
    pub fn fiber_colors(&self) -> Colors {
        let mut colors = Colors::blank(&self.source);
        for (w, &v) in self.vertex_map.iter().enumerate() {
            colors.vertex[w] = vec![v as u32];
        }
        let s_edges = self.source.edges();
        for (&(ht, kt), fiber) in self.target.edges().iter().zip(&self.edge_fibers) {
            let list: Vec<usize> = match *fiber {
                EdgeFiber::Etale(es) => es.to_vec(),
                EdgeFiber::Ramified(e) => vec![e],
            };
            for e in list {
                if let Some(&(hs, ks)) = s_edges.get(e) {
                    colors.half[hs] = ht as u32 + 1;
                    colors.half[ks] = kt as u32 + 1;
                }
            }
        }
        colors
    }

    /// Canonical source graph with fiber colors.
    pub fn canonical_key(&self) -> (StableGraph, Colors) {
        let c = canon::canonize(&self.source, &self.fiber_colors());
        (c.graph, c.colors)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoverViolation {
    InvalidTarget(String),
    LegOrdering,
    FiberCounts,
    VertexFiber {
        target_vertex: usize,
        preimages: usize,
    },
    EdgeFiber {
        target_edge: usize,
    },
    LegFiber {
        marking: u32,
    },
    SourceLegs,
    RiemannHurwitz {
        source_vertex: usize,
    },
    Disconnected,
    BranchCount {
        branch: u32,
        source_genus: i64,
        target_genus: u32,
    },
    UnstableAfterStabilization,
}

impl fmt::Display for CoverViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoverViolation::InvalidTarget(m) => write!(f, "target is not a stable graph: {m}"),
            CoverViolation::LegOrdering => write!(f, "branch legs must precede étale legs"),
            CoverViolation::FiberCounts => write!(f, "fiber lists do not match the target"),
            CoverViolation::VertexFiber {
                target_vertex,
                preimages,
            } => {
                write!(f, "target vertex {target_vertex} has {preimages} preimages")
            }
            CoverViolation::EdgeFiber { target_edge } => {
                write!(f, "inconsistent fiber over target edge {target_edge}")
            }
            CoverViolation::LegFiber { marking } => {
                write!(f, "inconsistent fiber over target leg {marking}")
            }
            CoverViolation::SourceLegs => write!(f, "source legs are not the étale preimages"),
            CoverViolation::RiemannHurwitz { source_vertex } => {
                write!(
                    f,
                    "local Riemann-Hurwitz fails at source vertex {source_vertex}"
                )
            }
            CoverViolation::Disconnected => write!(f, "source is disconnected"),
            CoverViolation::BranchCount {
                branch,
                source_genus,
                target_genus,
            } => write!(
                f,
                "b = {branch} but 2(g - 2h + 1) = {} for g = {source_genus}, h = {target_genus}",
                2 * (source_genus - 2 * *target_genus as i64 + 1)
            ),
            CoverViolation::UnstableAfterStabilization => {
                write!(f, "stabilized source is not stable")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverReport {
    pub violations: Vec<CoverViolation>,
}

impl CoverReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for CoverReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        let lines: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "invalid:\n{}", lines.join("\n"))
    }
}

pub fn validate_cover(cg: &CoverGraph) -> CoverReport {
    let mut violations = Vec::new();
    let report = cg.target.validate();
    if !report.is_valid() {
        violations.push(CoverViolation::InvalidTarget(report.to_string()));
        return CoverReport { violations };
    }
    let (t, s) = (&cg.target, &cg.source);
    let t_edges = t.edges();
    let s_edges = s.edges();
    if cg.leg_fibers.len() != t.num_legs()
        || cg.edge_fibers.len() != t_edges.len()
        || cg.vertex_map.len() != s.num_vertices()
        || cg.vertex_map.iter().any(|&v| v >= t.num_vertices())
        || s.half_edges().iter().any(|&w| w >= s.num_vertices())
    {
        violations.push(CoverViolation::FiberCounts);
        return CoverReport { violations };
    }
    let b = cg.branch_count();
    let k = cg.etale_count();
    if cg.leg_fibers[..b as usize]
        .iter()
        .any(|f| !matches!(f, LegFiber::Branch(_)))
    {
        violations.push(CoverViolation::LegOrdering);
    }
    let preimages: Vec<Vec<usize>> = (0..t.num_vertices())
        .map(|v| {
            (0..s.num_vertices())
                .filter(|&w| cg.vertex_map[w] == v)
                .collect()
        })
        .collect();
    for (v, p) in preimages.iter().enumerate() {
        if p.is_empty() || p.len() > 2 {
            violations.push(CoverViolation::VertexFiber {
                target_vertex: v,
                preimages: p.len(),
            });
        }
    }
    if !violations.is_empty() {
        return CoverReport { violations };
    }
    let split = |v: usize| preimages[v].len() == 2;

    let mut used = vec![0u32; s_edges.len()];
    for (te, (&(ht, kt), fiber)) in t_edges.iter().zip(&cg.edge_fibers).enumerate() {
        let list: Vec<usize> = match *fiber {
            EdgeFiber::Etale(es) => es.to_vec(),
            EdgeFiber::Ramified(e) => vec![e],
        };
        let (vt, wt) = (t.vertex_of(ht), t.vertex_of(kt));
        let mut ok = list.iter().all(|&e| e < s_edges.len());
        if ok {
            for &e in &list {
                used[e] += 1;
                let (hs, ks) = s_edges[e];
                ok &= cg.vertex_map[s.vertex_of(hs)] == vt && cg.vertex_map[s.vertex_of(ks)] == wt;
            }
        }
        if ok {
            match *fiber {
                EdgeFiber::Ramified(_) => ok &= !split(vt) && !split(wt),
                EdgeFiber::Etale([e1, e2]) => {
                    ok &= e1 != e2;
                    let (a1, b1) = s_edges[e1];
                    let (a2, b2) = s_edges[e2];
                    if split(vt) {
                        ok &= s.vertex_of(a1) != s.vertex_of(a2);
                    }
                    if split(wt) {
                        ok &= s.vertex_of(b1) != s.vertex_of(b2);
                    }
                }
            }
        }
        if !ok {
            violations.push(CoverViolation::EdgeFiber { target_edge: te });
        }
    }
    if used.iter().any(|&u| u != 1) {
        violations.push(CoverViolation::FiberCounts);
    }

    let mut expected_source_legs = Vec::new();
    for (idx, (leg, fiber)) in t.legs().iter().zip(&cg.leg_fibers).enumerate() {
        let v = leg.vertex;
        let ok = match *fiber {
            LegFiber::Branch(w) => w < s.num_vertices() && cg.vertex_map[w] == v && !split(v),
            LegFiber::Etale([m1, m2]) => {
                let i = idx as u32 + 1 - b;
                expected_source_legs.extend([m1, m2]);
                let at = |m: u32| s.leg_index(m).map(|j| s.legs()[j].vertex);
                match (at(m1), at(m2)) {
                    (Some(w1), Some(w2)) => {
                        m1 == i
                            && m2 == k + i
                            && cg.vertex_map[w1] == v
                            && cg.vertex_map[w2] == v
                            && (split(v) == (w1 != w2))
                    }
                    _ => false,
                }
            }
        };
        if !ok {
            violations.push(CoverViolation::LegFiber {
                marking: leg.marking,
            });
        }
    }
    expected_source_legs.sort_unstable();
    let source_legs: Vec<u32> = s.legs().iter().map(|l| l.marking).collect();
    if source_legs != expected_source_legs || source_legs != (1..=2 * k).collect::<Vec<_>>() {
        violations.push(CoverViolation::SourceLegs);
    }

    for w in 0..s.num_vertices() {
        let v = cg.vertex_map[w];
        let gw = s.vertex_genus(w) as i64;
        let gv = t.vertex_genus(v) as i64;
        let ok = if split(v) {
            gw == gv
        } else {
            2 * gw - 2 == 2 * (2 * gv - 2) + cg.ramification_at(v) as i64
        };
        if !ok {
            violations.push(CoverViolation::RiemannHurwitz { source_vertex: w });
        }
    }
    if !s.is_connected() {
        violations.push(CoverViolation::Disconnected);
    }
    let g = cg.source_genus();
    let h = t.ambient().genus;
    if b as i64 != 2 * (g - 2 * h as i64 + 1) {
        violations.push(CoverViolation::BranchCount {
            branch: b,
            source_genus: g,
            target_genus: h,
        });
    }
    if violations.is_empty() && stabilize(s).is_err() {
        violations.push(CoverViolation::UnstableAfterStabilization);
    }
    CoverReport { violations }
}

/// Contracts genus-0 vertices of valence at most 2 until none is left.
pub fn stabilize(g: &StableGraph) -> Result<StableGraph> {
    let mut g = g.clone();
    loop {
        let unstable = (0..g.num_vertices()).find(|&v| g.vertex_genus(v) == 0 && g.valence(v) <= 2);
        let Some(v) = unstable else { break };
        let halves = g.half_edges_at(v);
        let h = halves
            .iter()
            .copied()
            .find(|&h| !g.is_self_edge(h))
            .ok_or_else(|| {
                Error::InvalidGraph("source stabilizes to an unstable curve".to_string())
            })?;
        g = g.contract(&[h]).graph;
    }
    let report = g.validate();
    if !report.is_valid() {
        return Err(Error::InvalidGraph(report.to_string()));
    }
    Ok(g)
}

pub fn stabilize_source(cg: &CoverGraph) -> Result<StableGraph> {
    stabilize(&cg.source)
}

/// Assembles the cover determined by the per-vertex and per-edge choices.
struct Choices<'a> {
    target: &'a StableGraph,
    b: u32,
    k: u32,
    split: Vec<bool>,
    ramified: Vec<bool>,
    /// Per target edge; only meaningful for étale edges joining split ends.
    cross: Vec<bool>,
    /// Per target leg; only meaningful for étale legs at split vertices.
    sheet: Vec<bool>,
}

impl Choices<'_> {
    fn build(&self) -> Option<CoverGraph> {
        let t = self.target;
        let mut first = Vec::with_capacity(t.num_vertices());
        let mut genera = Vec::new();
        let mut vertex_map = Vec::new();
        for v in 0..t.num_vertices() {
            first.push(genera.len());
            let gv = t.vertex_genus(v) as i64;
            if self.split[v] {
                genera.extend([gv as u32, gv as u32]);
                vertex_map.extend([v, v]);
            } else {
                let r = t
                    .legs()
                    .iter()
                    .filter(|l| l.vertex == v && l.marking <= self.b)
                    .count() as i64
                    + t.edges()
                        .iter()
                        .enumerate()
                        .filter(|(e, _)| self.ramified[*e])
                        .map(|(_, &(h, k))| {
                            i64::from(t.vertex_of(h) == v) + i64::from(t.vertex_of(k) == v)
                        })
                        .sum::<i64>();
                if r % 2 == 1 {
                    return None;
                }
                let gw = 2 * gv - 1 + r / 2;
                if gw < 0 {
                    return None;
                }
                genera.push(gw as u32);
                vertex_map.push(v);
            }
        }
        let sheet = |v: usize, s: usize| first[v] + if self.split[v] { s } else { 0 };
        let mut edges = Vec::new();
        let mut edge_fibers = Vec::new();
        for (e, &(h, k)) in t.edges().iter().enumerate() {
            let (v, w) = (t.vertex_of(h), t.vertex_of(k));
            if self.ramified[e] {
                if self.split[v] || self.split[w] {
                    return None;
                }
                edge_fibers.push(EdgeFiber::Ramified(edges.len()));
                edges.push((sheet(v, 0), sheet(w, 0)));
                continue;
            }
            let c = usize::from(self.cross[e] && self.split[v] && self.split[w]);
            edge_fibers.push(EdgeFiber::Etale([edges.len(), edges.len() + 1]));
            edges.push((sheet(v, 0), sheet(w, c)));
            edges.push((sheet(v, 1), sheet(w, 1 - c)));
        }
        let mut legs = Vec::new();
        let mut leg_fibers = Vec::new();
        for (idx, leg) in t.legs().iter().enumerate() {
            let v = leg.vertex;
            if leg.marking <= self.b {
                if self.split[v] {
                    return None;
                }
                leg_fibers.push(LegFiber::Branch(sheet(v, 0)));
            } else {
                let i = leg.marking - self.b;
                let s = usize::from(self.sheet[idx]);
                legs.push((i, sheet(v, s)));
                legs.push((self.k + i, sheet(v, 1 - s)));
                leg_fibers.push(LegFiber::Etale([i, self.k + i]));
            }
        }
        Some(CoverGraph {
            target: t.clone(),
            source: StableGraph::from_edges(genera, &edges, &legs),
            vertex_map,
            edge_fibers,
            leg_fibers,
        })
    }
}

fn bits(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u64..(1 << n)).map(move |m| (0..n).map(|i| m >> i & 1 == 1).collect())
}

/// All admissible double covers of `target` up to isomorphism over the
/// identity of the target, in a deterministic order.
pub fn enumerate_covers(target: &StableGraph, b: u32, k: u32) -> Result<Vec<CoverGraph>> {
    if target.num_legs() as u32 != b + k {
        return Err(Error::Input(format!(
            "target has {} legs, expected b + k = {}",
            target.num_legs(),
            b + k
        )));
    }
    if b % 2 == 1 || !target.validate().is_valid() {
        return Ok(Vec::new());
    }
    let nv = target.num_vertices();
    let t_edges = target.edges();
    let mut out = Vec::new();
    for split in bits(nv) {
        if target
            .legs()
            .iter()
            .any(|l| l.marking <= b && split[l.vertex])
        {
            continue;
        }
        let rammable: Vec<usize> = (0..t_edges.len())
            .filter(|&e| {
                let (h, k) = t_edges[e];
                !split[target.vertex_of(h)] && !split[target.vertex_of(k)]
            })
            .collect();
        let crossable: Vec<usize> = (0..t_edges.len())
            .filter(|&e| {
                let (h, k) = t_edges[e];
                split[target.vertex_of(h)] && split[target.vertex_of(k)]
            })
            .collect();
        let sheetable: Vec<usize> = (0..target.num_legs())
            .filter(|&i| target.legs()[i].marking > b && split[target.legs()[i].vertex])
            .collect();
        let split_vertices: Vec<usize> = (0..nv).filter(|&v| split[v]).collect();
        for ram_bits in bits(rammable.len()) {
            let mut ramified = vec![false; t_edges.len()];
            for (i, &e) in rammable.iter().enumerate() {
                ramified[e] = ram_bits[i];
            }
            for free in bits(crossable.len() + sheetable.len()) {
                let mut cross = vec![false; t_edges.len()];
                for (i, &e) in crossable.iter().enumerate() {
                    cross[e] = free[i];
                }
                let mut sheet = vec![false; target.num_legs()];
                for (i, &l) in sheetable.iter().enumerate() {
                    sheet[l] = free[crossable.len() + i];
                }
                if !is_orbit_minimum(target, &split_vertices, &crossable, &sheetable, &free) {
                    continue;
                }
                let choices = Choices {
                    target,
                    b,
                    k,
                    split: split.clone(),
                    ramified: ramified.clone(),
                    cross,
                    sheet,
                };
                if let Some(cg) = choices.build() {
                    if validate_cover(&cg).is_valid() {
                        out.push(cg);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Sheet swaps at split vertices toggle the cross bits of incident
/// non-loop edges and the sheet bits of legs there.
fn is_orbit_minimum(
    target: &StableGraph,
    split_vertices: &[usize],
    crossable: &[usize],
    sheetable: &[usize],
    free: &[bool],
) -> bool {
    let edges = target.edges();
    for swaps in bits(split_vertices.len()).skip(1) {
        let swapped = |v: usize| {
            split_vertices
                .iter()
                .position(|&x| x == v)
                .is_some_and(|i| swaps[i])
        };
        let mut image = free.to_vec();
        for (i, &e) in crossable.iter().enumerate() {
            let (h, k) = edges[e];
            let (v, w) = (target.vertex_of(h), target.vertex_of(k));
            if v != w && (swapped(v) != swapped(w)) {
                image[i] = !image[i];
            }
        }
        for (i, &l) in sheetable.iter().enumerate() {
            if swapped(target.legs()[l].vertex) {
                image[crossable.len() + i] = !image[crossable.len() + i];
            }
        }
        if image < free.to_vec() {
            return false;
        }
    }
    true
}

/// Two copies of a genus-`h` curve joined by a rational curve mapping with
/// degree 2 to a rational tail that carries both branch points.
pub fn diagonal_witness(h: u32) -> Result<CoverGraph> {
    if h == 0 {
        return Err(Error::Input("witness needs genus at least 1".to_string()));
    }
    let target = StableGraph::from_edges(vec![h, 0], &[(0, 1)], &[(1, 1), (2, 1)]);
    let source = StableGraph::from_edges(vec![h, h, 0], &[(0, 2), (1, 2)], &[]);
    Ok(CoverGraph {
        target,
        source,
        vertex_map: vec![0, 0, 1],
        edge_fibers: vec![EdgeFiber::Etale([0, 1])],
        leg_fibers: vec![LegFiber::Branch(2), LegFiber::Branch(2)],
    })
}
