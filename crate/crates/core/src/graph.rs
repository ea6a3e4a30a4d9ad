//! Stable graphs: the dual graphs of boundary strata of `M̄_{g,n}`.
//!
//! A graph is stored as genus labels on vertices, half-edges with a vertex
//! assignment and a pairing involution, and numbered legs. Edges are the
//! orbits of the involution; self-edges are allowed.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Ambient, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Leg {
    pub marking: u32,
    pub vertex: usize,
}

/// A flag at a vertex: either a leg (by marking) or a half-edge (by id).
///
/// The derived order puts legs first, sorted by marking, then half-edges by
/// id. Vertex moduli spaces number their markings in this order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Point {
    Leg(u32),
    HalfEdge(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StableGraph {
    genera: Vec<u32>,
    half_edges: Vec<usize>,
    involution: Vec<usize>,
    legs: Vec<Leg>,
}

/// Result of contracting a set of edges.
#[derive(Debug, Clone)]
pub struct Contraction {
    pub graph: StableGraph,
    /// Old vertex -> new vertex.
    pub vertex_map: Vec<usize>,
    /// Old half-edge -> new half-edge, `None` for contracted half-edges.
    pub half_edge_map: Vec<Option<usize>>,
}

impl StableGraph {
    /// Builds a graph from raw data. Legs are sorted by marking; no
    /// validation is performed.
    pub fn new(
        genera: Vec<u32>,
        half_edges: Vec<usize>,
        involution: Vec<usize>,
        mut legs: Vec<Leg>,
    ) -> Self {
        legs.sort();
        StableGraph {
            genera,
            half_edges,
            involution,
            legs,
        }
    }

    /// Edge `k` of `edges` becomes half-edges `2k` and `2k+1`.
    pub fn from_edges(genera: Vec<u32>, edges: &[(usize, usize)], legs: &[(u32, usize)]) -> Self {
        let mut half_edges = Vec::with_capacity(2 * edges.len());
        let mut involution = Vec::with_capacity(2 * edges.len());
        for (k, &(v, w)) in edges.iter().enumerate() {
            half_edges.push(v);
            half_edges.push(w);
            involution.push(2 * k + 1);
            involution.push(2 * k);
        }
        let legs = legs
            .iter()
            .map(|&(marking, vertex)| Leg { marking, vertex })
            .collect();
        Self::new(genera, half_edges, involution, legs)
    }

    /// The one-vertex graph of `M̄_{g,n}` itself.
    pub fn trivial(genus: u32, n: u32) -> Self {
        let legs: Vec<(u32, usize)> = (1..=n).map(|m| (m, 0)).collect();
        Self::from_edges(vec![genus], &[], &legs)
    }

    pub fn genera(&self) -> &[u32] {
        &self.genera
    }

    pub fn vertex_genus(&self, v: usize) -> u32 {
        self.genera[v]
    }

    /// Vertex of each half-edge.
    pub fn half_edges(&self) -> &[usize] {
        &self.half_edges
    }

    pub fn involution(&self) -> &[usize] {
        &self.involution
    }

    pub fn legs(&self) -> &[Leg] {
        &self.legs
    }

    pub fn vertex_of(&self, h: usize) -> usize {
        self.half_edges[h]
    }

    pub fn partner(&self, h: usize) -> usize {
        self.involution[h]
    }

    pub fn num_vertices(&self) -> usize {
        self.genera.len()
    }

    pub fn num_half_edges(&self) -> usize {
        self.half_edges.len()
    }

    pub fn num_edges(&self) -> usize {
        self.half_edges.len() / 2
    }

    pub fn num_legs(&self) -> usize {
        self.legs.len()
    }

    /// Edges as `(h, i(h))` with `h < i(h)`, sorted by `h`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.half_edges.len())
            .filter(|&h| h < self.involution[h])
            .map(|h| (h, self.involution[h]))
            .collect()
    }

    pub fn half_edges_at(&self, v: usize) -> Vec<usize> {
        (0..self.half_edges.len())
            .filter(|&h| self.half_edges[h] == v)
            .collect()
    }

    pub fn legs_at(&self, v: usize) -> Vec<u32> {
        self.legs
            .iter()
            .filter(|l| l.vertex == v)
            .map(|l| l.marking)
            .collect()
    }

    /// Index into `legs()` of the leg carrying `marking`.
    pub fn leg_index(&self, marking: u32) -> Option<usize> {
        self.legs.iter().position(|l| l.marking == marking)
    }

    /// Valence `n(v)`: incident half-edges plus legs.
    pub fn valence(&self, v: usize) -> usize {
        self.half_edges.iter().filter(|&&w| w == v).count()
            + self.legs.iter().filter(|l| l.vertex == v).count()
    }

    /// Legs at `v` by marking, then half-edges at `v` by id. The `j`-th
    /// point is marking `j + 1` of the vertex moduli space.
    pub fn points(&self, v: usize) -> Vec<Point> {
        let mut pts: Vec<Point> = self.legs_at(v).into_iter().map(Point::Leg).collect();
        pts.extend(self.half_edges_at(v).into_iter().map(Point::HalfEdge));
        pts
    }

    pub fn is_connected(&self) -> bool {
        let nv = self.num_vertices();
        if nv == 0 {
            return false;
        }
        let mut uf = UnionFind::new(nv);
        for (h, k) in self.edges() {
            uf.union(self.half_edges[h], self.half_edges[k]);
        }
        let root = uf.find(0);
        (1..nv).all(|v| uf.find(v) == root)
    }

    /// First Betti number `e - v + 1` of a connected graph.
    pub fn h1(&self) -> i64 {
        self.num_edges() as i64 - self.num_vertices() as i64 + 1
    }

    fn arithmetic_genus(&self) -> i64 {
        self.genera.iter().map(|&g| g as i64).sum::<i64>() + self.h1()
    }

    /// Arithmetic genus `Σ g(v) + h¹`.
    pub fn genus(&self) -> Result<u32> {
        let report = self.validate();
        if !report.is_valid() {
            return Err(Error::InvalidGraph(report.to_string()));
        }
        Ok(self.arithmetic_genus() as u32)
    }

    /// `(genus, number of legs)` without validation.
    pub fn ambient(&self) -> Ambient {
        Ambient::new(
            self.arithmetic_genus().max(0) as u32,
            self.legs.len() as u32,
        )
    }

    /// Dimension of `M̄_A = ∏ M̄_{g(v),n(v)}`, i.e. `3g - 3 + n - e`.
    pub fn dimension(&self) -> i64 {
        (0..self.num_vertices())
            .map(|v| 3 * self.genera[v] as i64 - 3 + self.valence(v) as i64)
            .sum()
    }

    pub fn vertex_dimension(&self, v: usize) -> i64 {
        3 * self.genera[v] as i64 - 3 + self.valence(v) as i64
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let nv = self.num_vertices();
        let nh = self.half_edges.len();
        if nv == 0 {
            violations.push(Violation::NoVertices);
            return ValidationReport { violations };
        }
        if self.involution.len() != nh {
            violations.push(Violation::InvolutionLength {
                half_edges: nh,
                involution: self.involution.len(),
            });
            return ValidationReport { violations };
        }
        let mut structural = false;
        for h in 0..nh {
            if self.half_edges[h] >= nv {
                violations.push(Violation::DanglingHalfEdge(h));
                structural = true;
            }
            let k = self.involution[h];
            if k >= nh {
                violations.push(Violation::InvolutionOutOfRange(h));
                structural = true;
            } else if k == h {
                violations.push(Violation::InvolutionFixedPoint(h));
                structural = true;
            } else if self.involution[k] != h {
                violations.push(Violation::InvolutionNotSelfInverse(h));
                structural = true;
            }
        }
        for leg in &self.legs {
            if leg.vertex >= nv {
                violations.push(Violation::DanglingLeg(leg.marking));
                structural = true;
            }
        }
        let markings: Vec<u32> = self.legs.iter().map(|l| l.marking).collect();
        let expected: Vec<u32> = (1..=self.legs.len() as u32).collect();
        if markings != expected {
            violations.push(Violation::LegLabels(markings));
        }
        if structural {
            return ValidationReport { violations };
        }
        if !self.is_connected() {
            violations.push(Violation::Disconnected);
        }
        for v in 0..nv {
            let n = self.valence(v) as i64;
            if 2 * self.genera[v] as i64 - 2 + n <= 0 {
                violations.push(Violation::Unstable {
                    vertex: v,
                    genus: self.genera[v],
                    valence: n as usize,
                });
            }
        }
        ValidationReport { violations }
    }

    /// Contracts the given edges (indices into [`StableGraph::edges`]).
    pub fn contract_edges(&self, edges: &[usize]) -> Result<StableGraph> {
        let all = self.edges();
        let mut halves = Vec::with_capacity(edges.len());
        for &e in edges {
            let &(h, _) = all
                .get(e)
                .ok_or_else(|| Error::Input(format!("edge index {e} out of range")))?;
            halves.push(h);
        }
        Ok(self.contract(&halves).graph)
    }

    /// Contracts the edges containing the given half-edges.
    ///
    /// Merged vertices add their genera; every contracted edge closing a
    /// cycle adds one to the genus, so the arithmetic genus is preserved.
    pub fn contract(&self, edge_halves: &[usize]) -> Contraction {
        let nv = self.num_vertices();
        let mut contracted = vec![false; self.half_edges.len()];
        let mut uf = UnionFind::new(nv);
        for &h in edge_halves {
            let k = self.involution[h];
            contracted[h] = true;
            contracted[k] = true;
        }
        for h in 0..self.half_edges.len() {
            if contracted[h] && h < self.involution[h] {
                uf.union(self.half_edges[h], self.half_edges[self.involution[h]]);
            }
        }
        let mut vertex_map = vec![usize::MAX; nv];
        let mut root_index = vec![usize::MAX; nv];
        let mut new_genera: Vec<i64> = Vec::new();
        let mut comp_vertices: Vec<i64> = Vec::new();
        for v in 0..nv {
            let r = uf.find(v);
            if root_index[r] == usize::MAX {
                root_index[r] = new_genera.len();
                new_genera.push(0);
                comp_vertices.push(0);
            }
            let idx = root_index[r];
            vertex_map[v] = idx;
            new_genera[idx] += self.genera[v] as i64;
            comp_vertices[idx] += 1;
        }
        let mut comp_edges = vec![0i64; new_genera.len()];
        for h in 0..self.half_edges.len() {
            if contracted[h] && h < self.involution[h] {
                comp_edges[vertex_map[self.half_edges[h]]] += 1;
            }
        }
        let genera: Vec<u32> = new_genera
            .iter()
            .enumerate()
            .map(|(i, &g)| (g + comp_edges[i] - comp_vertices[i] + 1) as u32)
            .collect();
        let mut half_edge_map = vec![None; self.half_edges.len()];
        let mut next = 0;
        for (h, slot) in half_edge_map.iter_mut().enumerate() {
            if !contracted[h] {
                *slot = Some(next);
                next += 1;
            }
        }
        let mut half_edges = vec![0; next];
        let mut involution = vec![0; next];
        for h in 0..self.half_edges.len() {
            if let Some(nh) = half_edge_map[h] {
                half_edges[nh] = vertex_map[self.half_edges[h]];
                involution[nh] = half_edge_map[self.involution[h]].expect("paired half-edge");
            }
        }
        let legs = self
            .legs
            .iter()
            .map(|l| Leg {
                marking: l.marking,
                vertex: vertex_map[l.vertex],
            })
            .collect();
        Contraction {
            graph: StableGraph::new(genera, half_edges, involution, legs),
            vertex_map,
            half_edge_map,
        }
    }

    /// Edges whose endpoints coincide.
    pub fn is_self_edge(&self, h: usize) -> bool {
        self.half_edges[h] == self.half_edges[self.involution[h]]
    }

    pub fn leg_markings(&self) -> BTreeSet<u32> {
        self.legs.iter().map(|l| l.marking).collect()
    }
}

impl fmt::Display for StableGraph {
    /// `V(g0,g1,..) E(v-w,..) L(m:v,..)` with edges listed in half-edge order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let genera: Vec<String> = self.genera.iter().map(|g| g.to_string()).collect();
        let edges: Vec<String> = self
            .edges()
            .iter()
            .map(|&(h, k)| format!("{}-{}", self.half_edges[h], self.half_edges[k]))
            .collect();
        let legs: Vec<String> = self
            .legs
            .iter()
            .map(|l| format!("{}:{}", l.marking, l.vertex))
            .collect();
        write!(
            f,
            "V({}) E({}) L({})",
            genera.join(","),
            edges.join(","),
            legs.join(",")
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NoVertices,
    InvolutionLength {
        half_edges: usize,
        involution: usize,
    },
    DanglingHalfEdge(usize),
    DanglingLeg(u32),
    InvolutionOutOfRange(usize),
    InvolutionFixedPoint(usize),
    InvolutionNotSelfInverse(usize),
    LegLabels(Vec<u32>),
    Disconnected,
    Unstable {
        vertex: usize,
        genus: u32,
        valence: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoVertices => write!(f, "graph has no vertices"),
            Violation::InvolutionLength {
                half_edges,
                involution,
            } => write!(
                f,
                "involution has {involution} entries for {half_edges} half-edges"
            ),
            Violation::DanglingHalfEdge(h) => write!(f, "half-edge {h} refers to a missing vertex"),
            Violation::DanglingLeg(m) => write!(f, "leg {m} refers to a missing vertex"),
            Violation::InvolutionOutOfRange(h) => {
                write!(f, "involution of half-edge {h} is out of range")
            }
            Violation::InvolutionFixedPoint(h) => write!(f, "half-edge {h} is a fixed point"),
            Violation::InvolutionNotSelfInverse(h) => {
                write!(f, "involution is not self-inverse at half-edge {h}")
            }
            Violation::LegLabels(m) => write!(f, "leg markings {m:?} are not 1..n"),
            Violation::Disconnected => write!(f, "graph is disconnected"),
            Violation::Unstable {
                vertex,
                genus,
                valence,
            } => write!(
                f,
                "vertex {vertex} (genus {genus}, valence {valence}) is unstable"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}
