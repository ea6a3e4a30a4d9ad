//! Grafting factor graphs into the vertices of a base graph.
//!
//! The factor at vertex `v` of the base graph `A` is a stable graph whose
//! legs `1..=n(v)` stand for the points of `v` (see [`StableGraph::points`]).
//! The glued graph `C` lists the factors' vertices and internal half-edges
//! factor by factor, followed by the half-edges of `A`.

use crate::graph::{Leg, Point, StableGraph};
use crate::strata::{Decoration, KappaMonomial};

pub(crate) struct Glued {
    pub graph: StableGraph,
    /// C vertex -> A vertex.
    pub owner: Vec<usize>,
    pub vertex_offset: Vec<usize>,
    pub half_offset: Vec<usize>,
    /// A half-edge -> C half-edge.
    pub a_half: Vec<usize>,
    points: Vec<Vec<Point>>,
}

pub(crate) fn glue(a: &StableGraph, factors: &[&StableGraph]) -> Glued {
    debug_assert_eq!(a.num_vertices(), factors.len());
    let points: Vec<Vec<Point>> = (0..a.num_vertices()).map(|v| a.points(v)).collect();
    let mut genera = Vec::new();
    let mut owner = Vec::new();
    let mut vertex_offset = Vec::with_capacity(factors.len());
    let mut half_offset = Vec::with_capacity(factors.len());
    let mut internal_total = 0;
    for (v, f) in factors.iter().enumerate() {
        vertex_offset.push(genera.len());
        half_offset.push(internal_total);
        genera.extend_from_slice(f.genera());
        owner.extend(std::iter::repeat_n(v, f.num_vertices()));
        internal_total += f.num_half_edges();
    }
    let nh = internal_total + a.num_half_edges();
    let mut half_edges = vec![0; nh];
    let mut involution = vec![0; nh];
    for (v, f) in factors.iter().enumerate() {
        for h in 0..f.num_half_edges() {
            half_edges[half_offset[v] + h] = vertex_offset[v] + f.vertex_of(h);
            involution[half_offset[v] + h] = half_offset[v] + f.partner(h);
        }
    }
    let a_half: Vec<usize> = (0..a.num_half_edges())
        .map(|h| internal_total + h)
        .collect();
    let mut legs = Vec::new();
    for (v, f) in factors.iter().enumerate() {
        for leg in f.legs() {
            let local = vertex_offset[v] + leg.vertex;
            match points[v][leg.marking as usize - 1] {
                Point::Leg(m) => legs.push(Leg {
                    marking: m,
                    vertex: local,
                }),
                Point::HalfEdge(h) => {
                    half_edges[a_half[h]] = local;
                    involution[a_half[h]] = a_half[a.partner(h)];
                }
            }
        }
    }
    Glued {
        graph: StableGraph::new(genera, half_edges, involution, legs),
        owner,
        vertex_offset,
        half_offset,
        a_half,
        points,
    }
}

impl Glued {
    /// C half-edges of the edges internal to the factors (one per edge).
    pub fn internal_edge_halves(&self) -> Vec<usize> {
        let base = self
            .a_half
            .first()
            .copied()
            .unwrap_or(self.graph.num_half_edges());
        (0..base).filter(|&h| h < self.graph.partner(h)).collect()
    }

    /// Restricts a decoration of C to the factors.
    pub fn split(&self, factors: &[&StableGraph], deco: &Decoration) -> Vec<Decoration> {
        factors
            .iter()
            .enumerate()
            .map(|(v, f)| {
                let psi_half = (0..f.num_half_edges())
                    .map(|h| deco.psi_half[self.half_offset[v] + h])
                    .collect();
                let psi_leg = f
                    .legs()
                    .iter()
                    .map(|leg| self.point_psi(v, leg.marking, deco))
                    .collect();
                let kappa = (0..f.num_vertices())
                    .map(|u| deco.kappa[self.vertex_offset[v] + u].clone())
                    .collect();
                Decoration {
                    psi_half,
                    psi_leg,
                    kappa,
                }
            })
            .collect()
    }

    fn point_psi(&self, v: usize, marking: u32, deco: &Decoration) -> u32 {
        match self.points[v][marking as usize - 1] {
            Point::Leg(m) => deco.psi_leg[self.graph.leg_index(m).expect("leg")],
            Point::HalfEdge(h) => deco.psi_half[self.a_half[h]],
        }
    }

    /// Assembles factor decorations into a decoration of C.
    pub fn join(&self, factors: &[&StableGraph], decos: &[Decoration]) -> Decoration {
        let c = &self.graph;
        let mut out = Decoration {
            psi_half: vec![0; c.num_half_edges()],
            psi_leg: vec![0; c.num_legs()],
            kappa: vec![KappaMonomial::one(); c.num_vertices()],
        };
        for (v, f) in factors.iter().enumerate() {
            let d = &decos[v];
            for h in 0..f.num_half_edges() {
                out.psi_half[self.half_offset[v] + h] = d.psi_half[h];
            }
            for u in 0..f.num_vertices() {
                out.kappa[self.vertex_offset[v] + u] = d.kappa[u].clone();
            }
            for (i, leg) in f.legs().iter().enumerate() {
                match self.points[v][leg.marking as usize - 1] {
                    Point::Leg(m) => {
                        out.psi_leg[c.leg_index(m).expect("leg")] = d.psi_leg[i];
                    }
                    Point::HalfEdge(h) => out.psi_half[self.a_half[h]] = d.psi_leg[i],
                }
            }
        }
        out
    }
}
