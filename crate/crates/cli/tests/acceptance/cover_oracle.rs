//! Exhaustive assignment search for double covers of a small target graph.
//!
//! Every vertex is either split (two degree-1 preimages) or not; every edge
//! fiber is one ramified edge or two étale edges with arbitrary preimage
//! endpoints; every leg fiber is placed on arbitrary preimages. Source
//! genera follow from local Riemann-Hurwitz. Survivors of `validate_cover`
//! are deduplicated by canonical key.

use std::collections::BTreeMap;

use tautring::canon::Colors;
use tautring::covers::validate_cover;
use tautring::{CoverGraph, EdgeFiber, LegFiber, StableGraph};

fn product<T: Clone>(options: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    for opts in options {
        let mut next = Vec::new();
        for prefix in &out {
            for o in opts {
                let mut p = prefix.clone();
                p.push(o.clone());
                next.push(p);
            }
        }
        out = next;
    }
    out
}

#[derive(Clone)]
enum EdgeChoice {
    Ramified(usize, usize),
    Etale([(usize, usize); 2]),
}

#[derive(Clone)]
enum LegChoice {
    Branch(usize),
    Etale(usize, usize),
}

pub fn brute_force_covers(
    target: &StableGraph,
    b: u32,
    k: u32,
) -> BTreeMap<(StableGraph, Colors), CoverGraph> {
    let nv = target.num_vertices();
    let t_edges = target.edges();
    let mut found = BTreeMap::new();
    for mask in 0u32..(1 << nv) {
        let split: Vec<bool> = (0..nv).map(|v| mask >> v & 1 == 1).collect();
        let mut pre: Vec<Vec<usize>> = Vec::new();
        let mut vertex_map = Vec::new();
        for v in 0..nv {
            let count = if split[v] { 2 } else { 1 };
            pre.push((vertex_map.len()..vertex_map.len() + count).collect());
            vertex_map.extend(std::iter::repeat_n(v, count));
        }
        let edge_options: Vec<Vec<EdgeChoice>> = t_edges
            .iter()
            .map(|&(h, k2)| {
                let (pv, pw) = (&pre[target.vertex_of(h)], &pre[target.vertex_of(k2)]);
                let mut opts = Vec::new();
                let ends: Vec<(usize, usize)> = pv
                    .iter()
                    .flat_map(|&x| pw.iter().map(move |&y| (x, y)))
                    .collect();
                for &e in &ends {
                    opts.push(EdgeChoice::Ramified(e.0, e.1));
                }
                // The two lifts of an étale edge are unordered.
                for (i, &e1) in ends.iter().enumerate() {
                    for &e2 in &ends[i..] {
                        opts.push(EdgeChoice::Etale([e1, e2]));
                    }
                }
                opts
            })
            .collect();
        let leg_options: Vec<Vec<LegChoice>> = target
            .legs()
            .iter()
            .map(|l| {
                let p = &pre[l.vertex];
                if l.marking <= b {
                    p.iter().map(|&w| LegChoice::Branch(w)).collect()
                } else {
                    p.iter()
                        .flat_map(|&x| p.iter().map(move |&y| LegChoice::Etale(x, y)))
                        .collect()
                }
            })
            .collect();
        for edges in product(&edge_options) {
            for legs in product(&leg_options) {
                let Some(cg) = assemble(target, b, k, &split, &vertex_map, &edges, &legs) else {
                    continue;
                };
                if validate_cover(&cg).is_valid() {
                    found.entry(cg.canonical_key()).or_insert(cg);
                }
            }
        }
    }
    found
}

fn assemble(
    target: &StableGraph,
    b: u32,
    k: u32,
    split: &[bool],
    vertex_map: &[usize],
    edges: &[EdgeChoice],
    legs: &[LegChoice],
) -> Option<CoverGraph> {
    let mut s_edges = Vec::new();
    let mut edge_fibers = Vec::new();
    let mut ramified_ends = vec![0i64; target.num_vertices()];
    for (choice, &(h, k2)) in edges.iter().zip(&target.edges()) {
        match *choice {
            EdgeChoice::Ramified(x, y) => {
                ramified_ends[target.vertex_of(h)] += 1;
                ramified_ends[target.vertex_of(k2)] += 1;
                edge_fibers.push(EdgeFiber::Ramified(s_edges.len()));
                s_edges.push((x, y));
            }
            EdgeChoice::Etale([e1, e2]) => {
                edge_fibers.push(EdgeFiber::Etale([s_edges.len(), s_edges.len() + 1]));
                s_edges.extend([e1, e2]);
            }
        }
    }
    let mut s_legs = Vec::new();
    let mut leg_fibers = Vec::new();
    let mut branch = vec![0i64; target.num_vertices()];
    for (choice, leg) in legs.iter().zip(target.legs()) {
        match *choice {
            LegChoice::Branch(w) => {
                branch[leg.vertex] += 1;
                leg_fibers.push(LegFiber::Branch(w));
            }
            LegChoice::Etale(x, y) => {
                let i = leg.marking - b;
                s_legs.extend([(i, x), (k + i, y)]);
                leg_fibers.push(LegFiber::Etale([i, k + i]));
            }
        }
    }
    let mut genera = Vec::new();
    for &v in vertex_map {
        let gv = target.vertex_genus(v) as i64;
        let g = if split[v] {
            gv
        } else {
            let r = branch[v] + ramified_ends[v];
            if r % 2 == 1 {
                return None;
            }
            2 * gv - 1 + r / 2
        };
        if g < 0 {
            return None;
        }
        genera.push(g as u32);
    }
    Some(CoverGraph {
        target: target.clone(),
        source: StableGraph::from_edges(genera, &s_edges, &s_legs),
        vertex_map: vertex_map.to_vec(),
        edge_fibers,
        leg_fibers,
    })
}
