use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tautring::structures::degenerations;
use tautring::{Ambient, Leg, StableGraph};

/// A stable graph reached from `M̄_{g,n}` by the degenerations picked out by
/// `choices`.
pub fn walk(genus: u32, n: u32, choices: &[u16]) -> Option<StableGraph> {
    if !Ambient::new(genus, n).is_stable() {
        return None;
    }
    let mut g = StableGraph::trivial(genus, n);
    for &c in choices {
        let next = degenerations(&g);
        if next.is_empty() {
            break;
        }
        g = next[c as usize % next.len()].clone();
    }
    Some(g)
}

/// The same graph with vertices and half-edges renumbered by random
/// permutations drawn from `seed`.
pub fn relabel(g: &StableGraph, seed: u64) -> StableGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pv: Vec<usize> = (0..g.num_vertices()).collect();
    let mut ph: Vec<usize> = (0..g.num_half_edges()).collect();
    pv.shuffle(&mut rng);
    ph.shuffle(&mut rng);
    let mut genera = vec![0; pv.len()];
    for (v, &p) in pv.iter().enumerate() {
        genera[p] = g.vertex_genus(v);
    }
    let mut half_edges = vec![0; ph.len()];
    let mut involution = vec![0; ph.len()];
    for (h, &p) in ph.iter().enumerate() {
        half_edges[p] = pv[g.vertex_of(h)];
        involution[p] = ph[g.partner(h)];
    }
    let legs = g
        .legs()
        .iter()
        .map(|l| Leg {
            marking: l.marking,
            vertex: pv[l.vertex],
        })
        .collect();
    StableGraph::new(genera, half_edges, involution, legs)
}
