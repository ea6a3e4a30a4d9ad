//! Canonical labelling of colored stable graphs.
//!
//! Vertices are first split into cells by iterated refinement of
//! `(genus, color, legs, neighbourhood)` invariants; the canonical labelling
//! is the lexicographically smallest encoding over all orderings that respect
//! the cells. Stable graphs have at most `2g - 2 + n` vertices, so the
//! backtracking stays small. Legs are never permuted.

use std::collections::BTreeMap;

use crate::graph::{Leg, StableGraph};

/// Colors attached to a graph: per vertex, per half-edge, per leg (in the
/// order of `graph.legs()`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Colors {
    pub vertex: Vec<Vec<u32>>,
    pub half: Vec<u32>,
    pub leg: Vec<u32>,
}

impl Colors {
    pub fn blank(g: &StableGraph) -> Self {
        Colors {
            vertex: vec![Vec::new(); g.num_vertices()],
            half: vec![0; g.num_half_edges()],
            leg: vec![0; g.num_legs()],
        }
    }
}

/// A map between two graphs with the same legs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Morphism {
    /// Source vertex -> target vertex.
    pub vertex: Vec<usize>,
    /// Source half-edge -> target half-edge.
    pub half: Vec<usize>,
}

impl Morphism {
    pub fn inverse(&self) -> Morphism {
        let mut vertex = vec![0; self.vertex.len()];
        for (v, &w) in self.vertex.iter().enumerate() {
            vertex[w] = v;
        }
        let mut half = vec![0; self.half.len()];
        for (h, &k) in self.half.iter().enumerate() {
            half[k] = h;
        }
        Morphism { vertex, half }
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &Morphism) -> Morphism {
        Morphism {
            vertex: self.vertex.iter().map(|&v| other.vertex[v]).collect(),
            half: self.half.iter().map(|&h| other.half[h]).collect(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Canon {
    pub graph: StableGraph,
    pub colors: Colors,
    /// Original -> canonical.
    pub map: Morphism,
    /// Size of the colored automorphism group (half-edge level).
    pub automorphisms: u64,
}

type EdgeEnd = (usize, u32);
type EdgeKey = (EdgeEnd, EdgeEnd);

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Key {
    legs: Vec<(usize, u32)>,
    edges: Vec<EdgeKey>,
}

fn oriented(a: EdgeEnd, b: EdgeEnd) -> (EdgeKey, bool) {
    if a <= b {
        ((a, b), false)
    } else {
        ((b, a), true)
    }
}

fn refine(g: &StableGraph, colors: &Colors) -> Vec<usize> {
    let nv = g.num_vertices();
    let mut legs_at: Vec<Vec<(u32, u32)>> = vec![Vec::new(); nv];
    for (i, leg) in g.legs().iter().enumerate() {
        legs_at[leg.vertex].push((leg.marking, colors.leg[i]));
    }
    let initial: Vec<(u32, &Vec<u32>, &Vec<(u32, u32)>)> = (0..nv)
        .map(|v| (g.vertex_genus(v), &colors.vertex[v], &legs_at[v]))
        .collect();
    let mut rank = ranks(&initial);
    let mut classes = count_classes(&rank);
    loop {
        let sigs: Vec<(usize, Vec<(usize, u32, u32)>)> = (0..nv)
            .map(|v| {
                let mut nb: Vec<(usize, u32, u32)> = g
                    .half_edges_at(v)
                    .into_iter()
                    .map(|h| {
                        let k = g.partner(h);
                        (rank[g.vertex_of(k)], colors.half[h], colors.half[k])
                    })
                    .collect();
                nb.sort_unstable();
                (rank[v], nb)
            })
            .collect();
        let next = ranks(&sigs);
        let c = count_classes(&next);
        rank = next;
        if c == classes {
            break;
        }
        classes = c;
    }
    rank
}

fn ranks<T: Ord>(sigs: &[T]) -> Vec<usize> {
    let mut sorted: Vec<&T> = sigs.iter().collect();
    sorted.sort();
    sorted.dedup();
    sigs.iter()
        .map(|s| sorted.binary_search(&s).expect("present"))
        .collect()
}

fn count_classes(rank: &[usize]) -> usize {
    let mut r = rank.to_vec();
    r.sort_unstable();
    r.dedup();
    r.len()
}

/// All orderings (position -> vertex) compatible with the refined cells.
fn cell_orderings(rank: &[usize]) -> Vec<Vec<usize>> {
    let mut cells: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (v, &r) in rank.iter().enumerate() {
        cells.entry(r).or_default().push(v);
    }
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    for cell in cells.values() {
        let perms = permutations(cell);
        let mut next = Vec::with_capacity(out.len() * perms.len());
        for prefix in &out {
            for p in &perms {
                let mut o = prefix.clone();
                o.extend_from_slice(p);
                next.push(o);
            }
        }
        out = next;
    }
    out
}

pub(crate) fn permutations<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x.clone());
            out.push(p);
        }
    }
    out
}

fn key_for(g: &StableGraph, colors: &Colors, pos: &[usize]) -> Key {
    let legs = g
        .legs()
        .iter()
        .enumerate()
        .map(|(i, l)| (pos[l.vertex], colors.leg[i]))
        .collect();
    let mut edges: Vec<EdgeKey> = g
        .edges()
        .iter()
        .map(|&(h, k)| {
            oriented(
                (pos[g.vertex_of(h)], colors.half[h]),
                (pos[g.vertex_of(k)], colors.half[k]),
            )
            .0
        })
        .collect();
    edges.sort_unstable();
    Key { legs, edges }
}

fn inverse_perm(order: &[usize]) -> Vec<usize> {
    let mut pos = vec![0; order.len()];
    for (p, &v) in order.iter().enumerate() {
        pos[v] = p;
    }
    pos
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Canonical form of a colored graph together with its automorphism count.
pub fn canonize(g: &StableGraph, colors: &Colors) -> Canon {
    let rank = refine(g, colors);
    let mut best: Option<(Key, Vec<usize>)> = None;
    let mut count = 0u64;
    for order in cell_orderings(&rank) {
        let pos = inverse_perm(&order);
        let key = key_for(g, colors, &pos);
        match &best {
            Some((b, _)) if key > *b => {}
            Some((b, _)) if key == *b => count += 1,
            _ => {
                best = Some((key, pos));
                count = 1;
            }
        }
    }
    let (key, pos) = best.expect("at least one ordering");

    let nv = g.num_vertices();
    let mut genera = vec![0; nv];
    let mut vcolors = vec![Vec::new(); nv];
    for v in 0..nv {
        genera[pos[v]] = g.vertex_genus(v);
        vcolors[pos[v]] = colors.vertex[v].clone();
    }
    // Sort old edges by their oriented key; edge k of the result gets
    // half-edges 2k (smaller end) and 2k+1.
    let mut old_edges: Vec<(EdgeKey, usize, usize)> = g
        .edges()
        .iter()
        .map(|&(h, k)| {
            let (key, swapped) = oriented(
                (pos[g.vertex_of(h)], colors.half[h]),
                (pos[g.vertex_of(k)], colors.half[k]),
            );
            if swapped {
                (key, k, h)
            } else {
                (key, h, k)
            }
        })
        .collect();
    old_edges.sort_by_key(|a| a.0);
    let nh = g.num_half_edges();
    let mut half_map = vec![0; nh];
    let mut half_edges = vec![0; nh];
    let mut involution = vec![0; nh];
    let mut hcolors = vec![0; nh];
    for (k, &(ek, a, b)) in old_edges.iter().enumerate() {
        half_map[a] = 2 * k;
        half_map[b] = 2 * k + 1;
        half_edges[2 * k] = ek.0 .0;
        half_edges[2 * k + 1] = ek.1 .0;
        hcolors[2 * k] = ek.0 .1;
        hcolors[2 * k + 1] = ek.1 .1;
        involution[2 * k] = 2 * k + 1;
        involution[2 * k + 1] = 2 * k;
    }
    let legs: Vec<Leg> = g
        .legs()
        .iter()
        .map(|l| Leg {
            marking: l.marking,
            vertex: pos[l.vertex],
        })
        .collect();
    let graph = StableGraph::new(genera, half_edges, involution, legs);

    let mut auts = count;
    let mut run = 1usize;
    for i in 0..key.edges.len() {
        let e = key.edges[i];
        if i + 1 < key.edges.len() && key.edges[i + 1] == e {
            run += 1;
        } else {
            auts *= factorial(run);
            run = 1;
        }
        if e.0 == e.1 {
            auts *= 2;
        }
    }

    Canon {
        graph,
        colors: Colors {
            vertex: vcolors,
            half: hcolors,
            leg: colors.leg.clone(),
        },
        map: Morphism {
            vertex: pos,
            half: half_map,
        },
        automorphisms: auts,
    }
}

/// All colored automorphisms of a graph as half-edge permutations.
pub fn automorphisms(g: &StableGraph, colors: &Colors) -> Vec<Morphism> {
    let rank = refine(g, colors);
    let own = key_for(g, colors, &(0..g.num_vertices()).collect::<Vec<_>>());
    let edges = g.edges();
    let mut out = Vec::new();
    for order in cell_orderings(&rank) {
        let pos = inverse_perm(&order);
        if key_for(g, colors, &pos) != own {
            continue;
        }
        // Targets grouped by their oriented end data.
        let mut targets: BTreeMap<EdgeKey, Vec<(usize, usize)>> = BTreeMap::new();
        for &(h, k) in &edges {
            let (key, swapped) = oriented(
                (g.vertex_of(h), colors.half[h]),
                (g.vertex_of(k), colors.half[k]),
            );
            targets
                .entry(key)
                .or_default()
                .push(if swapped { (k, h) } else { (h, k) });
        }
        let mut sources: BTreeMap<EdgeKey, Vec<(usize, usize)>> = BTreeMap::new();
        for &(h, k) in &edges {
            let (key, swapped) = oriented(
                (pos[g.vertex_of(h)], colors.half[h]),
                (pos[g.vertex_of(k)], colors.half[k]),
            );
            sources
                .entry(key)
                .or_default()
                .push(if swapped { (k, h) } else { (h, k) });
        }
        let mut partial: Vec<Vec<usize>> = vec![vec![usize::MAX; g.num_half_edges()]];
        for (key, src) in &sources {
            let tgt = &targets[key];
            let flippable = key.0 == key.1;
            let mut next = Vec::new();
            for perm in permutations(&(0..tgt.len()).collect::<Vec<_>>()) {
                let n_flip = if flippable { 1usize << src.len() } else { 1 };
                for flips in 0..n_flip {
                    for base in &partial {
                        let mut half = base.clone();
                        for (i, &(a, b)) in src.iter().enumerate() {
                            let (x, y) = tgt[perm[i]];
                            if flips >> i & 1 == 1 {
                                half[a] = y;
                                half[b] = x;
                            } else {
                                half[a] = x;
                                half[b] = y;
                            }
                        }
                        next.push(half);
                    }
                }
            }
            partial = next;
        }
        for half in partial {
            out.push(Morphism {
                vertex: pos.clone(),
                half,
            });
        }
    }
    out
}

/// All color-preserving isomorphisms `a -> b` fixing legs.
pub fn isomorphisms(a: &StableGraph, ca: &Colors, b: &StableGraph, cb: &Colors) -> Vec<Morphism> {
    if a.num_vertices() != b.num_vertices()
        || a.num_half_edges() != b.num_half_edges()
        || a.legs()
            .iter()
            .map(|l| l.marking)
            .ne(b.legs().iter().map(|l| l.marking))
    {
        return Vec::new();
    }
    let x = canonize(a, ca);
    let y = canonize(b, cb);
    if x.graph != y.graph || x.colors != y.colors {
        return Vec::new();
    }
    let back = y.map.inverse();
    automorphisms(&x.graph, &x.colors)
        .iter()
        .map(|alpha| x.map.then(alpha).then(&back))
        .collect()
}

/// Undecorated automorphism count.
pub fn automorphism_count(g: &StableGraph) -> u64 {
    canonize(g, &Colors::blank(g)).automorphisms
}

/// Canonical representative of the undecorated graph.
pub fn canonical_graph(g: &StableGraph) -> StableGraph {
    canonize(g, &Colors::blank(g)).graph
}
