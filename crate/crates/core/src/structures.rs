//! Specializations between stable graphs: the stable graphs of an ambient
//! space, A-structures, and generic (A,B)-graphs.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use itertools::Itertools;

use crate::canon::{self, Colors, Morphism};
use crate::error::{Ambient, Error, Result};
use crate::glue::{glue, Glued};
use crate::graph::{Contraction, Leg, StableGraph};

type Levels = Vec<Vec<StableGraph>>;

fn level_cache() -> &'static Mutex<HashMap<Ambient, Arc<Levels>>> {
    static CACHE: OnceLock<Mutex<HashMap<Ambient, Arc<Levels>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Canonical representatives of all stable graphs of `M̄_{g,n}` with at
/// most `max_edges` edges, ordered by edge count then canonical form.
pub fn stable_graphs(ambient: Ambient, max_edges: usize) -> Vec<StableGraph> {
    by_edge_count(ambient, max_edges)
        .iter()
        .take(max_edges + 1)
        .flatten()
        .cloned()
        .collect()
}

/// Levels `0..=max_edges` (possibly more) of the degeneration tree.
pub(crate) fn by_edge_count(ambient: Ambient, max_edges: usize) -> Arc<Levels> {
    if !ambient.is_stable() {
        return Arc::new(Vec::new());
    }
    let top = (ambient.dimension().max(0) as usize).min(max_edges);
    let cached = level_cache().lock().expect("cache").get(&ambient).cloned();
    let mut levels: Levels = match cached {
        Some(l) if l.len() > top => return l,
        Some(l) => (*l).clone(),
        None => vec![vec![StableGraph::trivial(ambient.genus, ambient.n)]],
    };
    while levels.len() <= top {
        let mut next: Vec<StableGraph> = levels
            .last()
            .expect("level")
            .iter()
            .flat_map(degenerations)
            .map(|g| canon::canonical_graph(&g))
            .collect();
        next.sort();
        next.dedup();
        levels.push(next);
    }
    let levels = Arc::new(levels);
    level_cache()
        .lock()
        .expect("cache")
        .insert(ambient, levels.clone());
    levels
}

/// All graphs obtained by adding one edge: a self-loop at a vertex of
/// positive genus, or a splitting of a vertex in two.
pub fn degenerations(g: &StableGraph) -> Vec<StableGraph> {
    let mut out = Vec::new();
    let nh = g.num_half_edges();
    for v in 0..g.num_vertices() {
        let gv = g.vertex_genus(v);
        if gv > 0 {
            let mut genera = g.genera().to_vec();
            genera[v] -= 1;
            let mut half_edges = g.half_edges().to_vec();
            half_edges.extend([v, v]);
            let mut involution = g.involution().to_vec();
            involution.extend([nh + 1, nh]);
            out.push(StableGraph::new(
                genera,
                half_edges,
                involution,
                g.legs().to_vec(),
            ));
        }
        let legs_here: Vec<usize> = (0..g.num_legs())
            .filter(|&i| g.legs()[i].vertex == v)
            .collect();
        let halves_here = g.half_edges_at(v);
        let np = legs_here.len() + halves_here.len();
        let nv = g.num_vertices();
        for moved in 0u64..(1 << np) {
            let n_moved = moved.count_ones() as i64;
            let n_kept = np as i64 - n_moved;
            for g1 in 0..=gv {
                let g0 = gv - g1;
                if 2 * g1 as i64 - 1 + n_moved <= 0 || 2 * g0 as i64 - 1 + n_kept <= 0 {
                    continue;
                }
                let mut genera = g.genera().to_vec();
                genera[v] = g0;
                genera.push(g1);
                let mut legs = g.legs().to_vec();
                for (bit, &i) in legs_here.iter().enumerate() {
                    if moved >> bit & 1 == 1 {
                        legs[i].vertex = nv;
                    }
                }
                let mut half_edges = g.half_edges().to_vec();
                for (bit, &h) in halves_here.iter().enumerate() {
                    if moved >> (bit + legs_here.len()) & 1 == 1 {
                        half_edges[h] = nv;
                    }
                }
                half_edges.extend([v, nv]);
                let mut involution = g.involution().to_vec();
                involution.extend([nh + 1, nh]);
                out.push(StableGraph::new(genera, half_edges, involution, legs));
            }
        }
    }
    out
}

/// A realization of `target` as a specialization of `base`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AStructure {
    pub base: StableGraph,
    pub target: StableGraph,
    /// Indices into `target.edges()`.
    pub contracted_edges: Vec<usize>,
    /// Target vertex -> base vertex.
    pub vertex_map: Vec<usize>,
    /// Base half-edge -> target half-edge.
    pub half_edge_map: Vec<usize>,
}

impl AStructure {
    fn from_contraction(
        base: &StableGraph,
        target: &StableGraph,
        contracted_edges: Vec<usize>,
        contraction: &Contraction,
        iso: &Morphism,
    ) -> Self {
        let vertex_map = contraction
            .vertex_map
            .iter()
            .map(|&w| iso.vertex[w])
            .collect();
        let mut half_edge_map = vec![0; base.num_half_edges()];
        for (h, img) in contraction.half_edge_map.iter().enumerate() {
            if let Some(k) = img {
                half_edge_map[iso.half[*k]] = h;
            }
        }
        AStructure {
            base: base.clone(),
            target: target.clone(),
            contracted_edges,
            vertex_map,
            half_edge_map,
        }
    }

    /// Checks that contracting `contracted_edges` gives `base` through the
    /// recorded correspondence.
    pub fn verify(&self) -> bool {
        let (c, a) = (&self.target, &self.base);
        let edges = c.edges();
        if self.contracted_edges.iter().any(|&e| e >= edges.len())
            || self.vertex_map.len() != c.num_vertices()
            || self.half_edge_map.len() != a.num_half_edges()
        {
            return false;
        }
        let mut contracted = vec![false; c.num_half_edges()];
        for &e in &self.contracted_edges {
            contracted[edges[e].0] = true;
            contracted[edges[e].1] = true;
        }
        let mut hit = vec![false; c.num_half_edges()];
        for h in 0..a.num_half_edges() {
            let k = self.half_edge_map[h];
            if k >= c.num_half_edges() || contracted[k] || hit[k] {
                return false;
            }
            hit[k] = true;
            if self.half_edge_map[a.partner(h)] != c.partner(k)
                || self.vertex_map[c.vertex_of(k)] != a.vertex_of(h)
            {
                return false;
            }
        }
        if hit.iter().zip(&contracted).any(|(&h, &x)| !h && !x) {
            return false;
        }
        // Contracted edges stay inside one fiber; fibers are connected with
        // the right genus.
        let halves: Vec<usize> = self.contracted_edges.iter().map(|&e| edges[e].0).collect();
        let contraction = c.contract(&halves);
        let mut fiber_of_component = vec![usize::MAX; contraction.graph.num_vertices()];
        for (u, &comp) in contraction.vertex_map.iter().enumerate() {
            let w = self.vertex_map[u];
            if w >= a.num_vertices() {
                return false;
            }
            if fiber_of_component[comp] == usize::MAX {
                fiber_of_component[comp] = w;
            } else if fiber_of_component[comp] != w {
                return false;
            }
        }
        let mut seen = vec![false; a.num_vertices()];
        for (comp, &w) in fiber_of_component.iter().enumerate() {
            if seen[w] || contraction.graph.vertex_genus(comp) != a.vertex_genus(w) {
                return false;
            }
            seen[w] = true;
        }
        if seen.iter().any(|s| !s) {
            return false;
        }
        c.legs()
            .iter()
            .zip(a.legs())
            .all(|(lc, la)| lc.marking == la.marking && self.vertex_map[lc.vertex] == la.vertex)
    }
}

fn check_same_ambient(a: &StableGraph, b: &StableGraph) -> Result<()> {
    a.genus()?;
    b.genus()?;
    if a.ambient() != b.ambient() || a.leg_markings() != b.leg_markings() {
        return Err(Error::GraphMismatch);
    }
    Ok(())
}

/// One structure per edge set `S` of `c` with `c/S ≅ a`, each carrying one
/// witness correspondence.
pub fn enumerate_a_structures(c: &StableGraph, a: &StableGraph) -> Result<Vec<AStructure>> {
    check_same_ambient(c, a)?;
    let edges = c.edges();
    if a.num_edges() > edges.len() {
        return Ok(Vec::new());
    }
    let target = Target::new(a);
    let mut out = Vec::new();
    for subset in (0..edges.len()).combinations(edges.len() - a.num_edges()) {
        let halves: Vec<usize> = subset.iter().map(|&e| edges[e].0).collect();
        let contraction = c.contract(&halves);
        if let Some(iso) = target.isomorphisms(&contraction.graph).into_iter().next() {
            out.push(AStructure::from_contraction(
                a,
                c,
                subset,
                &contraction,
                &iso,
            ));
        }
    }
    Ok(out)
}

/// A graph together with its canonical form and automorphisms, for
/// repeated isomorphism tests against it.
pub(crate) struct Target {
    canon: canon::Canon,
    automorphisms: Vec<Morphism>,
    back: Morphism,
}

impl Target {
    pub fn new(g: &StableGraph) -> Self {
        let c = canon::canonize(g, &Colors::blank(g));
        let automorphisms = canon::automorphisms(&c.graph, &c.colors);
        let back = c.map.inverse();
        Target {
            canon: c,
            automorphisms,
            back,
        }
    }

    pub fn isomorphisms(&self, g: &StableGraph) -> Vec<Morphism> {
        if g.num_vertices() != self.canon.graph.num_vertices()
            || g.num_half_edges() != self.canon.graph.num_half_edges()
        {
            return Vec::new();
        }
        let c = canon::canonize(g, &Colors::blank(g));
        if c.graph != self.canon.graph {
            return Vec::new();
        }
        self.automorphisms
            .iter()
            .map(|alpha| c.map.then(alpha).then(&self.back))
            .collect()
    }
}

/// A gluing of factor graphs into the vertices of `A` together with a set
/// of `A`-edges whose contraction gives `B`.
pub(crate) struct Candidate<'a> {
    pub factors: Vec<&'a StableGraph>,
    pub glued: &'a Glued,
    /// Indices into `a.edges()` of the edges contracted for `B`.
    pub contracted: &'a [usize],
    pub contraction: &'a Contraction,
    /// All isomorphisms `C/S -> B`.
    pub isos: &'a [Morphism],
}

/// Visits every generic (A,B)-graph as a gluing of isomorphism-class
/// representatives into the vertices of `A` and a choice of contracted
/// `A`-edges, with all isomorphisms to `B`.
pub(crate) fn for_each_candidate<F>(a: &StableGraph, b: &StableGraph, mut visit: F)
where
    F: FnMut(&Candidate<'_>),
{
    let eb = b.num_edges();
    let ea = a.num_edges();
    let per_vertex: Vec<Arc<Levels>> = (0..a.num_vertices())
        .map(|v| by_edge_count(Ambient::new(a.vertex_genus(v), a.valence(v) as u32), eb))
        .collect();
    let target = Target::new(b);
    let a_edges = a.edges();
    let mut counts = vec![0usize; a.num_vertices()];
    let mut choice = vec![0usize; a.num_vertices()];
    let min_total = eb.saturating_sub(ea);
    // Odometer over per-vertex edge counts, then over graphs at that count.
    loop {
        let total: usize = counts.iter().sum();
        if total >= min_total && total <= eb {
            let lists: Vec<&Vec<StableGraph>> = counts
                .iter()
                .enumerate()
                .map(|(v, &k)| per_vertex[v].get(k).unwrap_or(&EMPTY))
                .collect();
            if lists.iter().all(|l| !l.is_empty()) {
                choice.iter_mut().for_each(|c| *c = 0);
                loop {
                    let factors: Vec<&StableGraph> =
                        lists.iter().zip(&choice).map(|(l, &i)| &l[i]).collect();
                    let glued = glue(a, &factors);
                    let k = ea + total - eb;
                    for subset in (0..ea).combinations(k) {
                        let halves: Vec<usize> =
                            subset.iter().map(|&e| glued.a_half[a_edges[e].0]).collect();
                        let contraction = glued.graph.contract(&halves);
                        let isos = target.isomorphisms(&contraction.graph);
                        if !isos.is_empty() {
                            visit(&Candidate {
                                factors: factors.clone(),
                                glued: &glued,
                                contracted: &subset,
                                contraction: &contraction,
                                isos: &isos,
                            });
                        }
                    }
                    if !advance(&mut choice, |v| lists[v].len()) {
                        break;
                    }
                }
            }
        }
        if !advance(&mut counts, |v| per_vertex[v].len().min(eb + 1)) {
            break;
        }
    }
}

static EMPTY: Vec<StableGraph> = Vec::new();

fn advance(digits: &mut [usize], radix: impl Fn(usize) -> usize) -> bool {
    for (v, d) in digits.iter_mut().enumerate() {
        *d += 1;
        if *d < radix(v) {
            return true;
        }
        *d = 0;
    }
    false
}

/// A generic (A,B)-graph: every edge of `graph` comes from `A` or from `B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenericOverlap {
    pub graph: StableGraph,
    pub a_structure: AStructure,
    pub b_structure: AStructure,
    /// Indices into `graph.edges()` of edges coming from both `A` and `B`.
    pub shared_edges: Vec<usize>,
}

impl GenericOverlap {
    pub fn verify(&self) -> bool {
        let n = self.graph.num_edges();
        let mut in_a = vec![false; n];
        let mut in_b = vec![false; n];
        for &e in &self.a_structure.contracted_edges {
            in_a[e] = true;
        }
        for &e in &self.b_structure.contracted_edges {
            in_b[e] = true;
        }
        let shared: Vec<usize> = (0..n).filter(|&e| !in_a[e] && !in_b[e]).collect();
        self.a_structure.target == self.graph
            && self.b_structure.target == self.graph
            && self.a_structure.verify()
            && self.b_structure.verify()
            && (0..n).all(|e| !(in_a[e] && in_b[e]))
            && shared == self.shared_edges
    }

    /// Swaps the roles of `A` and `B`.
    pub fn swapped(&self) -> GenericOverlap {
        GenericOverlap {
            graph: self.graph.clone(),
            a_structure: self.b_structure.clone(),
            b_structure: self.a_structure.clone(),
            shared_edges: self.shared_edges.clone(),
        }
    }

    /// Canonical form of the graph with each edge colored by its origin.
    pub fn census_key(&self) -> (StableGraph, Colors) {
        overlap_key(
            &self.graph,
            &self.a_structure.contracted_edges,
            &self.b_structure.contracted_edges,
        )
    }
}

/// Edge colors: 0 shared, 1 contracted for `B` only, 2 contracted for `A`
/// only, 3 both.
pub fn overlap_key(
    c: &StableGraph,
    a_contracted: &[usize],
    b_contracted: &[usize],
) -> (StableGraph, Colors) {
    let edges = c.edges();
    let mut colors = Colors::blank(c);
    for &e in a_contracted {
        colors.half[edges[e].0] += 2;
        colors.half[edges[e].1] += 2;
    }
    for &e in b_contracted {
        colors.half[edges[e].0] += 1;
        colors.half[edges[e].1] += 1;
    }
    let x = canon::canonize(c, &colors);
    (x.graph, x.colors)
}

/// All generic (A,B)-graphs up to isomorphism of the graph compatible with
/// both structures, in canonical order.
pub fn enumerate_generic_overlaps(a: &StableGraph, b: &StableGraph) -> Result<Vec<GenericOverlap>> {
    check_same_ambient(a, b)?;
    let mut found: BTreeMap<(StableGraph, Colors), GenericOverlap> = BTreeMap::new();
    for_each_candidate(a, b, |cand| {
        let c = &cand.glued.graph;
        let c_edges = c.edges();
        let edge_index: HashMap<usize, usize> = c_edges
            .iter()
            .enumerate()
            .flat_map(|(i, &(h, k))| [(h, i), (k, i)])
            .collect();
        let internal: Vec<usize> = cand
            .glued
            .internal_edge_halves()
            .iter()
            .map(|h| edge_index[h])
            .collect();
        let a_edges = a.edges();
        let s: Vec<usize> = cand
            .contracted
            .iter()
            .map(|&e| edge_index[&cand.glued.a_half[a_edges[e].0]])
            .collect();
        let key = overlap_key(c, &internal, &s);
        if found.contains_key(&key) {
            return;
        }
        let a_structure = a_structure_of_glued(a, cand.glued, internal.clone());
        let b_structure =
            AStructure::from_contraction(b, c, s.clone(), cand.contraction, &cand.isos[0]);
        let mut used = vec![false; c_edges.len()];
        for &e in internal.iter().chain(&s) {
            used[e] = true;
        }
        let shared_edges = (0..c_edges.len()).filter(|&e| !used[e]).collect();
        let mut a_sorted = a_structure;
        a_sorted.contracted_edges.sort_unstable();
        let mut b_sorted = b_structure;
        b_sorted.contracted_edges.sort_unstable();
        found.insert(
            key,
            GenericOverlap {
                graph: c.clone(),
                a_structure: a_sorted,
                b_structure: b_sorted,
                shared_edges,
            },
        );
    });
    Ok(found.into_values().collect())
}

fn a_structure_of_glued(
    a: &StableGraph,
    glued: &Glued,
    contracted_edges: Vec<usize>,
) -> AStructure {
    AStructure {
        base: a.clone(),
        target: glued.graph.clone(),
        contracted_edges,
        vertex_map: glued.owner.clone(),
        half_edge_map: glued.a_half.clone(),
    }
}

/// The graph with one vertex of genus `g - 1` and a self-edge.
pub fn irreducible_divisor(genus: u32, n: u32) -> StableGraph {
    let legs: Vec<(u32, usize)> = (1..=n).map(|m| (m, 0)).collect();
    StableGraph::from_edges(vec![genus - 1], &[(0, 0)], &legs)
}

/// Two vertices joined by one edge, genus `i` with legs `side` on the first.
pub fn separating_divisor(genus: u32, n: u32, i: u32, side: &[u32]) -> StableGraph {
    let legs: Vec<Leg> = (1..=n)
        .map(|m| Leg {
            marking: m,
            vertex: if side.contains(&m) { 0 } else { 1 },
        })
        .collect();
    StableGraph::new(vec![i, genus - i], vec![0, 1], vec![1, 0], legs)
}
