//! A deliberately naive graph model for oracles: genera, an edge list of
//! vertex pairs and the vertex of each marking. Isomorphism is decided by
//! trying vertex permutations.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use tautring::StableGraph;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Plain {
    pub genera: Vec<u32>,
    /// Sorted, each pair `(u, v)` with `u <= v`.
    pub edges: Vec<(usize, usize)>,
    /// `legs[m - 1]` is the vertex carrying marking `m`.
    pub legs: Vec<usize>,
}

fn ordered(u: usize, v: usize) -> (usize, usize) {
    if u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

impl Plain {
    pub fn new(genera: Vec<u32>, edges: Vec<(usize, usize)>, legs: Vec<usize>) -> Plain {
        let mut edges: Vec<_> = edges.into_iter().map(|(u, v)| ordered(u, v)).collect();
        edges.sort_unstable();
        Plain {
            genera,
            edges,
            legs,
        }
    }

    pub fn trivial(genus: u32, n: u32) -> Plain {
        Plain::new(vec![genus], vec![], vec![0; n as usize])
    }

    pub fn from_graph(g: &StableGraph) -> Plain {
        let edges = g
            .edges()
            .iter()
            .map(|&(h, k)| (g.vertex_of(h), g.vertex_of(k)))
            .collect();
        let mut legs = vec![0; g.num_legs()];
        for l in g.legs() {
            legs[l.marking as usize - 1] = l.vertex;
        }
        Plain::new(g.genera().to_vec(), edges, legs)
    }

    pub fn to_graph(&self) -> StableGraph {
        let legs: Vec<(u32, usize)> = self
            .legs
            .iter()
            .enumerate()
            .map(|(m, &v)| (m as u32 + 1, v))
            .collect();
        StableGraph::from_edges(self.genera.clone(), &self.edges, &legs)
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn genus(&self) -> i64 {
        self.genera.iter().map(|&g| g as i64).sum::<i64>() + self.edges.len() as i64
            - self.genera.len() as i64
            + 1
    }

    pub fn valence(&self, v: usize) -> usize {
        let ends: usize = self
            .edges
            .iter()
            .map(|&(a, b)| usize::from(a == v) + usize::from(b == v))
            .sum();
        ends + self.legs.iter().filter(|&&w| w == v).count()
    }

    pub fn is_stable(&self) -> bool {
        (0..self.genera.len()).all(|v| 2 * self.genera[v] as i64 - 2 + self.valence(v) as i64 > 0)
    }

    /// Contracts the edges flagged in `set`.
    pub fn contract(&self, set: &[bool]) -> Plain {
        let n = self.genera.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        let mut extra = vec![0i64; n];
        for (i, &(u, v)) in self.edges.iter().enumerate() {
            if set[i] {
                let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
                if ru != rv {
                    parent[ru] = rv;
                }
            }
        }
        let mut index = BTreeMap::new();
        for v in 0..n {
            let r = find(&mut parent, v);
            let len = index.len();
            index.entry(r).or_insert(len);
        }
        let comp: Vec<usize> = (0..n).map(|v| index[&find(&mut parent, v)]).collect();
        let mut verts = vec![0i64; index.len()];
        let mut genera = vec![0i64; index.len()];
        for v in 0..n {
            verts[comp[v]] += 1;
            genera[comp[v]] += self.genera[v] as i64;
        }
        for (i, &(u, _)) in self.edges.iter().enumerate() {
            if set[i] {
                extra[comp[u]] += 1;
            }
        }
        let genera = (0..index.len())
            .map(|c| (genera[c] + extra[c] - verts[c] + 1) as u32)
            .collect();
        let edges = self
            .edges
            .iter()
            .enumerate()
            .filter(|(i, _)| !set[*i])
            .map(|(_, &(u, v))| (comp[u], comp[v]))
            .collect();
        let legs = self.legs.iter().map(|&v| comp[v]).collect();
        Plain::new(genera, edges, legs)
    }

    fn relabel(&self, sigma: &[usize]) -> Plain {
        let mut genera = vec![0; self.genera.len()];
        for (v, &s) in sigma.iter().enumerate() {
            genera[s] = self.genera[v];
        }
        let edges = self
            .edges
            .iter()
            .map(|&(u, v)| (sigma[u], sigma[v]))
            .collect();
        let legs = self.legs.iter().map(|&v| sigma[v]).collect();
        Plain::new(genera, edges, legs)
    }

    fn invariant(&self, v: usize) -> (u32, usize, usize, Vec<usize>) {
        let loops = self
            .edges
            .iter()
            .filter(|&&(a, b)| a == v && b == v)
            .count();
        let legs = (0..self.legs.len())
            .filter(|&m| self.legs[m] == v)
            .collect();
        (self.genera[v], self.valence(v), loops, legs)
    }

    /// Vertex groups of equal invariant, in invariant order.
    fn groups(&self) -> Vec<Vec<usize>> {
        let mut order: Vec<usize> = (0..self.genera.len()).collect();
        order.sort_by_key(|&v| self.invariant(v));
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for &v in &order {
            match groups.last_mut() {
                Some(g) if self.invariant(g[0]) == self.invariant(v) => g.push(v),
                _ => groups.push(vec![v]),
            }
        }
        groups
    }

    /// Bijections sending each invariant group onto a block of positions
    /// (`sorted`) or onto itself (otherwise).
    fn group_maps(&self, sorted: bool) -> Vec<Vec<usize>> {
        let n = self.genera.len();
        let mut out = vec![vec![usize::MAX; n]];
        let mut start = 0;
        for g in &self.groups() {
            let mut next = Vec::new();
            for sigma in &out {
                for p in permutations(g.len()) {
                    let mut s = sigma.clone();
                    for (i, &v) in g.iter().enumerate() {
                        s[v] = if sorted { start + p[i] } else { g[p[i]] };
                    }
                    next.push(s);
                }
            }
            out = next;
            start += g.len();
        }
        out
    }

    fn labelings(&self) -> Vec<Vec<usize>> {
        self.group_maps(true)
    }

    /// Canonical representative: least relabeling among invariant-sorted ones.
    pub fn key(&self) -> Plain {
        self.labelings()
            .iter()
            .map(|s| self.relabel(s))
            .min()
            .expect("at least one labeling")
    }

    /// Vertex permutations fixing the graph.
    pub fn automorphisms(&self) -> Vec<Vec<usize>> {
        self.group_maps(false)
            .into_iter()
            .filter(|p| self.relabel(p) == *self)
            .collect()
    }

    /// Graphs with one more edge.
    pub fn degenerations(&self) -> Vec<Plain> {
        let mut out = Vec::new();
        let n = self.genera.len();
        for v in 0..n {
            if self.genera[v] > 0 {
                let mut g = self.clone();
                g.genera[v] -= 1;
                g.edges.push((v, v));
                out.push(Plain::new(g.genera, g.edges, g.legs));
            }
            // Items at v: edge ends (edge, side) and legs.
            let ends: Vec<(usize, usize)> = self
                .edges
                .iter()
                .enumerate()
                .flat_map(|(i, &(a, b))| {
                    let mut e = Vec::new();
                    if a == v {
                        e.push((i, 0));
                    }
                    if b == v {
                        e.push((i, 1));
                    }
                    e
                })
                .collect();
            let legs: Vec<usize> = (0..self.legs.len())
                .filter(|&m| self.legs[m] == v)
                .collect();
            let items = ends.len() + legs.len();
            for mask in 0u32..(1 << items) {
                for g1 in 0..=self.genera[v] {
                    let w = n;
                    let mut genera = self.genera.clone();
                    genera[v] = g1;
                    genera.push(self.genera[v] - g1);
                    let mut edges = self.edges.clone();
                    for (j, &(i, side)) in ends.iter().enumerate() {
                        if mask >> j & 1 == 1 {
                            if side == 0 {
                                edges[i].0 = w;
                            } else {
                                edges[i].1 = w;
                            }
                        }
                    }
                    let mut leg_vec = self.legs.clone();
                    for (j, &m) in legs.iter().enumerate() {
                        if mask >> (ends.len() + j) & 1 == 1 {
                            leg_vec[m] = w;
                        }
                    }
                    edges.push((v, w));
                    let g = Plain::new(genera, edges, leg_vec);
                    if g.is_stable() {
                        out.push(g);
                    }
                }
            }
        }
        out
    }
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// All stable graphs of `M̄_{g,n}` by edge count, up to `max_edges`.
pub fn all_strata(genus: u32, n: u32, max_edges: usize) -> Vec<Vec<Plain>> {
    strata_with_vertices(genus, n, max_edges, usize::MAX)
}

/// As [`all_strata`], keeping graphs with at most `max_vertices` vertices;
/// such graphs only degenerate from graphs of the same kind.
pub fn strata_with_vertices(
    genus: u32,
    n: u32,
    max_edges: usize,
    max_vertices: usize,
) -> Vec<Vec<Plain>> {
    let mut levels = vec![vec![Plain::trivial(genus, n).key()]];
    for e in 0..max_edges {
        let mut seen = BTreeSet::new();
        for g in &levels[e] {
            for d in g.degenerations() {
                if d.genera.len() <= max_vertices {
                    seen.insert(d.key());
                }
            }
        }
        if seen.is_empty() {
            break;
        }
        levels.push(seen.into_iter().collect());
    }
    levels
}

/// Brute-force generic overlap census over an explicit universe of graphs.
pub struct OverlapOracle {
    graphs: Vec<Plain>,
    automorphisms: Vec<Vec<Vec<usize>>>,
    /// Canonical quotient -> (graph index, contracted edge mask).
    quotients: HashMap<Plain, Vec<(usize, u32)>>,
}

impl OverlapOracle {
    pub fn new(universe: Vec<Plain>) -> OverlapOracle {
        let mut quotients: HashMap<Plain, Vec<(usize, u32)>> = HashMap::new();
        let mut automorphisms = Vec::new();
        for (ci, c) in universe.iter().enumerate() {
            let e = c.num_edges();
            for mask in 0u32..(1 << e) {
                let set: Vec<bool> = (0..e).map(|i| mask >> i & 1 == 1).collect();
                quotients
                    .entry(c.contract(&set).key())
                    .or_default()
                    .push((ci, mask));
            }
            automorphisms.push(c.automorphisms());
        }
        OverlapOracle {
            graphs: universe,
            automorphisms,
            quotients,
        }
    }

    /// Canonical overlap graph -> number of (A,B)-structure pairs on it up
    /// to automorphism, for graphs with at most `e(A) + e(B)` edges.
    pub fn census(&self, a: &Plain, b: &Plain) -> BTreeMap<Plain, usize> {
        let (ka, kb) = (a.key(), b.key());
        let bound = a.num_edges() + b.num_edges();
        let empty = Vec::new();
        let a_list = self.quotients.get(&ka).unwrap_or(&empty);
        let b_list: BTreeSet<(usize, u32)> = self
            .quotients
            .get(&kb)
            .unwrap_or(&empty)
            .iter()
            .copied()
            .collect();
        let mut orbits: BTreeMap<usize, BTreeSet<Vec<(usize, usize, u8)>>> = BTreeMap::new();
        for &(ci, sa) in a_list {
            let c = &self.graphs[ci];
            if c.num_edges() > bound {
                continue;
            }
            for &(cj, sb) in b_list.range((ci, 0)..=(ci, u32::MAX)) {
                debug_assert_eq!(cj, ci);
                if sa & sb != 0 {
                    continue;
                }
                let labels: Vec<u8> = (0..c.num_edges())
                    .map(|i| (sa >> i & 1) as u8 + 2 * (sb >> i & 1) as u8)
                    .collect();
                let key = self.automorphisms[ci]
                    .iter()
                    .map(|s| {
                        let mut v: Vec<(usize, usize, u8)> = c
                            .edges
                            .iter()
                            .zip(&labels)
                            .map(|(&(x, y), &l)| {
                                let (p, q) = ordered(s[x], s[y]);
                                (p, q, l)
                            })
                            .collect();
                        v.sort_unstable();
                        v
                    })
                    .min()
                    .expect("identity");
                orbits.entry(ci).or_default().insert(key);
            }
        }
        orbits
            .into_iter()
            .map(|(ci, o)| (self.graphs[ci].clone(), o.len()))
            .collect()
    }
}
