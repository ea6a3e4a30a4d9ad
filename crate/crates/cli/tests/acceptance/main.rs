//! Acceptance suite: one PASS/FAIL line per criterion.

mod cover_oracle;
mod plain;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{self, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tautring::boundary::{
    forgetful_pushforward, forgetful_pushforward_ordered, kappa_pullback, xi_pullback,
    xi_pushforward, RewriteOrder,
};
use tautring::canon::canonical_graph;
use tautring::covers::{diagonal_witness, enumerate_covers, stabilize_source, validate_cover};
use tautring::json::{
    class_to_json, covers_to_json, factorwise_to_json, parse_class, parse_covers, parse_factorwise,
    GraphJson,
};
use tautring::odd::{self, Family, OddBasisElement, OddTensor, Side};
use tautring::strata::q;
use tautring::structures::{degenerations, enumerate_generic_overlaps, stable_graphs};
use tautring::{
    Ambient, DecoratedStratum, Decoration, FactorwiseClass, KappaMonomial, StableGraph, TautClass,
};

use plain::{all_strata, strata_with_vertices, OverlapOracle, Plain};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn stratum(g: StableGraph) -> TautClass {
    TautClass::boundary(&g).expect("stable graph")
}

/// Stable ambients with genus ≤ `g` and at most `n` markings.
fn small_ambients(g: u32, n: u32) -> Vec<Ambient> {
    let mut out = Vec::new();
    for genus in 0..=g {
        for m in 0..=n {
            let a = Ambient::new(genus, m);
            if a.is_stable() {
                out.push(a);
            }
        }
    }
    out
}

// 1

fn delta0(g: u32) -> StableGraph {
    StableGraph::from_edges(vec![g - 1], &[(0, 0)], &[])
}

/// [Δ₀]² as read off the display: the −ψ₁−ψ₂ term, the irreducible divisor
/// of M̄_{g−1,2} and the separating divisors with one leg on each side,
/// glued back along Δ₀.
fn delta0_square(g: u32) -> TautClass {
    let amb = Ambient::new(g, 0);
    let d = delta0(g);
    let mut psi = Decoration::trivial(&d);
    psi.psi_half[0] = 1;
    let mut terms = vec![(q(-2), DecoratedStratum::new(d, psi).unwrap())];
    let two_loops = StableGraph::from_edges(vec![g - 2], &[(0, 0), (0, 0)], &[]);
    terms.push((q(2), DecoratedStratum::fundamental(two_loops)));
    for i in 1..=(g - 1) / 2 {
        let banana = StableGraph::from_edges(vec![i, g - 1 - i], &[(0, 1), (0, 1)], &[]);
        terms.push((q(2), DecoratedStratum::fundamental(banana)));
    }
    TautClass::normalize(amb, terms).unwrap()
}

fn delta0_display(g: u32) -> FactorwiseClass {
    let base = delta0(g);
    let mut f = FactorwiseClass::zero(&base);
    let triv = StableGraph::trivial(g - 1, 2);
    for leg in 0..2 {
        let mut d = Decoration::trivial(&triv);
        d.psi_leg[leg] = 1;
        f.add_pure(q(-1), vec![DecoratedStratum::new(triv.clone(), d).unwrap()])
            .unwrap();
    }
    let irr = StableGraph::from_edges(vec![g - 2], &[(0, 0)], &[(1, 0), (2, 0)]);
    f.add_pure(q(1), vec![DecoratedStratum::fundamental(irr)])
        .unwrap();
    for i in 1..=(g - 2) {
        let sep = StableGraph::from_edges(vec![i, g - 1 - i], &[(0, 1)], &[(1, 0), (2, 1)]);
        f.add_pure(q(1), vec![DecoratedStratum::fundamental(sep)])
            .unwrap();
    }
    f
}

fn criterion_1() -> Outcome {
    let mut times = Vec::new();
    for g in 3..=5 {
        let start = Instant::now();
        let x = stratum(delta0(g));
        let square = ok(x.mul(&x))?;
        let elapsed = start.elapsed();
        ensure(square == delta0_square(g), || {
            format!("genus {g}: got\n{square}\nexpected\n{}", delta0_square(g))
        })?;
        let pulled = ok(xi_pullback(&delta0(g), &x))?;
        ensure(pulled == delta0_display(g), || {
            format!("genus {g}: pullback differs from the display")
        })?;
        ensure(elapsed < Duration::from_secs(5), || {
            format!("genus {g} took {elapsed:?}")
        })?;
        times.push(format!("g={g} {elapsed:.2?}"));
    }
    Ok(times.join(", "))
}

// 2

fn criterion_2() -> Outcome {
    let start = Instant::now();
    for g in 3..=8u32 {
        let d = delta0(g);
        let overlaps = ok(enumerate_generic_overlaps(&d, &d))?;
        let expected = (g as usize - 1) / 2 + 2;
        ensure(overlaps.len() == expected, || {
            format!(
                "genus {g}: {} overlaps, expected {expected}",
                overlaps.len()
            )
        })?;
        let found: BTreeSet<StableGraph> =
            overlaps.iter().map(|o| canonical_graph(&o.graph)).collect();
        let mut wanted: BTreeSet<StableGraph> = BTreeSet::new();
        wanted.insert(canonical_graph(&d));
        wanted.insert(canonical_graph(&StableGraph::from_edges(
            vec![g - 2],
            &[(0, 0), (0, 0)],
            &[],
        )));
        for i in 1..=(g - 1) / 2 {
            wanted.insert(canonical_graph(&StableGraph::from_edges(
                vec![i, g - 1 - i],
                &[(0, 1), (0, 1)],
                &[],
            )));
        }
        ensure(found == wanted, || {
            format!("genus {g}: unexpected overlap graphs")
        })?;
        for i in 0..=(g - 2) {
            let absent = canonical_graph(&StableGraph::from_edges(
                vec![i, g - 1 - i],
                &[(0, 0), (0, 1)],
                &[],
            ));
            ensure(!found.contains(&absent), || {
                format!("genus {g}: loop-plus-bridge graph with i={i} present")
            })?;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(1), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!("g=3..8 in {elapsed:.2?}"))
}

// 3

fn element(family: Family, i: u8, side: Side) -> OddBasisElement {
    OddBasisElement::new(family, i, side).unwrap()
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let t = odd::self_intersection_odd();
    let elapsed = start.elapsed();
    let mut expected = OddTensor::zero();
    for i in 1..=11 {
        expected.add_term(
            q(2),
            element(Family::C, i, Side::First),
            element(Family::D, i, Side::Second),
        );
        expected.add_term(
            q(-2),
            element(Family::D, i, Side::First),
            element(Family::C, i, Side::Second),
        );
    }
    ensure(t == expected, || format!("got\n{t}"))?;
    ensure(t.len() == 22, || format!("{} terms", t.len()))?;
    ensure(
        t.terms().values().all(|c| *c == q(2) || *c == q(-2)),
        || "coefficient not ±2".to_string(),
    )?;
    ensure(elapsed < Duration::from_millis(100), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!("22 terms in {elapsed:.2?}"))
}

// 4

fn all_elements(side: Side) -> Vec<OddBasisElement> {
    let mut out = Vec::new();
    for f in [Family::A, Family::B, Family::C, Family::D] {
        for i in 1..=11 {
            out.push(element(f, i, side));
        }
    }
    out
}

/// Poincaré pairing from the two duality tables and graded commutativity.
fn pairing_oracle(x: OddBasisElement, y: OddBasisElement) -> i64 {
    let bidegree = |f: Family| match f {
        Family::A => (11, 0),
        Family::B => (0, 11),
        Family::C => (12, 1),
        Family::D => (1, 12),
    };
    let (bx, by) = (bidegree(x.family), bidegree(y.family));
    if x.index != y.index || (bx.0 + by.0, bx.1 + by.1) != (12, 12) {
        return 0;
    }
    match (x.family, y.family) {
        (Family::A, Family::D) | (Family::C, Family::B) => 1,
        _ => {
            let (dx, dy) = (bx.0 + bx.1, by.0 + by.1);
            if (dx * dy) % 2 == 1 {
                -1
            } else {
                1
            }
        }
    }
}

fn criterion_4() -> Outcome {
    let mut checked = 0;
    let mut nonzero = 0;
    for side in [Side::First, Side::Second] {
        for &x in &all_elements(side) {
            for &y in &all_elements(side) {
                let got = ok(odd::pairing(x, y))?;
                let want = pairing_oracle(x, y);
                ensure(got == q(want), || {
                    format!("<{x}, {y}> = {got}, expected {want}")
                })?;
                checked += 1;
                nonzero += usize::from(want != 0);
            }
        }
    }
    ensure(
        odd::pairing(
            element(Family::A, 1, Side::First),
            element(Family::D, 1, Side::Second),
        )
        .is_err(),
        || "pairing across factors accepted".to_string(),
    )?;
    Ok(format!("{checked} pairs, {nonzero} nonzero"))
}

// 5

fn random_graph(rng: &mut ChaCha8Rng) -> StableGraph {
    loop {
        let (g, n) = (rng.gen_range(0..=4u32), rng.gen_range(0..=4u32));
        if !Ambient::new(g, n).is_stable() {
            continue;
        }
        let mut graph = StableGraph::trivial(g, n);
        for _ in 0..rng.gen_range(0..=3) {
            let next = degenerations(&graph);
            if let Some(d) = next.choose(rng) {
                graph = d.clone();
            }
        }
        return graph;
    }
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut tensors = 0;
    for _ in 0..50 {
        let b = random_graph(&mut rng);
        for i in 0..=2u32 {
            let mut expected = FactorwiseClass::zero(&b);
            for v in 0..b.num_vertices() {
                let amb_v = Ambient::new(b.vertex_genus(v), b.valence(v) as u32);
                if i as i64 > amb_v.dimension() {
                    continue;
                }
                let factors = (0..b.num_vertices())
                    .map(|u| {
                        let triv = StableGraph::trivial(b.vertex_genus(u), b.valence(u) as u32);
                        let mut d = Decoration::trivial(&triv);
                        if u == v {
                            d.kappa[0] = KappaMonomial::single(i);
                        }
                        DecoratedStratum::new(triv, d).unwrap()
                    })
                    .collect();
                ok(expected.add_pure(q(1), factors))?;
            }
            let got = ok(kappa_pullback(&b, i))?;
            ensure(got == expected, || {
                format!("κ_{i} on {b}: got\n{got}\nexpected\n{expected}")
            })?;
            let general = ok(xi_pullback(&b, &TautClass::kappa(b.ambient(), i)))?;
            ensure(general == expected, || {
                format!("κ_{i} on {b}: general pullback disagrees")
            })?;
            tensors += expected.len();
        }
    }
    Ok(format!("50 graphs, κ_0..κ_2, {tensors} pure tensors"))
}

// 6

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut ambients = Vec::new();
    for n in 3..=8 {
        ambients.push((0, n));
    }
    for n in 1..=5 {
        ambients.push((1, n));
    }
    for n in 0..=2 {
        ambients.push((2, n));
    }
    let mut summary = Vec::new();
    let mut total_pairs = 0;
    for (g, n) in ambients {
        let amb = Ambient::new(g, n);
        let dim = amb.dimension() as usize;
        let levels = all_strata(g, n, dim);
        // The library's graph list must agree with the brute-force one.
        let library: BTreeSet<Plain> = stable_graphs(amb, dim)
            .iter()
            .map(|s| Plain::from_graph(s).key())
            .collect();
        let oracle: BTreeSet<Plain> = levels.iter().flatten().cloned().collect();
        ensure(library == oracle, || {
            format!(
                "{amb}: stable_graphs gives {} graphs, brute force {}",
                library.len(),
                oracle.len()
            )
        })?;
        let strata: Vec<Plain> = levels.iter().skip(1).flatten().cloned().collect();
        let pairs: Vec<(Plain, Plain)> = if strata.len() <= 40 {
            strata
                .iter()
                .flat_map(|a| strata.iter().map(move |b| (a.clone(), b.clone())))
                .collect()
        } else {
            let mut out = Vec::new();
            while out.len() < 40 {
                let a = strata.choose(&mut rng).unwrap();
                let b = strata.choose(&mut rng).unwrap();
                if a.num_edges() + b.num_edges() <= dim {
                    out.push((a.clone(), b.clone()));
                }
            }
            out
        };
        let bound = pairs
            .iter()
            .map(|(a, b)| a.num_edges() + b.num_edges())
            .max()
            .unwrap_or(0);
        let universe: Vec<Plain> = levels
            .iter()
            .take(bound.min(dim) + 1)
            .flatten()
            .cloned()
            .collect();
        let oracle = OverlapOracle::new(universe);
        for (a, b) in &pairs {
            let expected = oracle.census(a, b);
            let overlaps = ok(enumerate_generic_overlaps(&a.to_graph(), &b.to_graph()))?;
            let mut got: BTreeMap<Plain, usize> = BTreeMap::new();
            for o in &overlaps {
                ensure(o.verify(), || format!("{amb}: overlap fails verification"))?;
                *got.entry(Plain::from_graph(&o.graph).key()).or_default() += 1;
            }
            ensure(got == expected, || {
                format!(
                    "{amb}: A = {} B = {}: library {:?} vs brute force {:?}",
                    a.to_graph(),
                    b.to_graph(),
                    got.values().collect::<Vec<_>>(),
                    expected.values().collect::<Vec<_>>()
                )
            })?;
        }
        total_pairs += pairs.len();
        summary.push(format!("{amb}:{}", pairs.len()));
    }
    Ok(format!("{total_pairs} pairs [{}]", summary.join(" ")))
}

// 7

fn random_class(rng: &mut ChaCha8Rng, amb: Ambient, strata: &[StableGraph]) -> TautClass {
    let mut t = TautClass::zero(amb);
    for _ in 0..rng.gen_range(1..=2) {
        let mut x = stratum(strata.choose(rng).unwrap().clone());
        match rng.gen_range(0..3) {
            0 if amb.n > 0 => {
                x = x
                    .mul(&TautClass::psi(amb, rng.gen_range(1..=amb.n)).unwrap())
                    .unwrap()
            }
            1 => x = x.mul(&TautClass::kappa(amb, 1)).unwrap(),
            _ => {}
        }
        let c = [-3, -2, -1, 1, 2, 3][rng.gen_range(0..6)];
        t = t.add(&x.scale(&q(c))).unwrap();
    }
    t
}

fn check_codimension(p: &TautClass, expected: u32, amb: Ambient) -> Result<(), String> {
    if expected as i64 > amb.dimension() {
        return ensure(p.is_zero(), || {
            format!("{amb}: nonzero product in codimension {expected}")
        });
    }
    ensure(p.codimensions().iter().all(|&c| c == expected), || {
        format!("{amb}: product terms not in codimension {expected}")
    })
}

fn homogeneous_codim(t: &TautClass) -> Option<u32> {
    let c: BTreeSet<u32> = t.codimensions().into_iter().collect();
    (c.len() == 1).then(|| *c.iter().next().unwrap())
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let ambients = small_ambients(3, 2);
    for _ in 0..100 {
        let amb = *ambients.choose(&mut rng).unwrap();
        let strata = stable_graphs(amb, 2);
        let (x, y) = (
            random_class(&mut rng, amb, &strata),
            random_class(&mut rng, amb, &strata),
        );
        let (xy, yx) = (ok(x.mul(&y))?, ok(y.mul(&x))?);
        ensure(xy == yx, || format!("{amb}: x·y ≠ y·x for\n{x}\nand\n{y}"))?;
        if let (Some(a), Some(b)) = (homogeneous_codim(&x), homogeneous_codim(&y)) {
            check_codimension(&xy, a + b, amb)?;
        }
    }
    let mut triples = 0;
    for &amb in &ambients {
        let divisors: Vec<TautClass> = stable_graphs(amb, 1)
            .into_iter()
            .filter(|g| g.num_edges() == 1)
            .map(stratum)
            .collect();
        let mut pairs = BTreeMap::new();
        for (i, a) in divisors.iter().enumerate() {
            for (j, b) in divisors.iter().enumerate() {
                let p = ok(a.mul(b))?;
                check_codimension(&p, 2, amb)?;
                pairs.insert((i, j), p);
            }
        }
        for (i, a) in divisors.iter().enumerate() {
            for j in 0..divisors.len() {
                for (k, c) in divisors.iter().enumerate() {
                    let left = ok(pairs[&(i, j)].mul(c))?;
                    let right = ok(a.mul(&pairs[&(j, k)]))?;
                    ensure(left == right, || {
                        format!("{amb}: associativity fails on ({i},{j},{k})")
                    })?;
                    check_codimension(&left, 3, amb)?;
                    triples += 1;
                }
            }
        }
        // Powers of ψ and κ₁ past the dimension vanish.
        let top = amb.dimension() as usize + 1;
        let mut k = TautClass::fundamental(amb);
        for _ in 0..top {
            k = ok(k.mul(&TautClass::kappa(amb, 1)))?;
        }
        ensure(k.is_zero(), || format!("{amb}: κ₁^{top} nonzero"))?;
        if amb.n > 0 {
            let mut p = TautClass::fundamental(amb);
            for _ in 0..top {
                p = ok(p.mul(&TautClass::psi(amb, 1).unwrap()))?;
            }
            ensure(p.is_zero(), || format!("{amb}: ψ₁^{top} nonzero"))?;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!("100 pairs, {triples} triples in {elapsed:.2?}"))
}

// 8

fn criterion_8() -> Outcome {
    let mut checks = 0;
    for amb in small_ambients(3, 2) {
        let low = stable_graphs(amb, 2);
        let bases: Vec<&StableGraph> = low.iter().filter(|g| g.num_edges() >= 1).collect();
        let mut classes: Vec<TautClass> = low
            .iter()
            .filter(|g| g.num_edges() <= 1)
            .cloned()
            .map(stratum)
            .collect();
        classes.push(TautClass::kappa(amb, 1));
        if amb.n > 0 {
            classes.push(TautClass::psi(amb, amb.n).unwrap());
        }
        for &a in &bases {
            let mut fs = vec![
                FactorwiseClass::unit(a),
                ok(xi_pullback(a, &TautClass::kappa(amb, 1)))?,
            ];
            let mut deco = Decoration::trivial(a);
            deco.psi_half[0] = 1;
            fs.push(FactorwiseClass::unit(a).times_decoration(&deco));
            for t in &classes {
                let pulled = ok(xi_pullback(a, t))?;
                for f in &fs {
                    let left = ok(xi_pushforward(a, &ok(pulled.mul(f))?))?;
                    let right = ok(t.mul(&ok(xi_pushforward(a, f))?))?;
                    ensure(left == right, || {
                        format!("{amb}: projection formula fails for A = {a}, T =\n{t}")
                    })?;
                    checks += 1;
                }
            }
        }
        // ξ_{A*}ξ_A^*ξ_{B*}1 = ξ_{B*}ξ_B^*ξ_{A*}1; [A] carries 1/|Aut A|.
        for &a in &bases {
            for &b in &bases {
                let aut = |g: &StableGraph| {
                    q(DecoratedStratum::fundamental(g.clone()).graph_automorphisms() as i64)
                };
                let ab = ok(xi_pushforward(a, &ok(xi_pullback(a, &stratum(b.clone())))?))?
                    .scale(&aut(b));
                let ba = ok(xi_pushforward(b, &ok(xi_pullback(b, &stratum(a.clone())))?))?
                    .scale(&aut(a));
                ensure(ab == ba, || {
                    format!("{amb}: excess symmetry fails for {a} and {b}")
                })?;
                checks += 1;
            }
        }
    }
    Ok(format!("{checks} identities, bases with 1 to 2 edges"))
}

// 9

fn criterion_9() -> Outcome {
    let mut targets = 0;
    let mut covers = 0;
    for h in 0..=2u32 {
        for b in 0..=4u32 {
            for k in 0..=1u32 {
                let n = b + k;
                if !Ambient::new(h, n).is_stable() {
                    continue;
                }
                let small: Vec<StableGraph> = strata_with_vertices(h, n, 3, 2)
                    .into_iter()
                    .flatten()
                    .map(|p| p.to_graph())
                    .collect();
                for t in small {
                    let got = ok(enumerate_covers(&t, b, k))?;
                    let expected = cover_oracle::brute_force_covers(&t, b, k);
                    let mut keys = BTreeSet::new();
                    for c in &got {
                        let report = validate_cover(c);
                        ensure(report.is_valid(), || {
                            format!("cover of {t} invalid: {report}")
                        })?;
                        let g = Plain::from_graph(&c.source).genus();
                        ensure(b as i64 == 2 * (g - 2 * h as i64 + 1), || {
                            format!("cover of {t}: b = {b}, source genus {g}")
                        })?;
                        keys.insert(c.canonical_key());
                    }
                    ensure(keys.len() == got.len(), || {
                        format!("duplicate covers of {t}")
                    })?;
                    let oracle_keys: BTreeSet<_> = expected.keys().cloned().collect();
                    ensure(keys == oracle_keys, || {
                        format!(
                            "{t} (b={b}, k={k}): {} covers, brute force {}",
                            got.len(),
                            expected.len()
                        )
                    })?;
                    targets += 1;
                    covers += got.len();
                }
            }
        }
    }
    for h in 1..=5 {
        let w = ok(diagonal_witness(h))?;
        let report = validate_cover(&w);
        ensure(report.is_valid(), || format!("witness h={h}: {report}"))?;
        let st = ok(stabilize_source(&w))?;
        let expected = StableGraph::from_edges(vec![h, h], &[(0, 1)], &[]);
        ensure(canonical_graph(&st) == canonical_graph(&expected), || {
            format!("witness h={h} stabilizes to {st}")
        })?;
        ensure(st.genus().ok() == Some(2 * h), || {
            format!("witness h={h}: genus")
        })?;
    }
    Ok(format!(
        "{targets} targets, {covers} covers, witnesses h=1..5"
    ))
}

// 10

/// π_* of ψ^a ψ_{n+1}^b ∏κ_c upstairs, as (coefficient, ψ exponents, κ indices).
fn pushforward_oracle(a: &[u32], b: u32, kappas: &[u32]) -> Vec<(i64, Vec<u32>, Vec<u32>)> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << kappas.len()) {
        let moved: u32 = (0..kappas.len())
            .filter(|&j| mask >> j & 1 == 1)
            .map(|j| kappas[j])
            .sum();
        let rest: Vec<u32> = (0..kappas.len())
            .filter(|&j| mask >> j & 1 == 0)
            .map(|j| kappas[j])
            .collect();
        let top = b + moved;
        if top > 0 {
            let mut ks = rest.clone();
            ks.push(top - 1);
            out.push((1, a.to_vec(), ks));
        } else {
            for i in 0..a.len() {
                if a[i] > 0 {
                    let mut lowered = a.to_vec();
                    lowered[i] -= 1;
                    out.push((1, lowered, rest.clone()));
                }
            }
        }
    }
    out
}

fn monomial(amb: Ambient, psi: &[u32], kappas: &[u32]) -> TautClass {
    let mut t = TautClass::fundamental(amb);
    for (i, &e) in psi.iter().enumerate() {
        for _ in 0..e {
            t = t.mul(&TautClass::psi(amb, i as u32 + 1).unwrap()).unwrap();
        }
    }
    for &c in kappas {
        t = t.mul(&TautClass::kappa(amb, c)).unwrap();
    }
    t
}

fn forgets_cleanly(t: &TautClass, down: Ambient) -> bool {
    t.ambient() == down
        && t.terms()
            .keys()
            .all(|s| s.graph.legs().iter().all(|l| l.marking <= down.n))
}

fn criterion_10() -> Outcome {
    for (g, n) in [(1, 1), (2, 0), (2, 2)] {
        let (up, down) = (Ambient::new(g, n + 1), Ambient::new(g, n));
        for l in 0..=4u32 {
            let mut psi = vec![0; n as usize + 1];
            psi[n as usize] = l + 1;
            let x = monomial(up, &psi, &[]);
            let got = ok(forgetful_pushforward(&x))?;
            let want = TautClass::fundamental(down)
                .mul(&TautClass::kappa(down, l))
                .unwrap();
            if !x.is_zero() {
                ensure(forgets_cleanly(&got, down), || {
                    format!("{up}: output references the forgotten leg")
                })?;
            }
            ensure(got == want, || {
                format!("{up}: π_*ψ^{} = {got}, expected κ_{l}", l + 1)
            })?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let choices = [(0, 3), (1, 1), (1, 2), (2, 0), (2, 1), (2, 2)];
    for _ in 0..30 {
        let (g, n) = choices[rng.gen_range(0..choices.len())];
        let (up, down) = (Ambient::new(g, n + 1), Ambient::new(g, n));
        let degree = rng.gen_range(1..=up.dimension() as u32);
        let mut psi = vec![0u32; n as usize + 1];
        let mut kappas = Vec::new();
        let mut left = degree;
        while left > 0 {
            if rng.gen_bool(0.6) {
                let slot = rng.gen_range(0..psi.len());
                psi[slot] += 1;
                left -= 1;
            } else {
                let c = rng.gen_range(1..=left.min(2));
                kappas.push(c);
                left -= c;
            }
        }
        if rng.gen_bool(0.2) {
            kappas.push(0);
        }
        let x = monomial(up, &psi, &kappas);
        let forward = ok(forgetful_pushforward_ordered(&x, RewriteOrder::Forward))?;
        let reverse = ok(forgetful_pushforward_ordered(&x, RewriteOrder::Reverse))?;
        ensure(forward == reverse, || {
            format!("{up}: order dependence on ψ^{psi:?} κ{kappas:?}")
        })?;
        ensure(forgets_cleanly(&forward, down), || {
            format!("{up}: output references the forgotten leg")
        })?;
        let mut want = TautClass::zero(down);
        for (c, a, ks) in pushforward_oracle(&psi[..n as usize], psi[n as usize], &kappas) {
            want = want.add(&monomial(down, &a, &ks).scale(&q(c))).unwrap();
        }
        ensure(forward == want, || {
            format!("{up}: π_*(ψ^{psi:?} κ{kappas:?}) =\n{forward}\nexpected\n{want}")
        })?;
    }
    Ok("l=0..4 on three ambients, 30 random monomials".to_string())
}

// 11

fn data(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run_cli(args: &[String]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_tautring"))
        .args(args)
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

enum Schema {
    Text,
    Class,
    Factorwise,
    Covers,
    Graph,
    Any,
}

fn round_trip(schema: &Schema, text: &str) -> Result<(), String> {
    let text = text.trim_end();
    match schema {
        Schema::Text => Ok(()),
        Schema::Class => {
            let t = ok(parse_class(text))?;
            ensure(class_to_json(&t) == text, || {
                "class JSON does not round-trip".to_string()
            })
        }
        Schema::Factorwise => {
            let f = ok(parse_factorwise(text))?;
            ensure(factorwise_to_json(&f) == text, || {
                "factorwise JSON does not round-trip".to_string()
            })
        }
        Schema::Covers => {
            let c = ok(parse_covers(text))?;
            ensure(covers_to_json(&c) == text, || {
                "cover JSON does not round-trip".to_string()
            })
        }
        Schema::Graph => {
            let v: serde_json::Value = ok(serde_json::from_str(text))?;
            let g: GraphJson = ok(serde_json::from_value(v["graph"].clone()))?;
            let g = ok(g.to_graph())?;
            ensure(canonical_graph(&g) == g, || {
                "emitted graph is not canonical".to_string()
            })
        }
        Schema::Any => ok(serde_json::from_str::<serde_json::Value>(text)).map(|_| ()),
    }
}

fn criterion_11() -> Outcome {
    let target = data("t.json");
    let cover = data("cover.json");
    let class = data("class.json");
    let cases: Vec<(&str, Schema)> = vec![
        (
            "strata mul --ambient 3,0 --expr bd(delta0)*bd(delta0)",
            Schema::Text,
        ),
        (
            "strata mul --ambient 3,0 --expr bd(delta0)*bd(delta0) --json",
            Schema::Class,
        ),
        (
            "strata mul --ambient 2,1 --expr 1/2*psi(1)*kappa(1)+bd(delta1) --json",
            Schema::Class,
        ),
        (
            "strata pullback --ambient 3,0 --expr pullback(delta0,bd(delta0))",
            Schema::Text,
        ),
        (
            "strata pullback --ambient 3,0 --expr pullback(delta0,bd(delta0)) --json",
            Schema::Factorwise,
        ),
        (
            "strata pullback --ambient 2,2 --target delta1 --expr kappa(1)+psi(2) --json",
            Schema::Factorwise,
        ),
        (
            "strata pushforward-forget --ambient 1,2 --expr psi(1)*psi(2)",
            Schema::Text,
        ),
        (
            "strata pushforward-forget --ambient 2,1 --expr psi(1)*psi(1)*kappa(1) --json",
            Schema::Class,
        ),
        (
            "strata normalize --ambient 2,0 --expr bd(delta0)+bd(delta0)-kappa(1)",
            Schema::Text,
        ),
        ("graphs overlaps --ambient 4,0 delta0 delta0", Schema::Text),
        (
            "graphs overlaps --ambient 4,0 delta0 delta1 --json",
            Schema::Any,
        ),
        ("graphs canonical --ambient 2,22 e11x11", Schema::Text),
        ("graphs canonical --ambient 3,0 c0 --json", Schema::Graph),
        ("odd diagonal", Schema::Text),
        ("odd diagonal --json", Schema::Any),
        ("odd self-intersection", Schema::Text),
        ("odd self-intersection --json", Schema::Any),
        ("odd finny", Schema::Text),
        ("odd report", Schema::Text),
        ("odd report --json", Schema::Any),
        ("covers witness --h 3", Schema::Text),
        ("covers witness --h 2 --json", Schema::Covers),
    ];
    let mut commands: Vec<(Vec<String>, Schema)> = cases
        .into_iter()
        .map(|(c, s)| (c.split(' ').map(String::from).collect(), s))
        .collect();
    let with_file = |args: &[&str], file: &str, schema: Schema| {
        let mut v: Vec<String> = args.iter().map(|s| s.to_string()).collect();
        v.push(file.to_string());
        (v, schema)
    };
    commands.push(with_file(&["graphs", "validate"], &target, Schema::Text));
    commands.push(with_file(
        &["graphs", "validate", "--json"],
        &data("unstable.json"),
        Schema::Any,
    ));
    commands.push(with_file(&["covers", "validate"], &cover, Schema::Text));
    commands.push(with_file(
        &["covers", "validate", "--json"],
        &cover,
        Schema::Any,
    ));
    commands.push(with_file(
        &["covers", "enumerate", "--b", "2", "--k", "0", "--target"],
        &target,
        Schema::Text,
    ));
    commands.push(with_file(
        &[
            "covers",
            "enumerate",
            "--b",
            "2",
            "--k",
            "0",
            "--json",
            "--target",
        ],
        &target,
        Schema::Covers,
    ));
    commands.push((
        vec![
            "strata".into(),
            "normalize".into(),
            "--ambient".into(),
            "2,1".into(),
            "--json".into(),
            "--expr".into(),
            format!("@{class}"),
        ],
        Schema::Class,
    ));

    for (args, schema) in &commands {
        let first = run_cli(args);
        ensure(first.0 == 0, || {
            format!("`{}` exited with {}", args.join(" "), first.0)
        })?;
        for _ in 0..2 {
            ensure(run_cli(args) == first, || {
                format!("`{}` is not deterministic", args.join(" "))
            })?;
        }
        let text = String::from_utf8(first.1).map_err(|e| e.to_string())?;
        round_trip(schema, &text).map_err(|e| format!("`{}`: {e}", args.join(" ")))?;
    }

    // The documented examples.
    let (_, out) = run_cli(&commands[0].0);
    let expected = format!("{}\n", delta0_square(3));
    ensure(out == expected.as_bytes(), || {
        "`strata mul` example differs from the display".to_string()
    })?;
    let (_, out) = run_cli(&["odd".into(), "self-intersection".into()]);
    let text = String::from_utf8_lossy(&out);
    ensure(
        text.lines().filter(|l| l.contains('⊗')).count() == 22,
        || "`odd self-intersection` does not list 22 terms".to_string(),
    )?;
    let t = tautring::json::parse_graph(&std::fs::read_to_string(&target).unwrap()).unwrap();
    let (_, out) = run_cli(&[
        "covers".into(),
        "enumerate".into(),
        "--target".into(),
        target.clone(),
        "--b".into(),
        "2".into(),
        "--k".into(),
        "0".into(),
        "--json".into(),
    ]);
    let listed = ok(parse_covers(&String::from_utf8_lossy(&out)))?;
    let brute = cover_oracle::brute_force_covers(&t, 2, 0);
    ensure(listed.len() == brute.len(), || {
        format!(
            "{} covers listed, brute force {}",
            listed.len(),
            brute.len()
        )
    })?;

    // User errors exit 1 with a position.
    let (code, _) = run_cli(&[
        "strata".into(),
        "mul".into(),
        "--ambient".into(),
        "2,0".into(),
        "--expr".into(),
        "psi(".into(),
    ]);
    ensure(code == 1, || {
        format!("malformed expression exited with {code}")
    })?;
    Ok(format!("{} commands × 3 runs", commands.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("Δ₀ self-intersection", criterion_1),
        ("generic overlap census", criterion_2),
        ("odd self-intersection", criterion_3),
        ("pairing tables", criterion_4),
        ("κ pullback rule", criterion_5),
        ("overlap oracle equivalence", criterion_6),
        ("algebra properties", criterion_7),
        ("projection formula and excess symmetry", criterion_8),
        ("admissible covers", criterion_9),
        ("forgetful pushforward", criterion_10),
        ("CLI determinism", criterion_11),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let number = i + 1;
        if !filter.is_empty() && !filter.iter().any(|f| f == &number.to_string()) {
            continue;
        }
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {number:>2} PASS  {name}: {detail} [{elapsed:.2?}]"),
            Err(msg) => {
                failed += 1;
                println!("criterion {number:>2} FAIL  {name}: {msg} [{elapsed:.2?}]");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
