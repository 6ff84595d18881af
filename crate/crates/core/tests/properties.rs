//! Property tests for the algebraic and combinatorial invariants.

mod common;

use std::collections::{BTreeSet, HashSet};

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{catalog_group, naive_product};
use pds_core::aut::{
    automorphism_group, covers_subgroup, equivalence_classes, for_each_automorphism, hadamard_breakdown,
};
use pds_core::construct::{cyclic, dihedral, direct_product, elementary_abelian, quaternion, semidirect_product};
use pds_core::graph6::{emit_graph6, parse_graph6};
use pds_core::io::{emit_group_table, parse_group_table};
use pds_core::ring::{convolve, is_pds, PdsParams, RingVector};
use pds_core::search::{search_group, SearchConfig};
use pds_core::srg::{are_isomorphic, canonical_form, cayley_graph, srg_params, Graph};

fn small_groups() -> Vec<pds_core::GroupTable> {
    vec![
        cyclic(12),
        dihedral(12),
        quaternion(),
        direct_product(&cyclic(4), &cyclic(2)),
        elementary_abelian(3),
        direct_product(&dihedral(8), &cyclic(2)),
    ]
}

fn random_graph(n: usize, bits: &[bool]) -> Graph {
    let mut g = Graph::empty(n);
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            if bits[k % bits.len()] {
                g.add_edge(i, j);
            }
            k += 1;
        }
    }
    g
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn isomorphic_by_search(a: &Graph, b: &Graph, perms: &[Vec<usize>]) -> bool {
    a.order() == b.order() && perms.iter().any(|p| &a.relabel(p) == b)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_laws(gi in 0usize..6, seed in any::<u64>()) {
        let g = &small_groups()[gi];
        let n = g.order();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut vec = || RingVector { coeffs: (0..n).map(|_| rand::Rng::gen_range(&mut rng, -4..=4)).collect() };
        let (a, b, c) = (vec(), vec(), vec());
        let ab_c = convolve(g, &convolve(g, &a, &b).unwrap(), &c).unwrap();
        let a_bc = convolve(g, &a, &convolve(g, &b, &c).unwrap()).unwrap();
        prop_assert_eq!(&ab_c, &a_bc);
        let left = convolve(g, &a, &b.add(&c).unwrap()).unwrap();
        let right = convolve(g, &a, &b).unwrap().add(&convolve(g, &a, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        prop_assert_eq!(convolve(g, &a, &b).unwrap().coeffs, naive_product(g, &a.coeffs, &b.coeffs));
    }

    #[test]
    fn canonical_form_ignores_relabelling(n in 1usize..14, bits in prop::collection::vec(any::<bool>(), 1..100), seed in any::<u64>()) {
        let g = random_graph(n, &bits);
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let h = g.relabel(&perm);
        prop_assert_eq!(canonical_form(&g), canonical_form(&h));
        prop_assert!(are_isomorphic(&g, &h));
    }

    #[test]
    fn graph6_round_trip(n in 0usize..80, bits in prop::collection::vec(any::<bool>(), 1..200)) {
        let g = random_graph(n, &bits);
        let s = emit_graph6(&g);
        prop_assert_eq!(parse_graph6(&s).unwrap(), g);
        prop_assert_eq!(emit_graph6(&parse_graph6(&s).unwrap()), s);
    }

    #[test]
    fn gtab_round_trip(gi in 0usize..6) {
        let g = &small_groups()[gi];
        let text = emit_group_table(g);
        let back = parse_group_table(&text).unwrap();
        prop_assert_eq!(back.to_table(), g.to_table());
        prop_assert_eq!(emit_group_table(&back), text);
    }
}

#[test]
fn isomorphism_agrees_with_exhaustive_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in 1..=7 {
        let perms = permutations(n);
        for _ in 0..30 {
            let bits: Vec<bool> = (0..n * n).map(|_| rand::Rng::gen_bool(&mut rng, 0.5)).collect();
            let a = random_graph(n, &bits);
            let b = if rand::Rng::gen_bool(&mut rng, 0.5) {
                a.relabel(perms.choose(&mut rng).unwrap())
            } else {
                // Same edge count, possibly different shape.
                let mut b = Graph::empty(n);
                let mut all: Vec<(usize, usize)> = (0..n).flat_map(|j| (0..j).map(move |i| (i, j))).collect();
                all.shuffle(&mut rng);
                for &(i, j) in all.iter().take(a.edge_count()) {
                    b.add_edge(i, j);
                }
                b
            };
            assert_eq!(are_isomorphic(&a, &b), isomorphic_by_search(&a, &b, &perms), "n={n}");
        }
    }
    // Eight vertices: the two cubic graphs built on an 8-cycle.
    let perms = permutations(8);
    let ring: Vec<(usize, usize)> = (0..8).map(|i| (i, (i + 1) % 8)).collect();
    let cube = Graph::from_edges(8, &[ring.clone(), vec![(0, 5), (1, 4), (2, 7), (3, 6)]].concat());
    let mobius = Graph::from_edges(8, &[ring, vec![(0, 4), (1, 5), (2, 6), (3, 7)]].concat());
    assert!(!are_isomorphic(&cube, &mobius));
    assert!(!isomorphic_by_search(&cube, &mobius, &perms));
    let shuffled = cube.relabel(&[3, 0, 6, 1, 7, 2, 5, 4]);
    assert!(are_isomorphic(&cube, &shuffled));
}

#[test]
fn canonical_form_of_srg_cayley_graphs() {
    let g = catalog_group("g192");
    let p = PdsParams::order_64();
    let found = search_group(&g, &p, &SearchConfig::default()).unwrap().pds_list;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let first = cayley_graph(&g, &found[0].elements).unwrap();
    let form = canonical_form(&first);
    for rec in found.choose_multiple(&mut rng, 8) {
        let graph = cayley_graph(&g, &rec.elements).unwrap();
        let params = srg_params(&graph).unwrap();
        assert_eq!((params.v, params.k, params.lambda, params.mu), (64, 18, 2, 6));
        assert!(params.feasible());
        let mut perm: Vec<usize> = (0..64).collect();
        perm.shuffle(&mut rng);
        assert_eq!(canonical_form(&graph.relabel(&perm)), form);
    }
}

#[test]
fn automorphisms_are_closed_and_preserve_pds() {
    for g in [direct_product(&dihedral(8), &cyclic(4)), catalog_group("g2")] {
        let all = automorphism_group(&g).unwrap();
        let set: HashSet<&Vec<usize>> = all.iter().map(|a| &a.perm).collect();
        assert_eq!(set.len(), all.len());
        for a in &all {
            assert!(a.is_automorphism_of(&g));
            assert!(set.contains(&a.inverse().perm));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..2000 {
            let a = all.choose(&mut rng).unwrap();
            let b = all.choose(&mut rng).unwrap();
            assert!(set.contains(&a.compose(b).perm));
        }
    }
    let g = catalog_group("g192");
    let p = PdsParams::order_64();
    let d = &search_group(&g, &p, &SearchConfig::default()).unwrap().pds_list[0].elements;
    let mut count = 0;
    for_each_automorphism(&g, |sigma| {
        count += 1;
        if count % 97 == 0 {
            assert!(is_pds(&g, &sigma.map_set(d), &p));
        }
        true
    });
    assert_eq!(count, 147_456);
}

#[test]
fn classes_do_not_depend_on_input_order() {
    let g = catalog_group("g90");
    let p = PdsParams::order_64();
    let sets: Vec<Vec<usize>> =
        search_group(&g, &p, &SearchConfig::default()).unwrap().pds_list.into_iter().map(|r| r.elements).collect();
    let partition = |list: &[Vec<usize>]| -> BTreeSet<BTreeSet<Vec<usize>>> {
        equivalence_classes(&g, list)
            .unwrap()
            .into_iter()
            .map(|c| c.members.iter().map(|&m| list[m].clone()).collect())
            .collect()
    };
    let base = partition(&sets);
    assert_eq!(base.len(), 13);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..3 {
        let mut shuffled = sets.clone();
        shuffled.shuffle(&mut rng);
        assert_eq!(partition(&shuffled), base);
    }
    let classes = equivalence_classes(&g, &sets).unwrap();
    for c in &classes {
        let rep = &sets[c.representative];
        assert!(c.members.iter().all(|&m| &sets[m] >= rep));
    }
    assert_eq!(equivalence_classes(&g, &sets[..1]).unwrap().len(), 1);
}

#[test]
fn breakdowns_recount() {
    for id in ["g192", "g239", "g202"] {
        let g = catalog_group(id);
        let p = PdsParams::order_64();
        for rec in search_group(&g, &p, &SearchConfig::default()).unwrap().pds_list.iter().step_by(37) {
            let Some(b) = hadamard_breakdown(&g, &rec.elements) else { continue };
            assert_eq!(b.r.order(), 16);
            let mut union: Vec<usize> = b.parts.concat();
            union.sort_unstable();
            assert_eq!(union, rec.elements);
            for part in &b.parts {
                assert_eq!(part.len(), 6);
                let mut counts = [0usize; 64];
                for &x in part {
                    for &y in part {
                        if x != y {
                            counts[g.div(x, y)] += 1;
                        }
                    }
                }
                for h in 1..64 {
                    assert_eq!(counts[h], if b.r.contains(h) { 2 } else { 0 }, "{id}");
                }
                assert!(covers_subgroup(&g, &b.r, part, 2));
            }
        }
    }
    // C8 x C8 has a single C2^2 quotient and no (0,6,6,6) split of this set.
    let g = direct_product(&cyclic(8), &cyclic(8));
    let real: Vec<usize> = [12, 33, 18, 20, 34, 25, 11, 28, 44, 35, 37, 52, 38, 60, 39, 54, 61, 47]
        .iter()
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    assert!(is_pds(&g, &real, &PdsParams::order_64()));
    assert!(hadamard_breakdown(&g, &real).is_none());
}

#[test]
fn trivial_semidirect_is_direct() {
    let n = cyclic(4);
    let h = dihedral(6);
    let trivial: Vec<Vec<usize>> = vec![(0..4).collect(); 6];
    assert_eq!(semidirect_product(&n, &h, &trivial).unwrap().to_table(), direct_product(&n, &h).to_table());
    let d8 = semidirect_product(&cyclic(4), &cyclic(2), &[vec![0, 1, 2, 3], vec![0, 3, 2, 1]]).unwrap();
    assert!(!d8.is_abelian());
    assert_eq!(d8.involutions().count(), 5);
}

#[test]
fn parallel_search_matches_serial() {
    let g = catalog_group("g193");
    let p = PdsParams::order_64();
    let serial = search_group(&g, &p, &SearchConfig::default()).unwrap();
    let parallel = search_group(&g, &p, &SearchConfig { parallelism: 3, ..SearchConfig::default() }).unwrap();
    assert_eq!(serial.pds_list, parallel.pds_list);
    assert_eq!(serial.stats.candidates_enumerated, parallel.stats.candidates_enumerated);
    let faithful = search_group(&g, &p, &SearchConfig::paper_faithful()).unwrap();
    let a: BTreeSet<&Vec<usize>> = serial.pds_list.iter().map(|r| &r.elements).collect();
    let b: BTreeSet<&Vec<usize>> = faithful.pds_list.iter().map(|r| &r.elements).collect();
    assert_eq!(a, b);
    let first = search_group(&g, &p, &SearchConfig { emit_all: false, ..SearchConfig::default() }).unwrap();
    assert_eq!(first.pds_list.len(), 1);
    assert!(a.contains(&first.pds_list[0].elements));
}
