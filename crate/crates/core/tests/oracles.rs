//! The engine against brute force: product sets over every ordering,
//! censuses by direct enumeration, and the invariants those censuses give.

mod common;

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zerosum::classify;
use zerosum::invariants::{self, SearchOptions};
use zerosum::products;
use zerosum::{Element, Group, Sequence};

fn random_terms(rng: &mut ChaCha8Rng, group: &Group, max_len: usize) -> Vec<Element> {
    let len = rng.gen_range(1..=max_len);
    let mut t: Vec<Element> = (0..len).map(|_| Element::new(rng.gen_range(0..group.size()))).collect();
    t.sort();
    t
}

#[test]
fn pi_matches_all_orderings() {
    let groups = small_groups();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..1000 {
        let g = &groups[rng.gen_range(0..groups.len())];
        let terms = random_terms(&mut rng, g, 6);
        let seq = Sequence::from_elements(terms.iter().copied());
        assert_eq!(products::pi(g, &seq).unwrap(), pi_by_permutations(g, &terms), "{} {:?}", g.name(), terms);
    }
}

#[test]
fn big_pi_matches_position_subsets() {
    let groups = small_groups();
    let mut rng = ChaCha8Rng::seed_from_u64(0xb16);
    for _ in 0..1000 {
        let g = &groups[rng.gen_range(0..groups.len())];
        let terms = random_terms(&mut rng, g, 8);
        let seq = Sequence::from_elements(terms.iter().copied());
        assert_eq!(products::pi_all(g, &seq).unwrap(), big_pi_by_positions(g, &terms, None));
        let n = rng.gen_range(1..=terms.len());
        assert_eq!(products::pi_n(g, &seq, n).unwrap(), big_pi_by_positions(g, &terms, Some(n)));
        assert_eq!(products::is_product_one_free(g, &seq).unwrap(), !has_product_one(g, &terms, None));
    }
}

#[test]
fn davenport_matches_brute_force() {
    for (g, d) in [(Group::metacyclic(2, 3, 2).unwrap(), 3), (Group::metacyclic(2, 5, 4).unwrap(), 5)] {
        assert_eq!(brute_davenport(&g), d, "{}", g.name());
        assert_eq!(invariants::davenport_closed_form(&g), Some(d));
    }
    for g in small_groups() {
        let r = invariants::small_davenport(&g, &SearchOptions::default()).unwrap();
        assert_eq!(r.value, brute_davenport(&g), "{}", g.name());
    }
}

#[test]
fn extremal_free_census_s3() {
    let g = Group::metacyclic(2, 3, 2).unwrap();
    let brute = brute_free_census(&g, 3);
    assert_eq!(brute.len(), 7);
    let census = invariants::census_extremal_pof(&g, &SearchOptions::default()).unwrap();
    assert_eq!(census.sequences.into_iter().collect::<std::collections::BTreeSet<_>>(), brute);
    let generated: std::collections::BTreeSet<_> = classify::generate_t11(&g).unwrap().into_iter().collect();
    assert_eq!(generated, brute);
}

#[test]
fn extremal_free_census_order_21() {
    let g = Group::metacyclic(3, 7, 2).unwrap();
    assert!(brute_free_census(&g, 9).is_empty());
    let brute = brute_free_census(&g, 8);
    assert_eq!(brute.len(), 336);
    let generated: std::collections::BTreeSet<_> = classify::generate_t11(&g).unwrap().into_iter().collect();
    assert_eq!(generated, brute);
}

#[test]
fn gao_and_big_free_census_s3() {
    let g = Group::metacyclic(2, 3, 2).unwrap();
    assert!(brute_big_free_census(&g, 9).is_empty());
    let brute = brute_big_free_census(&g, 8);
    assert_eq!(brute.len(), 19);
    let census = invariants::census_extremal_bigpof(&g, &SearchOptions::default()).unwrap();
    assert_eq!(census.sequences.into_iter().collect::<std::collections::BTreeSet<_>>(), brute);
    let generated: std::collections::BTreeSet<_> = classify::generate_t12(&g).unwrap().into_iter().collect();
    assert_eq!(generated, brute);
    assert_eq!(invariants::gao_closed_form(&g), Some(9));
}

#[test]
fn cyclic_free_census_is_generator_powers() {
    for n in 3..=8usize {
        let g = Group::cyclic(n).unwrap();
        let brute = brute_free_census(&g, n - 1);
        let expected: std::collections::BTreeSet<Sequence> = (1..n)
            .filter(|&k| zerosum::group::gcd(k as u64, n as u64) == 1)
            .map(|k| Sequence::power(Element::new(k), n as u32 - 1))
            .collect();
        assert_eq!(brute, expected, "C{n}");
    }
}

#[test]
fn big_free_census_order_10() {
    let g = Group::metacyclic(2, 5, 4).unwrap();
    let brute = brute_big_free_census(&g, 14);
    assert_eq!(brute.len(), 100);
    let generated: std::collections::BTreeSet<_> = classify::generate_t12(&g).unwrap().into_iter().collect();
    assert_eq!(generated, brute);
}
