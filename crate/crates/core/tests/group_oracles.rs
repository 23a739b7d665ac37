mod common;

use coklab::groups::{
    aut_order, count_homs, count_surjections, groups_of_order, FiniteAbelianGroup,
};
use num_bigint::BigUint;
use proptest::prelude::*;

fn group(chain: &[u64]) -> FiniteAbelianGroup {
    FiniteAbelianGroup::from_cyclic_orders(chain)
}

fn chain_of(g: &FiniteAbelianGroup) -> Vec<u64> {
    g.invariant_factors()
        .iter()
        .map(|d| u64::try_from(d).unwrap())
        .collect()
}

#[test]
fn enumeration_of_groups_matches_chains() {
    // number of abelian groups of order n for n = 1..=64
    let expected = [
        1, 1, 1, 2, 1, 1, 1, 3, 2, 1, 1, 2, 1, 1, 1, 5, 1, 2, 1, 2, 1, 1, 1, 3, 2, 1, 3, 2, 1, 1,
        1, 7, 1, 1, 1, 4, 1, 1, 1, 3, 1, 1, 1, 2, 2, 1, 1, 5, 2, 2, 1, 2, 1, 3, 1, 3, 1, 1, 1, 2,
        1, 1, 2, 11,
    ];
    for n in 1..=64u64 {
        let chains = common::chains_of_order(n);
        assert_eq!(chains.len(), expected[n as usize - 1], "n = {n}");
        let mut lib: Vec<Vec<u64>> = groups_of_order(n).iter().map(chain_of).collect();
        let mut ours = chains.clone();
        lib.sort();
        ours.sort();
        assert_eq!(lib, ours, "n = {n}");
    }
}

#[test]
fn literal_enumeration_small() {
    let cases: &[(&[u64], &[u64])] = &[
        (&[2, 2], &[2, 2]),
        (&[4, 2], &[2, 4]),
        (&[4], &[2]),
        (&[2, 2], &[2]),
        (&[2], &[4]),
        (&[6], &[4]),
        (&[3], &[3]),
        (&[2, 4], &[2, 2]),
        (&[8], &[2, 2]),
        (&[3, 3], &[3]),
    ];
    for (a, g) in cases {
        let (homs, surs, bij) = common::literal_count(a, g);
        let (ga, gg) = (group(a), group(g));
        assert_eq!(count_homs(&ga, &gg), BigUint::from(homs), "{a:?} -> {g:?}");
        assert_eq!(count_surjections(&ga, &gg).unwrap(), BigUint::from(surs));
        assert_eq!(common::surjections(a, g), surs);
        if ga == gg {
            assert_eq!(aut_order(&gg), BigUint::from(bij));
        }
    }
}

#[test]
fn aut_order_matches_enumeration_up_to_64() {
    for n in 1..=64u64 {
        for chain in common::chains_of_order(n) {
            let expected = common::surjections(&chain, &chain);
            assert_eq!(aut_order(&group(&chain)), BigUint::from(expected), "{chain:?}");
        }
    }
}

#[test]
fn surjections_match_enumeration_up_to_32() {
    let all: Vec<Vec<u64>> = (1..=32).flat_map(common::chains_of_order).collect();
    for g in &all {
        let gg = group(g);
        for a in &all {
            let expected = common::surjections(a, g);
            assert_eq!(
                count_surjections(&group(a), &gg).unwrap(),
                BigUint::from(expected),
                "{a:?} -> {g:?}"
            );
        }
    }
}

#[test]
fn homs_split_by_image() {
    // every hom surjects onto its image, so the counts per image H are
    // Sur(a, H) and they add up to Hom(a, g)
    let targets: &[&[u64]] = &[&[2, 4], &[2, 2, 2], &[12], &[3, 3], &[2, 8], &[2, 2, 4]];
    let sources: &[&[u64]] = &[&[2], &[4, 4], &[2, 6], &[8], &[2, 2, 2], &[24]];
    for g in targets {
        for a in sources {
            let by_image = common::homs_by_image(a, g);
            let total: u64 = by_image.values().sum();
            assert_eq!(count_homs(&group(a), &group(g)), BigUint::from(total));
            for (&h, &count) in &by_image {
                let ty = group(&common::subgroup_type(g, h));
                assert_eq!(
                    count_surjections(&group(a), &ty).unwrap(),
                    BigUint::from(count),
                    "{a:?} onto {ty} inside {g:?}"
                );
            }
        }
    }
}

#[test]
fn surjections_onto_self_are_automorphisms() {
    for n in 1..=64u64 {
        for g in groups_of_order(n) {
            assert_eq!(count_surjections(&g, &g).unwrap(), aut_order(&g), "{g}");
        }
    }
}

fn small_group() -> impl Strategy<Value = FiniteAbelianGroup> {
    prop::collection::vec(1u64..=12, 0..4).prop_map(|v| group(&v))
}

proptest! {
    #[test]
    fn hom_sum_over_subgroup_types(a in small_group(), g in prop::sample::select(vec![
        vec![2u64, 4], vec![6], vec![2, 2], vec![3, 9], vec![2, 2, 2], vec![4, 4]
    ])) {
        let by_image = common::homs_by_image(&chain_of(&a), &g);
        let total: BigUint = by_image
            .keys()
            .map(|&h| count_surjections(&a, &group(&common::subgroup_type(&g, h))).unwrap())
            .sum();
        prop_assert_eq!(total, count_homs(&a, &group(&g)));
    }

    #[test]
    fn surjections_vanish_when_order_too_small(
        a in small_group(),
        g in prop::collection::vec(1u64..=6, 0..3).prop_map(|v| group(&v)),
    ) {
        if a.order() < g.order() {
            prop_assert_eq!(count_surjections(&a, &g).unwrap(), BigUint::from(0u32));
        }
    }
}
