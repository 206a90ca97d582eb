//! Properties of the core operations, checked against enumerated relations.

mod common;

use common::machines::{self, bounded, diff, random_fst, relation};
use lexfst::fst::compile_labels;
use lexfst::numbers::{build_decade_flop, build_factorizer, register_tokens};
use lexfst::{
    best_path, compose, enumerate_paths, invert, project, Side, SymbolTable, Weight,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn rational_ops_small_batch() {
    common::suites::rational_ops(100, 11).unwrap();
}

#[test]
fn best_path_small_batch() {
    common::suites::best_paths(200, 12).unwrap();
}

#[test]
fn factorizer_three_digits() {
    common::suites::factorizer(3).unwrap();
}

fn weight() -> impl Strategy<Value = Weight> {
    prop_oneof![
        Just(Weight::zero()),
        (0u32..40).prop_map(|k| Weight::new(k as f64 * 0.25)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn semiring_laws(a in weight(), b in weight(), c in weight()) {
        prop_assert_eq!(a.plus(b), b.plus(a));
        prop_assert_eq!(a.times(b), b.times(a));
        prop_assert_eq!(a.plus(b).plus(c), a.plus(b.plus(c)));
        prop_assert_eq!(a.times(b).times(c), a.times(b.times(c)));
        prop_assert_eq!(a.times(b.plus(c)), a.times(b).plus(a.times(c)));
        prop_assert_eq!(a.plus(Weight::zero()), a);
        prop_assert_eq!(a.times(Weight::one()), a);
        prop_assert_eq!(a.times(Weight::zero()), Weight::zero());
    }

    #[test]
    fn invert_is_an_involution(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = SymbolTable::new();
        let syms = machines::alphabet(&mut t);
        let f = random_fst(&mut rng, &t, &syms, 6, false);
        prop_assert_eq!(relation(&invert(&invert(&f)), 5), relation(&f, 5));
        let swapped: machines::Relation = relation(&f, 5)
            .into_iter()
            .map(|((x, y), w)| ((y, x), w))
            .collect();
        prop_assert_eq!(relation(&invert(&f), 5), swapped);
    }

    #[test]
    fn project_is_idempotent(seed in any::<u64>(), input in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = SymbolTable::new();
        let syms = machines::alphabet(&mut t);
        let f = random_fst(&mut rng, &t, &syms, 6, false);
        let side = if input { Side::Input } else { Side::Output };
        let once = project(&f, side);
        prop_assert!(once.is_acceptor());
        prop_assert_eq!(relation(&project(&once, side), 5), relation(&once, 5));
    }

    #[test]
    fn compile_string_projects_to_its_tokens(idx in prop::collection::vec(0usize..4, 0..8)) {
        let mut t = SymbolTable::new();
        let syms = machines::alphabet(&mut t);
        let labels: Vec<_> = idx.iter().map(|&i| syms[i]).collect();
        let f = project(&compile_labels(&labels, &t), Side::Input);
        let paths = enumerate_paths(&f, 16);
        prop_assert_eq!(paths.len(), 1);
        prop_assert_eq!(paths[0].input(), labels);
    }

    #[test]
    fn compose_matches_relation_join(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = SymbolTable::new();
        let syms = machines::alphabet(&mut t);
        let a = random_fst(&mut rng, &t, &syms, 6, false);
        let b = random_fst(&mut rng, &t, &syms, 6, true);
        let expected = bounded(&machines::compose_of(&relation(&a, 6), &relation(&b, 6)), 6);
        let got = relation(&compose(&a, &b).unwrap(), 6);
        prop_assert_eq!(diff(&expected, &got), None);
    }

    #[test]
    fn best_path_is_the_cheapest_path(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = SymbolTable::new();
        let syms = machines::alphabet(&mut t);
        let f = random_fst(&mut rng, &t, &syms, 6, true);
        let min = enumerate_paths(&f, 16).iter().fold(Weight::zero(), |m, p| m.plus(p.weight));
        match best_path(&f) {
            Ok(p) => prop_assert_eq!(p.weight, min),
            Err(_) => prop_assert!(min.is_zero()),
        }
    }
}

/// Without the decade flop exactly the numbers whose last two digits are a
/// unit after a nonzero tens digit change their factorization.
#[test]
fn decade_flop_changes_exactly_unit_after_decade() {
    let mut t = SymbolTable::new();
    register_tokens(&mut t, 4);
    let fac = build_factorizer(4, &mut t);
    let flop = build_decade_flop(&mut t);
    let flopped = compose(&fac, &flop).unwrap();
    for n in 0..10_000u32 {
        let digits: Vec<String> = n.to_string().chars().map(String::from).collect();
        let input = lexfst::compile_string(&digits, &mut t);
        let plain = best_path(&compose(&input, &fac).unwrap()).unwrap().output();
        let swapped = best_path(&compose(&input, &flopped).unwrap())
            .unwrap()
            .output();
        let expect_change = n % 100 > 10 && n % 10 != 0;
        assert_eq!(plain != swapped, expect_change, "{n}");
    }
}
