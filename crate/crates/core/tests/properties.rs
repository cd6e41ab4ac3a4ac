//! Property-based runs of the consistency checks in `reproduce::properties`.

use drep_core::graded::Letter;
use drep_core::presentation::builtin_resolution;
use drep_core::rep::rep_n;
use drep_core::reproduce::properties::{
    check_cyclic, check_cyclic_derivative, check_koszul, check_mu, check_trace_invariance, parity_alphabet,
};
use proptest::prelude::*;

fn parities(max: usize) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..=1, 1..=max)
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

/// Parities with a pair of permutations of matching length.
fn koszul_case() -> impl Strategy<Value = (Vec<u8>, Vec<usize>, Vec<usize>)> {
    parities(7).prop_flat_map(|p| {
        let n = p.len();
        (Just(p), permutation(n), permutation(n))
    })
}

/// An alphabet of one to three letters with random parities, and words over it.
fn words(count: usize, max_len: usize) -> impl Strategy<Value = (Vec<u8>, Vec<Vec<Letter>>)> {
    parities(3).prop_flat_map(move |p| {
        let k = p.len() as Letter;
        (
            Just(p),
            prop::collection::vec(prop::collection::vec(0..k, 1..=max_len), count),
        )
    })
}

/// A word over the generators of a builtin, of weight at most `max_weight`.
fn weighted_word(name: &'static str, max_weight: u32) -> impl Strategy<Value = Vec<Letter>> {
    let p = builtin_resolution(name, max_weight).unwrap();
    let letters: Vec<(Letter, u32)> = p
        .generators()
        .iter()
        .enumerate()
        .filter(|(_, g)| g.weight <= max_weight)
        .map(|(i, g)| (i as Letter, g.weight))
        .collect();
    prop::collection::vec(prop::sample::select(letters), 1..=max_weight as usize).prop_map(move |ls| {
        let mut total = 0;
        ls.into_iter()
            .take_while(|&(_, w)| {
                total += w;
                total <= max_weight
            })
            .map(|(l, _)| l)
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn koszul_sign_is_multiplicative((p, sigma, tau) in koszul_case()) {
        let failure = check_koszul(&p, &sigma, &tau).unwrap();
        prop_assert!(failure.is_none(), "{}", failure.unwrap());
    }

    #[test]
    fn cyclic_canonical_forms((p, ws) in words(1, 7)) {
        let a = parity_alphabet(&p).unwrap();
        let failure = check_cyclic(&a, &ws[0]).unwrap();
        prop_assert!(failure.is_none(), "{}", failure.unwrap());
    }

    #[test]
    fn cyclic_derivative_kills_commutators((p, ws) in words(2, 3)) {
        let a = parity_alphabet(&p).unwrap();
        let failure = check_cyclic_derivative(&a, &ws[0], &ws[1]).unwrap();
        prop_assert!(failure.is_none(), "{}", failure.unwrap());
    }

    #[test]
    fn traces_of_dual_number_words_are_invariant(w in weighted_word("dual-numbers", 4), n in 1usize..=2) {
        let alg = rep_n(&builtin_resolution("dual-numbers", 4).unwrap(), n).unwrap();
        let failure = check_trace_invariance(&alg, &w).unwrap();
        prop_assert!(failure.is_none(), "{}", failure.unwrap());
    }

    #[test]
    fn traces_of_commuting_plane_words_are_invariant(w in weighted_word("commuting-plane", 4)) {
        let alg = rep_n(&builtin_resolution("commuting-plane", 4).unwrap(), 2).unwrap();
        let failure = check_trace_invariance(&alg, &w).unwrap();
        prop_assert!(failure.is_none(), "{}", failure.unwrap());
    }

    #[test]
    fn stabilization_is_compatible_with_traces(w in weighted_word("square-zero:2", 4), n in 2usize..=3) {
        let p = builtin_resolution("square-zero:2", 4).unwrap();
        let big = rep_n(&p, n).unwrap();
        let small = rep_n(&p, n - 1).unwrap();
        let failure = check_mu(&big, &small, &w).unwrap();
        prop_assert!(failure.is_none(), "{}", failure.unwrap());
    }
}
