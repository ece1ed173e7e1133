mod common;

use cnz_core::analysis::{maximal_monomials, permutations};
use cnz_core::transform::*;
use cnz_core::{ExponentVector, GridSpec, RingSpec};
use common::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn trimming_preserves_grid_values_and_reduces_degrees((f, grid) in poly_and_grid(5)) {
        let t = trim(&f, &grid).unwrap();
        let sizes = grid.sizes();
        for e in t.support() {
            for i in 0..e.len() {
                prop_assert!((e[i] as u64) < sizes[i]);
            }
        }
        for p in grid.points() {
            let pt: Vec<_> = p.into_iter().map(|x| f.ring().elem(x)).collect();
            prop_assert_eq!(f.evaluate(&pt).unwrap(), t.evaluate(&pt).unwrap());
        }
    }

    #[test]
    fn trimming_keeps_small_maximal_coefficients((f, grid) in poly_and_grid(5)) {
        prop_assume!(!f.is_zero());
        let t = trim(&f, &grid).unwrap();
        let sizes = grid.sizes();
        for e in maximal_monomials(&f).unwrap() {
            if (0..e.len()).all(|i| (e[i] as u64) < sizes[i]) {
                prop_assert_eq!(t.coefficient(&e), f.coefficient(&e));
            }
        }
    }

    #[test]
    fn trimming_order_does_not_matter((f, grid) in poly_and_grid(4)) {
        let reference = trim(&f, &grid).unwrap();
        for order in permutations(f.arity()) {
            prop_assert_eq!(trim_in_order(&f, &grid, &order).unwrap(), reference.clone());
        }
    }

    #[test]
    fn trimming_over_the_integers(f in prime().prop_flat_map(|p| poly_over(p, 2, 5)), shift in -5i64..5) {
        let z = RingSpec::integers();
        let terms: Vec<(Vec<u32>, num_bigint::BigInt)> = f.terms().map(|(e, c)| (e.as_slice().to_vec(), c.value().clone())).collect();
        let g = cnz_core::Polynomial::from_terms(z, f.arity(), terms).unwrap();
        let sets: Vec<Vec<i64>> = (0..g.arity()).map(|i| (shift..shift + 2 + i as i64).collect()).collect();
        let grid = GridSpec::from_ints(z, &sets).unwrap();
        let t = trim(&g, &grid).unwrap();
        for p in grid.points() {
            let pt: Vec<_> = p.into_iter().map(|x| z.elem(x)).collect();
            prop_assert_eq!(g.evaluate(&pt).unwrap(), t.evaluate(&pt).unwrap());
        }
    }

    #[test]
    fn coefficient_formula(f in prop::sample::select(vec![2u64, 3, 5, 7, 11, 13]).prop_flat_map(|p| poly_over(p, 3, 3)), pick in any::<prop::sample::Index>()) {
        prop_assume!(!f.is_zero());
        let p = f.ring().modulus().unwrap();
        let maximal = maximal_monomials(&f).unwrap();
        let d = pick.get(&maximal).clone();
        prop_assume!(d.as_slice().iter().all(|&k| (k as u64) < p));
        let sets: Vec<Vec<i64>> = d.as_slice().iter().map(|&k| (0..=k as i64).collect()).collect();
        let grid = GridSpec::from_ints(f.ring(), &sets).unwrap();
        let values = grid_values(&f, &grid).unwrap();
        prop_assert_eq!(coefficient_via_grid(&values, &grid, &d).unwrap(), f.coefficient(&d));
    }

    #[test]
    fn multipliers_satisfy_their_moments(set in set_over(101, 8), d in 0u32..8) {
        let ring = RingSpec::prime_field(101).unwrap();
        let elems: Vec<_> = set.iter().map(|&x| ring.elem(x)).collect();
        let d = d.min(elems.len() as u32 - 1);
        let m = vandermonde_multipliers(&elems, Some(d)).unwrap();
        for k in 0..d as u64 {
            prop_assert!(m.moment(k).is_zero());
        }
        prop_assert_eq!(m.moment(d as u64), ring.one());
    }
}

#[test]
fn coefficient_of_absent_maximal_candidate_is_zero() {
    let ring = RingSpec::prime_field(7).unwrap();
    let f = cnz_core::Polynomial::from_terms(ring, 2, [(vec![1, 0], 3), (vec![0, 0], 1)]).unwrap();
    let grid = GridSpec::uniform(ring, &[2, 4], 2).unwrap();
    let values = grid_values(&f, &grid).unwrap();
    let d = ExponentVector::new(vec![1, 1]);
    assert!(coefficient_via_grid(&values, &grid, &d).unwrap().is_zero());
}
