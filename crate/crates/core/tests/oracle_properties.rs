mod common;

use cnz_core::analysis::{lex_largest, maximal_monomials, permutations, successively_largest};
use cnz_core::bounds::{
    additive_existence_bound, gen_alon_furedi_bound, product_bound, AFInstance,
};
use cnz_core::oracle::*;
use cnz_core::{ExponentVector, GridSpec, Polynomial, RingSpec};
use common::*;
use proptest::prelude::*;

/// A grid with |S_i| = d_i + 1 + extra_i, first elements 0, 1, 2, ...
fn grid_above(ring: RingSpec, d: &ExponentVector, extra: &[u32]) -> GridSpec {
    let sets: Vec<Vec<i64>> = (0..d.len())
        .map(|i| (0..(d[i] + 1 + extra[i]) as i64).collect())
        .collect();
    GridSpec::from_ints(ring, &sets).unwrap()
}

fn nonzeros(f: &Polynomial, grid: &GridSpec) -> u128 {
    count_nonzeros(f, grid).unwrap().nonzeros
}

fn small_poly() -> impl Strategy<Value = Polynomial> {
    prop::sample::select(vec![5u64, 7, 11]).prop_flat_map(|p| poly_over(p, 3, 3))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn existence_conclusion(f in small_poly()) {
        prop_assume!(!f.is_zero());
        // Partial degrees are at most 3, so sets of size d_i + 2 fit in F_5.
        for d in maximal_monomials(&f).unwrap() {
            let grid = grid_above(f.ring(), &d, &vec![0; d.len()]);
            prop_assert!(nonzeros(&f, &grid) >= 1);
            let wide = grid_above(f.ring(), &d, &vec![1; d.len()]);
            prop_assert!(nonzeros(&f, &wide) >= additive_existence_bound(&wide.sizes(), d.as_slice()).unwrap());
        }
    }

    #[test]
    fn quantitative_conclusion_for_lex_largest((f, grid) in poly_and_grid(6)) {
        prop_assume!(!f.is_zero());
        let sizes = grid.sizes();
        let count = nonzeros(&f, &grid);
        for order in permutations(f.arity()) {
            let d = lex_largest(&f, &order).unwrap();
            if let Ok(b) = product_bound(&sizes, d.as_slice()) {
                prop_assert!(count >= b);
            }
            for e in f.support() {
                let d = successively_largest(&f, e, &order).unwrap();
                if let Ok(b) = product_bound(&sizes, d.as_slice()) {
                    prop_assert!(count >= b);
                }
            }
        }
    }

    #[test]
    fn generalized_alon_furedi_is_sound((f, grid) in poly_and_grid(6)) {
        prop_assume!(!f.is_zero());
        let deg = f.degrees().unwrap();
        let sizes = grid.sizes();
        if let Ok(inst) = AFInstance::new(sizes, deg.partial.clone(), deg.total) {
            prop_assert!(nonzeros(&f, &grid) >= gen_alon_furedi_bound(&inst).unwrap().0);
        }
    }

    #[test]
    fn tightness_family_is_tight(
        sets in prop::collection::vec(set_over(7, 6), 1..=3),
        frac in prop::collection::vec(0.0f64..=1.0, 3),
    ) {
        let ring = RingSpec::prime_field(7).unwrap();
        let grid = GridSpec::from_ints(ring, &sets).unwrap();
        let d: Vec<u32> = sets.iter().zip(&frac).map(|(s, f)| (s.len() as f64 * f).floor() as u32).collect();
        let d = ExponentVector::new(d);
        let f = tightness_family(&grid, &d, None).unwrap();
        let expected: u128 = sets.iter().zip(d.as_slice()).map(|(s, &k)| (s.len() - k as usize) as u128).product();
        prop_assert_eq!(nonzeros(&f, &grid), expected);
        prop_assert_eq!(maximal_monomials(&f).unwrap(), vec![d.clone()]);
        if d.as_slice().iter().zip(&sets).all(|(&k, s)| (k as usize) < s.len()) {
            prop_assert_eq!(product_bound(&grid.sizes(), d.as_slice()).unwrap(), expected);
        }
    }

    #[test]
    fn counts_do_not_depend_on_thread_count((f, grid) in poly_and_grid(7)) {
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| count_nonzeros(&f, &grid).unwrap());
        let b = four.install(|| count_nonzeros(&f, &grid).unwrap());
        prop_assert_eq!(a, b);
    }
}

#[test]
fn partition_independence_on_a_large_grid() {
    let ring = RingSpec::prime_field(101).unwrap();
    let f = random_polynomial(3, &[3, 3, 3], 0.5, ring, 11).unwrap();
    let grid = GridSpec::uniform(ring, &(0..60).collect::<Vec<_>>(), 3).unwrap();
    let one = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let many = rayon::ThreadPoolBuilder::new()
        .num_threads(8)
        .build()
        .unwrap();
    let a = one.install(|| count_nonzeros(&f, &grid).unwrap());
    let b = many.install(|| count_nonzeros(&f, &grid).unwrap());
    assert_eq!(a, b);
    assert_eq!(a.nonzeros + a.zeros, 216_000);
}
