#![allow(dead_code)]

use std::collections::BTreeSet;

use cnz_core::oracle::random_polynomial;
use cnz_core::{GridSpec, Polynomial, RingSpec};
use proptest::prelude::*;

pub fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 5, 7, 11, 101])
}

/// A random polynomial over F_p with arity 1..=max_arity and partial
/// degrees at most max_deg.
pub fn poly_over(p: u64, max_arity: usize, max_deg: u32) -> impl Strategy<Value = Polynomial> {
    let ring = RingSpec::prime_field(p).unwrap();
    (1..=max_arity)
        .prop_flat_map(move |n| {
            (
                Just(n),
                prop::collection::vec(0..=max_deg, n),
                0.1f64..=1.0,
                any::<u64>(),
            )
        })
        .prop_map(move |(n, caps, density, seed)| {
            random_polynomial(n, &caps, density, ring, seed).unwrap()
        })
}

pub fn poly() -> impl Strategy<Value = Polynomial> {
    prime().prop_flat_map(|p| poly_over(p, 3, 4))
}

/// Distinct elements of F_p, 1..=max_size of them, in random order.
pub fn set_over(p: u64, max_size: usize) -> impl Strategy<Value = Vec<i64>> {
    let cap = max_size.min(p as usize);
    prop::collection::btree_set(0..p as i64, 1..=cap)
        .prop_map(|s: BTreeSet<i64>| s.into_iter().collect::<Vec<_>>())
        .prop_shuffle()
}

pub fn grid_for(f: &Polynomial, max_size: usize) -> impl Strategy<Value = GridSpec> {
    let ring = f.ring();
    let p = ring.modulus().unwrap();
    prop::collection::vec(set_over(p, max_size), f.arity())
        .prop_map(move |sets| GridSpec::from_ints(ring, &sets).unwrap())
}

pub fn poly_and_grid(max_size: usize) -> impl Strategy<Value = (Polynomial, GridSpec)> {
    poly().prop_flat_map(move |f| {
        let g = grid_for(&f, max_size);
        (Just(f), g)
    })
}
