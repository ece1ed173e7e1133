mod common;

use std::collections::HashMap;

use cnz_core::bounds::*;
use cnz_core::oracle::{random_polynomial, verify_bounds};
use cnz_core::{GridSpec, Polynomial, RingSpec};
use common::*;
use proptest::prelude::*;

fn naive_nonzeros(f: &Polynomial, grid: &GridSpec) -> u128 {
    grid.points()
        .filter(|p| {
            let pt: Vec<_> = p.iter().map(|x| f.ring().elem(x.clone())).collect();
            !f.evaluate(&pt).unwrap().is_zero()
        })
        .count() as u128
}

/// Minimum product for every achievable sum in the box `lower..=upper`.
fn lattice_minima(lower: &[u64], upper: &[u64]) -> HashMap<u64, u128> {
    let mut out: HashMap<u64, u128> = HashMap::new();
    let mut y = lower.to_vec();
    loop {
        let sum: u64 = y.iter().sum();
        let prod: u128 = y.iter().map(|&v| v as u128).product();
        out.entry(sum)
            .and_modify(|m| *m = (*m).min(prod))
            .or_insert(prod);
        let mut i = y.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if y[i] < upper[i] {
                y[i] += 1;
                break;
            }
            y[i] = lower[i];
        }
    }
}

#[test]
fn soundness_master_property() {
    let mut checked = 0usize;
    let mut case = 0u64;
    for &p in &[5u64, 7, 101] {
        let ring = RingSpec::prime_field(p).unwrap();
        for k in 0..420u64 {
            case += 1;
            let n = 1 + (k % 3) as usize;
            let caps: Vec<u32> = (0..n)
                .map(|i| ((k / 3 + i as u64 * 5) % 5) as u32)
                .collect();
            let density = 0.15 + 0.1 * (k % 8) as f64;
            let f = random_polynomial(n, &caps, density, ring, case).unwrap();
            if f.is_zero() {
                continue;
            }
            let size = |i: usize| 1 + ((k * 7 + i as u64 * 3) % 7) as i64;
            let sets: Vec<Vec<i64>> = (0..n)
                .map(|i| {
                    (0..size(i).min(p as i64))
                        .map(|x| (x * 3 + k as i64) % p as i64)
                        .collect()
                })
                .collect();
            let grid = GridSpec::from_ints(ring, &sets).unwrap();
            let rep = verify_bounds(&f, &grid).unwrap();
            assert_eq!(rep.nonzero_count, naive_nonzeros(&f, &grid));
            for c in &rep.per_bound {
                if c.bound.certified {
                    assert!(
                        c.sound,
                        "{} unsound for {f} on {:?}: {:?}",
                        c.bound.name,
                        grid.sets(),
                        c
                    );
                }
            }
            checked += 1;
        }
    }
    assert!(checked >= 1000, "only {checked} cases");
}

#[test]
fn gen_alon_furedi_dp_matches_lattice_enumeration() {
    for n in 1..=3usize {
        let mut sizes = vec![1u64; n];
        loop {
            let mut caps = vec![0u32; n];
            loop {
                let lower: Vec<u64> = sizes
                    .iter()
                    .zip(&caps)
                    .map(|(&s, &c)| s - c as u64)
                    .collect();
                let minima = lattice_minima(&lower, &sizes);
                let cap_sum: u64 = caps.iter().map(|&c| c as u64).sum();
                for d in 0..=cap_sum {
                    let inst = AFInstance::new(sizes.clone(), caps.clone(), d).unwrap();
                    let target = sizes.iter().sum::<u64>() - d;
                    let (v, ys) = gen_alon_furedi_bound(&inst).unwrap();
                    assert_eq!(v, minima[&target], "{sizes:?} {caps:?} {d}");
                    assert_eq!(ys.iter().sum::<u64>(), target);
                    assert_eq!(ys.iter().map(|&y| y as u128).product::<u128>(), v);
                    let relaxed = (target..=sizes.iter().sum())
                        .filter_map(|t| minima.get(&t))
                        .min();
                    assert_eq!(
                        gen_alon_furedi_bound_relaxed(&inst).unwrap().0,
                        *relaxed.unwrap()
                    );
                    assert_eq!(gen_alon_furedi_bound_relaxed(&inst).unwrap().0, v);
                }
                if !next_caps(&mut caps, &sizes) {
                    break;
                }
            }
            if !next_sizes(&mut sizes, 6) {
                break;
            }
        }
    }
}

fn next_caps(caps: &mut [u32], sizes: &[u64]) -> bool {
    for i in 0..caps.len() {
        if (caps[i] as u64) + 1 < sizes[i] {
            caps[i] += 1;
            return true;
        }
        caps[i] = 0;
    }
    false
}

fn next_sizes(sizes: &mut [u64], max: u64) -> bool {
    for s in sizes.iter_mut() {
        if *s < max {
            *s += 1;
            return true;
        }
        *s = 1;
    }
    false
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn product_dominates_additive(sizes in prop::collection::vec(1u64..=9, 1..=4), seed in any::<u64>()) {
        let d: Vec<u32> = sizes.iter().enumerate().map(|(i, &s)| ((seed >> (4 * i)) % s) as u32).collect();
        let prod = product_bound(&sizes, &d).unwrap();
        prop_assert!(prod >= schwartz_additive_bound(&sizes, &d).unwrap());
        prop_assert!(prod >= additive_existence_bound(&sizes, &d).unwrap());
        let total = d.iter().map(|&k| k as u64).sum();
        let inst = AFInstance::new(sizes.clone(), d.clone(), total).unwrap();
        prop_assert_eq!(gen_alon_furedi_bound(&inst).unwrap().0, prod);
    }

    #[test]
    fn original_greedy_matches_dp(sizes in prop::collection::vec(1u64..=9, 1..=4), frac in 0.0f64..=1.0) {
        let slack: u64 = sizes.iter().map(|s| s - 1).sum();
        let d = (slack as f64 * frac).floor() as u64;
        prop_assert_eq!(
            alon_furedi_original_bound(&sizes, d).unwrap().0,
            alon_furedi_original_dp(&sizes, d).unwrap().0
        );
    }

    #[test]
    fn sz_count_and_probability_agree(s in 1u64..50, d in 0u64..50, n in 1u32..4) {
        prop_assume!(d < s);
        let prob = sz_probability(d, s).unwrap();
        let count = schwartz_zippel_count(s, d, n).unwrap();
        let total = (s as u128).pow(n);
        let zeros_allowed = prob * num_rational::BigRational::from_integer(total.into());
        prop_assert_eq!(num_bigint::BigInt::from(total - count), zeros_allowed.to_integer());
    }

    #[test]
    fn bounds_for_is_deterministic((f, grid) in poly_and_grid(5)) {
        prop_assume!(!f.is_zero());
        prop_assert_eq!(bounds_for(&f, &grid).unwrap(), bounds_for(&f, &grid).unwrap());
    }
}
