use cnz_core::pit::*;
use cnz_core::RingSpec;
use num_rational::BigRational;
use proptest::prelude::*;

fn f101() -> RingSpec {
    RingSpec::prime_field(101).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn identities_are_never_refuted(seed in any::<u64>(), ops in 1usize..8, trials in 1u64..30) {
        let g = random_dag(f101(), 3, ops, seed).unwrap();
        // Structurally different but equal DAG: its own expansion.
        let expanded = g.expand().unwrap();
        let text = expanded.to_string();
        let h = cnz_core::parse_dag(&text, &cnz_core::Variables::Indexed(3), f101()).unwrap();
        let d = degree_upper_bound(&difference(&g, &h).unwrap());
        prop_assume!(d < 101);
        let v = identity_test(&g, &h, 101, trials, seed).unwrap();
        prop_assert!(v.is_all_zero());
    }

    #[test]
    fn verdicts_are_deterministic(seed in any::<u64>(), a in any::<u64>(), b in any::<u64>()) {
        let g = random_dag(f101(), 2, 5, a).unwrap();
        let h = random_dag(f101(), 2, 5, b).unwrap();
        let d = degree_upper_bound(&difference(&g, &h).unwrap());
        prop_assume!(d < 101);
        prop_assert_eq!(identity_test(&g, &h, 101, 5, seed).unwrap(), identity_test(&g, &h, 101, 5, seed).unwrap());
    }

    #[test]
    fn degree_bound_is_an_upper_bound(seed in any::<u64>(), ops in 1usize..10) {
        let g = random_dag(f101(), 3, ops, seed).unwrap();
        let p = g.expand().unwrap();
        if !p.is_zero() {
            prop_assert!(p.degrees().unwrap().total <= degree_upper_bound(&g));
        }
    }
}

#[test]
fn zero_fraction_respects_the_degree_bound() {
    let s = 10u64;
    let mut tested = 0;
    let mut seed = 0u64;
    while tested < 200 {
        seed += 1;
        let g = random_dag(f101(), 2, 5, seed).unwrap();
        let h = random_dag(f101(), 2, 5, seed + 1_000_000).unwrap();
        let diff = difference(&g, &h).unwrap();
        let d = degree_upper_bound(&diff);
        if d >= s || diff.expand().unwrap().is_zero() {
            continue;
        }
        let frac = zero_fraction(&diff, s).unwrap();
        assert!(
            frac <= BigRational::new(d.into(), s.into()),
            "seed {seed}: {frac} > {d}/{s}"
        );
        tested += 1;
    }
}
