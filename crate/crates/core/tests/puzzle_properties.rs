use cnz_core::oracle::count_nonzeros;
use cnz_core::puzzle::*;
use cnz_core::{GridSpec, RingSpec};
use proptest::prelude::*;

fn distinct_vec(len: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::btree_set(-30i64..=30, len)
        .prop_map(|s| s.into_iter().collect::<Vec<_>>())
        .prop_shuffle()
}

fn instance() -> impl Strategy<Value = PuzzleInstance> {
    (1usize..=6).prop_flat_map(|s| {
        (
            distinct_vec(s),
            distinct_vec(s),
            prop::collection::vec(-60i64..=60, s),
            prop::collection::vec(-60i64..=60, s),
        )
            .prop_map(|(a, b, u, v)| PuzzleInstance::new(a, b, u, v).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn patterns_are_k22_free_and_below_the_zarankiewicz_bound(inst in instance()) {
        let p = agreement_count(&inst);
        prop_assert!(k22_check(&p));
        prop_assert!(zarankiewicz_ok(p.count, inst.s()));
    }

    #[test]
    fn translation_invariance(inst in instance(), c in -100i64..100) {
        let shifted = PuzzleInstance::new(
            inst.a().to_vec(),
            inst.b().to_vec(),
            inst.u().iter().map(|x| x + c).collect(),
            inst.v().iter().map(|x| x - c).collect(),
        ).unwrap();
        prop_assert_eq!(agreement_count(&inst), agreement_count(&shifted));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn agreements_are_the_zeros_of_the_polynomial(
        s in 1usize..=5,
        p in prop::collection::vec(-4i64..=4, 0..=3),
        q in prop::collection::vec(-4i64..=4, 0..=3),
        seed in any::<u64>(),
    ) {
        let a: Vec<i64> = (0..s as i64).map(|i| i * 2 - 3 + (seed % 3) as i64).collect();
        let b: Vec<i64> = (0..s as i64).map(|j| 1 - j * 3 + (seed % 5) as i64).collect();
        let inst = from_univariates(&a, &b, &p, &q).unwrap();
        let pattern = agreement_count(&inst);
        let f = equation_polynomial(&p, &q).unwrap();
        let grid = GridSpec::from_ints(RingSpec::integers(), &[a.clone(), b.clone()]).unwrap();
        let counts = count_nonzeros(&f, &grid).unwrap();
        prop_assert_eq!(counts.zeros, pattern.count as u128);
        let zeros: Vec<(i64, i64)> = counts.zero_set.unwrap().iter().map(|pt| {
            (pt[0].value().try_into().unwrap(), pt[1].value().try_into().unwrap())
        }).collect();
        let cells: Vec<(i64, i64)> = pattern.cells.iter().map(|&(i, j)| (a[i], b[j])).collect();
        prop_assert_eq!(zeros, cells);
    }
}

#[test]
fn exhaustive_search_finds_six_at_s3() {
    let r = exhaustive_search(3, 4, DEFAULT_EXHAUSTIVE_BUDGET).unwrap();
    assert_eq!(r.count, 6);
    assert_eq!(agreement_count(&r.best).count, 6);
    assert!(k22_check(&r.pattern));
}

#[test]
fn local_search_is_deterministic_and_self_consistent() {
    let a = local_search(3, 5000, 17, 30).unwrap();
    let b = local_search(3, 5000, 17, 30).unwrap();
    assert_eq!(a, b);
    assert_eq!(agreement_count(&a.best).count, a.count);
    assert!(zarankiewicz_ok(a.count, 3));
    assert!(a.history.windows(2).all(|w| w[0].count < w[1].count));
}
