mod common;

use cnz_core::parser::{parse_dag, parse_poly, Variables};
use cnz_core::pit::eval_dag;
use cnz_core::poly::vanishing_poly;
use cnz_core::{GridSpec, Polynomial, RingSpec};
use common::*;
use proptest::prelude::*;

fn x_pow(ring: RingSpec, n: usize, var: usize, k: u32) -> Polynomial {
    let mut e = vec![0; n];
    e[var] = k;
    Polynomial::from_terms(ring, n, [(e, 1)]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn divide_linear_round_trip(f in prime().prop_flat_map(|p| poly_over(p, 3, 6)), var in 0usize..3, a in any::<i64>()) {
        let var = var % f.arity();
        let ring = f.ring();
        let a = ring.elem(a);
        let (q, r) = f.divide_linear(var, &a).unwrap();
        let lin = Polynomial::var(ring, f.arity(), var).unwrap()
            .sub(&Polynomial::constant(ring, f.arity(), &a).unwrap()).unwrap();
        prop_assert_eq!(q.mul(&lin).unwrap().add(&r).unwrap(), f);
        prop_assert!(r.support().all(|e| e[var] == 0));
    }

    #[test]
    fn decompose_round_trip(f in prime().prop_flat_map(|p| poly_over(p, 3, 6)), var in 0usize..3) {
        prop_assume!(!f.is_zero());
        let var = var % f.arity();
        let ring = f.ring();
        let n = f.arity();
        let parts = f.decompose_by_variable(var).unwrap();
        prop_assert!(!parts.last().unwrap().is_zero());
        let mut acc = Polynomial::zero(ring, n);
        for (k, h) in parts.iter().enumerate() {
            prop_assert!(h.support().all(|e| e[var] == 0));
            acc = acc.add(&h.mul(&x_pow(ring, n, var, k as u32)).unwrap()).unwrap();
        }
        prop_assert_eq!(acc, f);
    }

    #[test]
    fn evaluation_is_a_homomorphism(
        (f, g, h, pt) in prime().prop_flat_map(|p| {
            (1usize..=3).prop_flat_map(move |n| {
                let ring = RingSpec::prime_field(p).unwrap();
                let caps = vec![3u32; n];
                (any::<u64>(), any::<u64>(), any::<u64>(), prop::collection::vec(any::<i64>(), n))
                    .prop_map(move |(s1, s2, s3, pt)| {
                        let mk = |s| cnz_core::oracle::random_polynomial(n, &caps, 0.5, ring, s).unwrap();
                        let pt: Vec<_> = pt.into_iter().map(|x| ring.elem(x)).collect();
                        (mk(s1), mk(s2), mk(s3), pt)
                    })
            })
        })
    ) {
        let lhs = f.mul(&g).unwrap().add(&h).unwrap().evaluate(&pt).unwrap();
        let rhs = f.evaluate(&pt).unwrap().mul(&g.evaluate(&pt).unwrap()).unwrap()
            .add(&h.evaluate(&pt).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn vanishing_poly_vanishes_exactly_on_the_set(set in set_over(101, 6)) {
        let p = 101u64;
        let ring = RingSpec::prime_field(p).unwrap();
        let grid = GridSpec::from_ints(ring, std::slice::from_ref(&set)).unwrap();
        let v = vanishing_poly(&grid, 0).unwrap();
        prop_assert_eq!(v.degrees().unwrap().total, set.len() as u64);
        for x in 0..p as i64 {
            let val = v.evaluate(&[ring.elem(x)]).unwrap();
            prop_assert_eq!(val.is_zero(), set.contains(&x));
        }
    }

    #[test]
    fn parse_render_round_trip(f in poly()) {
        let vars = Variables::Indexed(f.arity());
        let text = f.to_string();
        prop_assert_eq!(parse_poly(&text, &vars, f.ring()).unwrap(), f);
    }

    #[test]
    fn dag_and_expansion_agree(
        text in expr_text(),
        pts in prop::collection::vec((any::<i64>(), any::<i64>(), any::<i64>()), 100),
    ) {
        let ring = RingSpec::prime_field(101).unwrap();
        let vars = Variables::Named(vec!["x".into(), "y".into(), "z".into()]);
        let f = parse_poly(&text, &vars, ring).unwrap();
        let g = parse_dag(&text, &vars, ring).unwrap();
        for (a, b, c) in pts {
            let pt = [ring.elem(a), ring.elem(b), ring.elem(c)];
            prop_assert_eq!(f.evaluate(&pt).unwrap(), eval_dag(&g, &pt).unwrap());
        }
    }
}

fn expr_text() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        Just("x".to_string()),
        Just("y".to_string()),
        Just("z".to_string()),
        (0u32..20).prop_map(|c| c.to_string()),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} + {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} - {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a}*{b}")),
            inner.clone().prop_map(|a| format!("(-({a}))")),
            (inner, 0u32..4).prop_map(|(a, k)| format!("({a})^{k}")),
        ]
    })
}
