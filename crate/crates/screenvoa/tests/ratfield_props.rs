use num_bigint::BigInt;
use proptest::prelude::*;
use screenvoa::ratfield::{eliminate_e3, parse_ratfun, E3Poly, Poly, RatFun};

fn poly_strategy() -> impl Strategy<Value = Poly> {
    prop::collection::vec(((0u16..3, 0u16..3, 0u16..2), -4i64..=4), 1..4).prop_map(|ts| {
        Poly::from_terms(ts.into_iter().map(|((a, b, c), k)| ([a, b, c], BigInt::from(k))).collect())
    })
}

fn nonzero_poly() -> impl Strategy<Value = Poly> {
    poly_strategy().prop_filter("nonzero", |p| !p.is_zero())
}

fn ratfun() -> impl Strategy<Value = RatFun> {
    (poly_strategy(), nonzero_poly()).prop_map(|(n, d)| &RatFun::from_poly(n) / &RatFun::from_poly(d))
}

fn e3poly() -> impl Strategy<Value = E3Poly> {
    prop::collection::vec(((0u16..3, 0u16..3, 0u16..3), -3i64..=3), 0..4)
        .prop_map(|ts| ts.into_iter().map(|((a, b, c), k)| ([a, b, c], BigInt::from(k))).collect())
}

fn e3_mul(p: &E3Poly, q: &E3Poly) -> E3Poly {
    let mut out = Vec::new();
    for (m, a) in p {
        for (n, b) in q {
            out.push(([m[0] + n[0], m[1] + n[1], m[2] + n[2]], a * b));
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn field_axioms(a in ratfun(), b in ratfun(), c in ratfun()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        if !a.is_zero() {
            prop_assert!((&a * &a.inv().unwrap()).is_one());
        }
    }

    #[test]
    fn display_parse_roundtrip(a in ratfun()) {
        prop_assert_eq!(parse_ratfun(&a.to_string()).unwrap(), a);
    }

    #[test]
    fn e3_elimination_is_a_homomorphism(p in e3poly(), q in e3poly()) {
        let sum: E3Poly = p.iter().chain(q.iter()).cloned().collect();
        prop_assert_eq!(eliminate_e3(&sum), &eliminate_e3(&p) + &eliminate_e3(&q));
        prop_assert_eq!(eliminate_e3(&e3_mul(&p, &q)), &eliminate_e3(&p) * &eliminate_e3(&q));
    }
}

#[test]
fn e3_relation() {
    let e3: E3Poly = vec![([0, 0, 1], BigInt::from(1))];
    assert_eq!(eliminate_e3(&e3), RatFun::e3());
    assert!((RatFun::e1() + RatFun::e2() + RatFun::e3()).is_zero());
}
