use std::collections::BTreeMap;

use futs_core::semiring::{FiniteSupportFn, Rational, Semiring};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (0i64..40, 1i64..12).prop_map(|(n, d)| Rational::new(n, d).unwrap())
}

fn function<R: Semiring + 'static>(
    value: impl Strategy<Value = R>,
) -> impl Strategy<Value = FiniteSupportFn<u8, R>> {
    proptest::collection::vec((0u8..8, value), 0..8).prop_map(FiniteSupportFn::from_entries)
}

fn laws<R: Semiring>(a: &R, b: &R, c: &R) {
    assert_eq!(a.plus(b), b.plus(a));
    assert_eq!(a.times(b), b.times(a));
    assert_eq!(a.plus(&b.plus(c)), a.plus(b).plus(c));
    assert_eq!(a.times(&b.times(c)), a.times(b).times(c));
    assert_eq!(a.times(&b.plus(c)), a.times(b).plus(&a.times(c)));
    assert_eq!(a.plus(&R::zero()), a.clone());
    assert_eq!(a.times(&R::one()), a.clone());
    assert_eq!(a.times(&R::zero()), R::zero());
}

proptest! {
    #[test]
    fn boolean_semiring_laws(a: bool, b: bool, c: bool) {
        laws(&a, &b, &c);
    }

    #[test]
    fn rational_semiring_laws(a in rational(), b in rational(), c in rational()) {
        laws(&a, &b, &c);
    }

    #[test]
    fn rational_text_round_trip(a in rational()) {
        prop_assert_eq!(a.to_string().parse::<Rational>().unwrap(), a.clone());
        prop_assert_eq!(a.to_fraction_string().parse::<Rational>().unwrap(), a);
    }

    #[test]
    fn total_of_sum_is_sum_of_totals(phi in function(rational()), psi in function(rational())) {
        prop_assert_eq!(phi.plus(&psi).total(), phi.total().plus(&psi.total()));
    }

    #[test]
    fn total_of_product_is_product_of_totals(phi in function(rational()), psi in function(rational())) {
        let product = phi.pair_product(&psi, |x, y| x * 8 + y).unwrap();
        prop_assert_eq!(product.total(), phi.total().times(&psi.total()));
    }

    #[test]
    fn boolean_totals(phi in function(any::<bool>()), psi in function(any::<bool>())) {
        prop_assert_eq!(phi.plus(&psi).total(), phi.total() || psi.total());
        let product = phi.pair_product(&psi, |x, y| x * 8 + y).unwrap();
        prop_assert_eq!(product.total(), phi.total() && psi.total());
    }

    #[test]
    fn support_never_holds_zero(phi in function(rational()), psi in function(rational())) {
        for (_, v) in phi.plus(&psi).iter() {
            prop_assert!(!v.is_zero());
        }
        prop_assert!(phi.scale(&Rational::zero()).is_zero());
    }

    #[test]
    fn product_agrees_with_pointwise_definition(phi in function(rational()), psi in function(rational())) {
        let product = phi.pair_product(&psi, |x, y| x * 8 + y).unwrap();
        let mut expected = BTreeMap::new();
        for x in 0u8..8 {
            for y in 0u8..8 {
                let v = phi.get(&x).times(&psi.get(&y));
                if !v.is_zero() {
                    expected.insert(x * 8 + y, v);
                }
            }
        }
        let got: BTreeMap<_, _> = product.iter().map(|(k, v)| (*k, v.clone())).collect();
        prop_assert_eq!(got, expected);
    }
}

#[test]
fn worked_product_value() {
    let q = |n, d| Rational::new(n, d).unwrap();
    let phi =
        FiniteSupportFn::from_entries([("P1".to_string(), q(2, 1)), ("P2".to_string(), q(3, 1))]);
    let psi = FiniteSupportFn::from_entries([("Q".to_string(), q(1, 2))]);
    let product = phi.pair_product(&psi, |p, r| format!("{p}||{r}")).unwrap();
    assert_eq!(product.get(&"P1||Q".to_string()), q(1, 1));
    assert_eq!(product.get(&"P2||Q".to_string()), q(3, 2));
    assert_eq!(product.len(), 2);
}
