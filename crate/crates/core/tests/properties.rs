use std::collections::HashMap;
use std::sync::Arc;

use proptest::prelude::*;

use clpencil::poly::{format_polynomial, parse_polynomial};
use clpencil::suite::{anticommutativity_residual, axiom_vars, jacobi_residual, leibniz_residual};
use clpencil::{Basis, Monomial, Multivector, Polynomial, Rational, VarTable};

fn vars() -> Arc<VarTable> {
    VarTable::new(&["x", "y", "z"], &["t"]).unwrap()
}

fn term() -> impl Strategy<Value = (i64, i64, [u32; 4])> {
    (-9i64..=9, 1i64..=4, [0u32..3, 0u32..3, 0u32..3, 0u32..2])
}

fn poly_in(v: Arc<VarTable>, n: usize) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec(term(), 0..5).prop_map(move |ts| {
        Polynomial::from_terms(
            &v,
            ts.into_iter().map(|(a, b, e)| {
                (
                    Monomial::from_powers((0..n).map(|i| (i, e[i])).filter(|p| p.1 > 0)),
                    Rational::new(a, b),
                )
            }),
        )
    })
}

fn poly() -> impl Strategy<Value = Polynomial> {
    poly_in(vars(), 4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn ring_axioms(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &Polynomial::one(a.vars()), a.clone());
        prop_assert_eq!(&a + &Polynomial::zero(a.vars()), a.clone());
    }

    #[test]
    fn derivative_is_a_derivation(a in poly(), b in poly(), v in 0usize..4) {
        let lhs = (&a * &b).partial_derivative(v);
        let rhs = &(&a.partial_derivative(v) * &b) + &(&a * &b.partial_derivative(v));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn substitution_is_a_homomorphism(a in poly(), b in poly(), x in -5i64..5, y in -5i64..5) {
        let sub: HashMap<usize, Rational> = [(0, Rational::from_integer(x)), (1, Rational::new(y, 3))].into_iter().collect();
        prop_assert_eq!((&a * &b).substitute(&sub), &a.substitute(&sub) * &b.substitute(&sub));
        prop_assert_eq!((&a + &b).substitute(&sub), &a.substitute(&sub) + &b.substitute(&sub));
    }

    #[test]
    fn text_round_trip(a in poly()) {
        let text = format_polynomial(&a);
        prop_assert_eq!(parse_polynomial(&text, a.vars()).unwrap(), a);
    }
}

fn multivector(degree: usize) -> impl Strategy<Value = Multivector> {
    let v = axiom_vars();
    let comp = (prop::sample::subsequence(vec![0usize, 1, 2, 3], degree), poly_in(v.clone(), 4));
    prop::collection::vec(comp, 1..3).prop_map(move |cs| {
        let mut m = Multivector::zero(&v, degree);
        for (idx, p) in cs {
            let b = Basis::from_indices(&idx).unwrap();
            m = &m + &Multivector::from_terms(&v, degree, [(b, p)]);
        }
        m
    })
}

fn any_multivector(lo: usize) -> impl Strategy<Value = Multivector> {
    (lo..=3usize).prop_flat_map(multivector)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn schouten_axioms(a in any_multivector(1), b in any_multivector(1), c in any_multivector(1),
                       lb in any_multivector(0), lc in any_multivector(0)) {
        prop_assert!(anticommutativity_residual(&a, &b).is_zero());
        prop_assert!(jacobi_residual(&a, &b, &c).is_zero());
        prop_assert!(leibniz_residual(&a, &lb, &lc).is_zero());
    }
}
