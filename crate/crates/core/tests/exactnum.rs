use jfield_core::exactnum::{
    poly_coefficient_join, poly_coefficient_split, vars_of, CycloCoeff, Field, MultiPoly, Rational, RationalFunction,
    Ring, Vars,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-50i64..=50, 1i64..=30).prop_map(|(n, d)| Rational::new(n, d))
}

fn poly(vars: Vars) -> impl Strategy<Value = MultiPoly> {
    prop::collection::vec(((0u32..3, 0u32..3), -6i64..=6), 0..5).prop_map(move |terms| {
        MultiPoly::from_terms(
            vars.clone(),
            terms.into_iter().map(|((a, b), c)| (vec![a, b], Rational::from(c))),
        )
    })
}

fn ratfunc() -> impl Strategy<Value = RationalFunction> {
    let v = vars_of(&["x", "y"]);
    (poly(v.clone()), poly(v)).prop_filter_map("nonzero denominator", |(n, d)| RationalFunction::new(n, d).ok())
}

proptest! {
    #[test]
    fn rational_field_axioms(a in rational(), b in rational(), c in rational()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&(&a - &a), &Rational::zero());
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.inv().unwrap(), Rational::one());
        } else {
            prop_assert!(a.inv().is_none());
        }
    }

    #[test]
    fn rational_string_round_trip(a in rational()) {
        let s = a.to_string();
        prop_assert_eq!(s.parse::<Rational>().unwrap(), a);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rational_function_field_axioms(a in ratfunc(), b in ratfunc(), c in ratfunc()) {
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert!(a.sub(&a).is_zero());
        match a.inv() {
            Some(i) => prop_assert_eq!(a.mul(&i).constant_value(), Some(Rational::one())),
            None => prop_assert!(a.is_zero()),
        }
    }

    #[test]
    fn rational_function_quotient_rule(a in ratfunc(), b in ratfunc()) {
        prop_assume!(!b.is_zero());
        let q = a.divided_by(&b).unwrap();
        let lhs = q.derivative(0);
        let rhs = a.derivative(0).mul(&b).sub(&a.mul(&b.derivative(0))).div(&b.mul(&b)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn coefficient_split_round_trip(g in prop::array::uniform4(poly(vars_of(&["x", "y"])))) {
        let vars = g[0].vars().clone();
        let parts = poly_coefficient_split(&g);
        let back = poly_coefficient_join(&vars, &parts);
        prop_assert_eq!(back, g);
    }
}

fn zeta(order: u32, k: i64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / order as f64)
}

proptest! {
    #[test]
    fn cyclotomic_arithmetic_matches_floats(
        order in prop::sample::select(vec![3u32, 4, 5, 7, 8, 12]),
        factors in prop::collection::vec((-20i64..20, -5i64..=5), 1..5),
        addend in (-20i64..20, -5i64..=5),
    ) {
        let mut exact = CycloCoeff::from_integer(order, 1);
        let mut float = Complex64::new(1.0, 0.0);
        for (k, c) in &factors {
            let term = CycloCoeff::zeta_power(order, *k).plus(&CycloCoeff::from_integer(order, *c));
            exact = exact.times(&term);
            float *= zeta(order, *k) + *c as f64;
        }
        exact = exact.plus(&CycloCoeff::zeta_power(order, addend.0).times(&CycloCoeff::from_integer(order, addend.1)));
        float += zeta(order, addend.0) * addend.1 as f64;
        let (re, im) = exact.to_complex();
        let scale = float.norm().max(1.0);
        prop_assert!((Complex64::new(re, im) - float).norm() < 1e-9 * scale, "{:?} vs {}", (re, im), float);
    }
}
