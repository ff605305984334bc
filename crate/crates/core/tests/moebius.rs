use jfield_core::exactnum::parse::parse_rational_function;
use jfield_core::exactnum::{vars_of, Rational};
use jfield_core::moebius::{
    act, act_complex, act_function, in_fundamental_domain, orbit_decide_exact, orbit_decide_numeric, primitive_form,
    reduce_to_fundamental_domain, special_point_equation, ExactOrbitDecision, ExactPoint, Image, NumericOrbitDecision,
    RatMatrix2, SL2,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn matrix() -> impl Strategy<Value = RatMatrix2> {
    prop::array::uniform4((-9i64..=9, 1i64..=4))
        .prop_map(|e| RatMatrix2::new(q(e[0].0, e[0].1), q(e[1].0, e[1].1), q(e[2].0, e[2].1), q(e[3].0, e[3].1)))
        .prop_filter("non-singular", |g| !g.det().is_zero())
}

fn point() -> impl Strategy<Value = Option<Rational>> {
    prop_oneof![
        1 => Just(None),
        8 => (-30i64..=30, 1i64..=7).prop_map(|(n, d)| Some(q(n, d))),
    ]
}

/// `ℙ¹(ℚ)` action with `None` as the point at infinity.
fn act_p1(g: &RatMatrix2, x: &Option<Rational>) -> Option<Rational> {
    match x {
        None => {
            if g.c.is_zero() {
                None
            } else {
                Some(&g.a / &g.c)
            }
        }
        Some(r) => match act(g, &ExactPoint::Rational(r.clone())).unwrap() {
            Image::Finite(ExactPoint::Rational(v)) => Some(v),
            Image::Infinity => None,
            other => panic!("unexpected image {other:?}"),
        },
    }
}

proptest! {
    #[test]
    fn action_law_on_projective_line(g in matrix(), h in matrix(), x in point()) {
        prop_assert_eq!(act_p1(&g.mul(&h), &x), act_p1(&g, &act_p1(&h, &x)));
    }

    #[test]
    fn action_law_on_functions(g in matrix(), h in matrix(), k in -5i64..=5) {
        let vars = vars_of(&["t"]);
        let f = parse_rational_function(&format!("(t^2 + {k})/(t - 3)"), &vars).unwrap();
        let lhs = act_function(&g.mul(&h), &f).unwrap();
        let rhs = act_function(&g, &act_function(&h, &f).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn primitive_form_ignores_scaling(g in matrix(), n in -12i64..=12, d in 1i64..=12) {
        prop_assume!(n != 0);
        let lambda = q(n, d);
        let (a, b) = (primitive_form(&g), primitive_form(&g.scale(&lambda)));
        prop_assert_eq!(&a.level, &b.level);
        if n > 0 {
            prop_assert_eq!(&a.matrix, &b.matrix);
        } else {
            prop_assert_eq!(a.matrix.clone().map(|e| -e), b.matrix);
        }
        let m = a.to_matrix();
        prop_assert_eq!(primitive_form(&m).n(), a.n());
    }

    #[test]
    fn fixed_points_solve_a_quadratic(g in matrix()) {
        prop_assume!(!g.is_scalar());
        let [c, b, a0] = special_point_equation(&g).unwrap();
        prop_assert!(!(c.is_zero() && b.is_zero() && a0.is_zero()));
        let (c, b, a0) = (c.to_f64(), b.to_f64(), a0.to_f64());
        let roots: Vec<Complex64> = if c == 0.0 {
            if b == 0.0 { vec![] } else { vec![Complex64::new(-a0 / b, 0.0)] }
        } else {
            let disc = Complex64::new(b * b - 4.0 * c * a0, 0.0).sqrt();
            vec![(-b + disc) / (2.0 * c), (-b - disc) / (2.0 * c)]
        };
        for z in roots {
            if let Some(w) = act_complex(&g, z) {
                prop_assert!((w - z).norm() < 1e-8 * z.norm().max(1.0), "{} -> {}", z, w);
            }
        }
    }

    #[test]
    fn reduction_is_idempotent(re in -20.0f64..20.0, im in 0.01f64..5.0) {
        let r = reduce_to_fundamental_domain(Complex64::new(re, im)).unwrap();
        prop_assert!(in_fundamental_domain(r.tau0));
        let again = reduce_to_fundamental_domain(r.tau0).unwrap();
        prop_assert_eq!(again.g, SL2::IDENTITY);
        prop_assert_eq!(again.tau0, r.tau0);
        let back = r.g.act(Complex64::new(re, im));
        prop_assert!((back - r.tau0).norm() < 1e-9 * r.tau0.norm());
    }

    #[test]
    fn exact_witnesses_reproduce_the_target(g in matrix(), k in 1i64..=4) {
        let vars = vars_of(&["t"]);
        let y = parse_rational_function(&format!("t^{k} + t"), &vars).unwrap();
        let x = act_function(&g, &y).unwrap();
        match orbit_decide_exact(&x, &y).unwrap() {
            ExactOrbitDecision::Dependent(w) => prop_assert_eq!(act_function(&w, &y).unwrap(), x),
            ExactOrbitDecision::Independent => prop_assert!(false, "missed g = {:?}", g),
        }
    }

    #[test]
    fn numeric_witnesses_reproduce_the_target(a in 1i64..=3, b in -3i64..=3, d in 1i64..=3, re in -0.5f64..0.5, im in 0.8f64..2.0) {
        let g = RatMatrix2::from_ints(a, b, 0, d);
        let x = Complex64::new(re, im);
        let y = act_complex(&g, x).unwrap();
        match orbit_decide_numeric(x, y, 3, 1e-9) {
            NumericOrbitDecision::Dependent(w) => {
                prop_assert!((act_complex(&w, x).unwrap() - y).norm() < 1e-9);
            }
            NumericOrbitDecision::IndependentUpTo(_) => prop_assert!(false, "missed {:?}", g),
        }
    }
}

#[test]
fn infinity_is_handled() {
    let s = RatMatrix2::from_ints(0, -1, 1, 0);
    assert_eq!(act(&s, &ExactPoint::Rational(q(0, 1))).unwrap(), Image::Infinity);
    assert_eq!(act_p1(&s, &None), Some(q(0, 1)));
    assert_eq!(act_p1(&RatMatrix2::from_ints(1, 1, 0, 1), &None), None);
}
