use std::sync::OnceLock;

use jfield_core::evaluator::{evaluate_jet, JetValue};
use jfield_core::modpoly::{build_modular_polynomial, derived_relation, JetArgs};
use jfield_core::moebius::SL2;
use jfield_core::numeric::Cx;
use num_complex::Complex64;
use proptest::prelude::*;

fn sl2_up_to(h: i128) -> &'static [SL2] {
    static ALL: OnceLock<Vec<SL2>> = OnceLock::new();
    ALL.get_or_init(|| {
        let mut out = Vec::new();
        for a in -h..=h {
            for b in -h..=h {
                for c in -h..=h {
                    for d in -h..=h {
                        if a * d - b * c == 1 {
                            out.push(SL2::new(a, b, c, d));
                        }
                    }
                }
            }
        }
        out
    })
}

fn jet(z: Complex64) -> JetValue {
    evaluate_jet(z, None).unwrap()
}

fn off_elliptic(z: Complex64) -> bool {
    let j = jet(z);
    j.j[0].norm() > 1.0 && (j.j[0] - 1728.0).norm() > 1.0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn invariant_under_sl2z(re in -0.5f64..0.5, im in 0.5f64..2.0, k in 0usize..100_000) {
        let all = sl2_up_to(10);
        let h = all[k % all.len()];
        let z = Complex64::new(re, im);
        let (a, b) = (jet(z), jet(h.act(z)));
        let bound = a.component_errors[0] + b.component_errors[0];
        prop_assert!((a.j[0] - b.j[0]).norm() <= bound.max(1e-12 * a.j[0].norm()), "{}: {} vs {} (bound {bound:e})", h, a.j[0], b.j[0]);
    }

    #[test]
    fn satisfies_the_third_order_equation(re in -2.0f64..2.0, im in 0.2f64..3.0) {
        let z = Complex64::new(re, im);
        prop_assume!(off_elliptic(z));
        let r = jet(z).daleth_residual().unwrap();
        prop_assert!(r.norm() < 1e-6, "ℸ residual {} at {}", r.norm(), z);
    }

    #[test]
    fn conjugate_points_give_conjugate_jets(re in -3.0f64..3.0, im in 0.05f64..3.0) {
        let z = Complex64::new(re, im);
        let (a, b) = (jet(z), jet(z.conj()));
        for k in 0..4 {
            prop_assert_eq!(a.j[k].re.to_bits(), b.j[k].re.to_bits());
            prop_assert_eq!(a.j[k].im.to_bits(), (-b.j[k].im).to_bits());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn derivatives_match_finite_differences(re in -0.5f64..0.5, im in 0.9f64..1.6) {
        let z = Complex64::new(re, im);
        let h = 1e-5;
        let (p, m, c) = (jet(z + h), jet(z - h), jet(z));
        for k in 0..3 {
            let fd = (p.j[k] - m.j[k]) / (2.0 * h);
            let exact = c.j[k + 1];
            prop_assert!((fd - exact).norm() <= 1e-4 * exact.norm().max(1.0), "order {} at {}: {} vs {}", k + 1, z, fd, exact);
        }
    }

    #[test]
    fn level_two_relations_hold(re in -0.5f64..0.5, im in 0.6f64..1.8) {
        let z = Complex64::new(re, im);
        let (a, b) = (jet(z), jet(2.0 * z));
        let phi = build_modular_polynomial(2).unwrap();
        let v = phi.eval(&Cx(a.j[0]), &Cx(b.j[0])).0;
        let scale = phi.poly.abs_eval(a.j[0].norm(), b.j[0].norm());
        prop_assert!(v.norm() / scale < 1e-9);
        let args = JetArgs {
            jz: a.j.map(Cx),
            jgz: b.j.map(Cx),
            g: [2.0, 0.0, 0.0, 1.0].map(|e| Cx(Complex64::new(e, 0.0))),
            w: Cx(Complex64::new(1.0, 0.0)),
        };
        let abs = JetArgs {
            jz: a.j.map(|c| c.norm()),
            jgz: b.j.map(|c| c.norm()),
            g: [2.0, 0.0, 0.0, 1.0],
            w: 1.0,
        };
        for order in 1..=3 {
            let rel = derived_relation(2, order).unwrap();
            let r = rel.residual(&args).0.norm() / rel.magnitude(&abs);
            prop_assert!(r < 1e-8, "order {order}: {r:e}");
        }
    }
}
