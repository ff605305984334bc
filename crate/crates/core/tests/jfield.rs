use jfield_core::evaluator::evaluate_jet;
use jfield_core::exactnum::Rational;
use jfield_core::jfield::{FragmentPoint, Value};
use jfield_core::moebius::RatMatrix2;
use jfield_core::{check_axioms, fragment_from_evaluator, AxiomConfig, JFieldFragment, Status};
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn doubling() -> RatMatrix2 {
    RatMatrix2::from_ints(2, 0, 0, 1)
}

fn scale(v: &mut Option<Value>, by: f64) {
    let z = v.as_ref().unwrap().complex() * by;
    *v = Some(Value::Numeric { re: z.re, im: z.im });
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn evaluator_fragments_satisfy_the_decidable_axioms(
        re in -0.5f64..0.5,
        im in 0.7f64..1.6,
        g in prop::sample::select(vec![(2, 0, 0, 1), (1, 1, 0, 1), (0, -1, 1, 0), (1, 0, 2, 1), (3, 1, 0, 1)]),
    ) {
        let f = fragment_from_evaluator(&[c(re, im)], &[RatMatrix2::from_ints(g.0, g.1, g.2, g.3)], None).unwrap();
        let r = check_axioms(&f, &AxiomConfig::default());
        for a in 1..=4 {
            prop_assert_eq!(r.status(a), Status::Pass, "{:?}", r.axioms[a as usize - 1]);
        }
        prop_assert_ne!(r.status(5), Status::Fail);
        prop_assert_ne!(r.status(6), Status::Fail);
    }
}

#[test]
fn json_round_trip_is_byte_identical() {
    let f = fragment_from_evaluator(&[c(0.2, 1.3), c(-0.31, 0.9)], &[doubling()], None).unwrap();
    let s = f.to_json();
    let back = JFieldFragment::from_json(&s).unwrap();
    assert_eq!(back, f);
    assert_eq!(back.to_json(), s);
}

#[test]
fn duplicate_value_fails_only_axiom_one() {
    let mut f = fragment_from_evaluator(&[c(0.2, 1.3)], &[], None).unwrap();
    let mut copy = f.points[0].clone();
    copy.id = "copy".into();
    f.points.push(copy);
    assert_eq!(check_axioms(&f, &AxiomConfig::default()).failing(), vec![1]);
}

#[test]
fn moved_image_fails_only_axiom_two() {
    let mut f = fragment_from_evaluator(&[c(0.2, 1.3)], &[doubling()], None).unwrap();
    f.points[1].value = Value::Numeric { re: 0.4, im: 2.7 };
    assert_eq!(check_axioms(&f, &AxiomConfig::default()).failing(), vec![2]);
}

#[test]
fn wrong_third_derivative_fails_only_axiom_three() {
    let mut f = fragment_from_evaluator(&[c(0.2, 1.3)], &[], None).unwrap();
    scale(&mut f.points[0].jet[3], 1.01);
    assert_eq!(check_axioms(&f, &AxiomConfig::default()).failing(), vec![3]);
}

#[test]
fn wrong_transported_derivative_fails_only_axiom_four() {
    let mut f = fragment_from_evaluator(&[c(0.2, 1.3)], &[doubling()], None).unwrap();
    let dst = &mut f.points[1];
    scale(&mut dst.jet[2], 1.01);
    dst.jet.truncate(3);
    assert_eq!(check_axioms(&f, &AxiomConfig::default()).failing(), vec![4]);
}

#[test]
fn lone_point_at_i() {
    let j2 = evaluate_jet(c(0.0, 1.0), None).unwrap().j[2];
    let f = JFieldFragment {
        points: vec![FragmentPoint {
            id: "i".into(),
            value: Value::Numeric { re: 0.0, im: 1.0 },
            jet: vec![
                Some(Value::Exact(Rational::from(1728))),
                Some(Value::Exact(Rational::from(0))),
                Some(Value::Numeric { re: j2.re, im: j2.im }),
            ],
        }],
        group: vec![],
        relations: vec![],
        tolerance: 1e-6,
    };
    let r = check_axioms(&f, &AxiomConfig::default());
    assert_eq!(r.overall(), Status::Pass, "{r:?}");
}

#[test]
fn exact_point_with_constant_jet() {
    let s = r#"{"points": [{"id": "z", "value": "1/3", "jet": ["24", "0", "0"]}]}"#;
    let f = JFieldFragment::from_json(s).unwrap();
    let r = check_axioms(&f, &AxiomConfig::default());
    assert!(r.failing().iter().all(|&a| a != 1 && a != 2), "{r:?}");
}
