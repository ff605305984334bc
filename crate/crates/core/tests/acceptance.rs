use std::time::Instant;

use jfield_core::derivations::{delta, kronecker_normalize, schanuel_report, Analysis, JclOracle, DEFAULT_SEED};
use jfield_core::evaluator::{evaluate_jet, evaluate_jet_dd};
use jfield_core::exactnum::parse::{parse_poly, parse_rational_function};
use jfield_core::exactnum::{vars_of, MultiPoly, Rational, RationalFunction};
use jfield_core::jfield::Value;
use jfield_core::modpoly::{build_modular_polynomial, construction_precision, derived_relation, psi, verify_modular_polynomial, JetArgs};
use jfield_core::moebius::{act_function, SL2};
use jfield_core::numeric::{cabs, from_c64, Cx, Real, DD};
use jfield_core::pregeom::{
    disjoint1_extract, pregeometry_property_suite, Disjoint1Outcome, GclConfig, GclOracle, MonotonicityBreaker, PointSpec,
    SquaringOracle,
};
use jfield_core::qseries::verify_modular_ode;
use jfield_core::{check_axioms, fragment_from_evaluator, AxiomConfig, RatMatrix2, Status};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

mod common;
use common::{brute_delta, rank, zs, Config, Tower};

type Outcome = Result<(), String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rng(k: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x6a_f1e1d + k)
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn exact_ode_identity() -> Outcome {
    let s = verify_modular_ode(100).map_err(|e| e.to_string())?;
    ensure(s.is_zero(), || format!("nonzero series {s:?}"))
}

fn modular_polynomials() -> Outcome {
    let phi1 = build_modular_polynomial(1).map_err(|e| e.to_string())?;
    let terms: Vec<_> = phi1.poly.terms().map(|(&k, v)| (k, v.to_string())).collect();
    ensure(terms.len() == 2 && terms.contains(&((1, 0), "1".into())) && terms.contains(&((0, 1), "-1".into())), || {
        format!("Φ1 = {terms:?}")
    })?;
    for n in [2u32, 3, 5] {
        let phi = build_modular_polynomial(n).map_err(|e| e.to_string())?;
        ensure(phi.poly.is_symmetric(), || format!("Φ{n} not symmetric"))?;
        ensure(phi.poly.degree_x() as u64 == psi(n), || format!("deg Φ{n} = {}", phi.poly.degree_x()))?;
        let m = construction_precision(n) as i64;
        ensure(verify_modular_polynomial(&phi, m).is_zero(), || format!("Φ{n}(j(q^{n}), j(q)) ≠ 0 through q^{m}"))?;
    }
    Ok(())
}

fn special_values() -> Outcome {
    let rho = c(-0.5, 3f64.sqrt() / 2.0);
    let at_i = evaluate_jet(c(0.0, 1.0), None).map_err(|e| e.to_string())?;
    let at_rho = evaluate_jet(rho, None).map_err(|e| e.to_string())?;
    let checks = [
        ("|j(i) − 1728|", (at_i.j[0] - 1728.0).norm()),
        ("|j(ρ)|", at_rho.j[0].norm()),
        ("|j′(i)|", at_i.j[1].norm()),
        ("|j′(ρ)|", at_rho.j[1].norm()),
    ];
    for (name, v) in checks {
        ensure(v < 1e-9, || format!("{name} = {v:e}"))?;
    }
    let two_i = evaluate_jet(c(0.0, 2.0), None).map_err(|e| e.to_string())?.j[0];
    let oracle = evaluate_jet_dd(from_c64::<DD>(c(0.0, 2.0)), None).map_err(|e| e.to_string())?.j[0];
    let exact = DD::from_f64(287496.0);
    let dd_err = ((oracle.re - exact).abs().to_f64()).hypot(oracle.im.to_f64()) / 287496.0;
    let f_err = (two_i - 287496.0).norm() / 287496.0;
    ensure(dd_err < 1e-9 && f_err < 1e-9, || format!("j(2i): oracle {dd_err:e}, f64 {f_err:e}"))
}

fn random_sl2(r: &mut ChaCha8Rng, h: i128) -> SL2 {
    loop {
        let (a, b, cc, d) = (r.gen_range(-h..=h), r.gen_range(-h..=h), r.gen_range(-h..=h), r.gen_range(-h..=h));
        if a * d - b * cc == 1 {
            return SL2::new(a, b, cc, d);
        }
    }
}

fn invariance_and_relations() -> Outcome {
    let mut r = rng(4);
    for _ in 0..100 {
        let tau = c(r.gen_range(-0.5..0.5), r.gen_range(0.5..2.0));
        let h = random_sl2(&mut r, 10);
        let t = from_c64::<DD>(tau);
        let a = evaluate_jet_dd(t, None).map_err(|e| e.to_string())?.j[0];
        let b = evaluate_jet_dd(h.act(t), None).map_err(|e| e.to_string())?.j[0];
        let diff = cabs(&(a - b));
        ensure(diff < 1e-8, || format!("|j(hτ) − j(τ)| = {diff:e} at τ = {tau}, h = {h}"))?;
    }
    let phi = build_modular_polynomial(2).map_err(|e| e.to_string())?;
    let g = [2.0, 0.0, 0.0, 1.0];
    for _ in 0..20 {
        let z = c(r.gen_range(-0.5..0.5), r.gen_range(0.6..1.8));
        let (a, b) = (evaluate_jet(z, None).unwrap(), evaluate_jet(2.0 * z, None).unwrap());
        let v = phi.eval(&Cx(a.j[0]), &Cx(b.j[0])).0.norm() / phi.poly.abs_eval(a.j[0].norm(), b.j[0].norm());
        ensure(v < 1e-6, || format!("Φ2 residual {v:e} at {z}"))?;
        let args = JetArgs {
            jz: a.j.map(Cx),
            jgz: b.j.map(Cx),
            g: g.map(|e| Cx(c(e, 0.0))),
            w: Cx(c(1.0, 0.0)),
        };
        let abs = JetArgs {
            jz: a.j.map(|x| x.norm()),
            jgz: b.j.map(|x| x.norm()),
            g,
            w: 1.0,
        };
        for (order, tol) in [(1, 1e-6), (2, 1e-5), (3, 1e-5)] {
            let rel = derived_relation(2, order).map_err(|e| e.to_string())?;
            let res = rel.residual(&args).0.norm() / rel.magnitude(&abs);
            ensure(res < tol, || format!("order-{order} residual {res:e} at {z}"))?;
        }
        let step = 1e-5;
        let (p, m) = (evaluate_jet(z + step, None).unwrap(), evaluate_jet(z - step, None).unwrap());
        for k in 0..3 {
            let fd = (p.j[k] - m.j[k]) / (2.0 * step);
            let rel = (fd - a.j[k + 1]).norm() / a.j[k + 1].norm().max(1.0);
            ensure(rel < 1e-4, || format!("finite difference of order {} off by {rel:e} at {z}", k + 1))?;
        }
    }
    Ok(())
}

fn pregeometry_suites() -> Outcome {
    let universe = ["t", "t+1", "1/t", "t^2", "t^2+1", "s", "1/s", "t*s"].map(|e| PointSpec::Exact(e.into()));
    let gcl = GclOracle::from_config(&GclConfig::new("Q").with_universe(universe.to_vec())).map_err(|e| e.to_string())?;
    let report = pregeometry_property_suite(&gcl, 5);
    ensure(report.all_passed(), || format!("gcl: {:?}", report.failing()))?;
    let a = Analysis::from_json(
        r#"{"generators": ["z", "j0", "j1", "j2", "t", "u", "s", "w"],
            "relations": ["s - t*u", "w^2 - z - t"],
            "jpoints": [{"z": "z", "j0": "j0", "j1": "j1", "j2": "j2"}]}"#,
        DEFAULT_SEED,
    )
    .map_err(|e| e.to_string())?;
    let report = pregeometry_property_suite(&JclOracle::all(&a), 5);
    ensure(report.all_passed(), || format!("jcl: {:?}", report.failing()))?;
    let sq = SquaringOracle {
        values: vec![2, 4, 16, 3, 9, 5, 25, 7],
    };
    ensure(!pregeometry_property_suite(&sq, 5).all_passed(), || "squaring control passed".into())?;
    ensure(!pregeometry_property_suite(&MonotonicityBreaker { size: 8 }, 5).all_passed(), || "monotonicity control passed".into())
}

fn random_tower(r: &mut ChaCha8Rng) -> Tower {
    let free = r.gen_range(1..=4);
    let dependent = (0..r.gen_range(1..=4))
        .map(|i| {
            let avail = free + i;
            let terms = (0..r.gen_range(1..4))
                .map(|_| {
                    let coeff = [-5, -3, -2, -1, 1, 2, 3, 4][r.gen_range(0..8)];
                    (coeff, r.gen_range(0..avail), r.gen_range(0..=avail))
                })
                .collect();
            (r.gen_bool(0.5), terms)
        })
        .collect();
    Tower { free, dependent }
}

fn derivation_dimensions() -> Outcome {
    let mut r = rng(6);
    for _ in 0..10 {
        let t = loop {
            let t = random_tower(&mut r);
            if (1..=3).all(|s| t.smooth_at(s)) {
                break t;
            }
        };
        let a = Analysis::from_json(&t.json(), DEFAULT_SEED).map_err(|e| e.to_string())?;
        let n = a.num_generators();
        let brute = (1..=3)
            .map(|s| {
                let x = t.point(s);
                let rows = a
                    .presentation
                    .relations
                    .iter()
                    .map(|rel| {
                        let mut row = vec![Rational::zero(); n];
                        for v in rel.poly.support() {
                            row[v] = rel.poly.derivative(v).eval_rational(&x);
                        }
                        row
                    })
                    .collect();
                rank(rows)
            })
            .max()
            .unwrap_or(0);
        let omega = a.omega_dimension(&[]);
        ensure(omega == n - brute && omega == t.free, || format!("Ω = {omega}, brute force {}, free {}", n - brute, t.free))?;
    }
    let a = Analysis::from_json(
        r#"{"generators": ["z", "j0", "j1", "j2"], "jpoints": [{"z": "z", "j0": "j0", "j1": "j1", "j2": "j2"}]}"#,
        DEFAULT_SEED,
    )
    .map_err(|e| e.to_string())?;
    let idx = |s: &str| a.presentation.index(s).unwrap();
    ensure(a.xi_dimension(&[]) == 1, || format!("dim Ξ = {}", a.xi_dimension(&[])))?;
    ensure(a.jcl_member(idx("j0"), &[idx("z")]), || "j0 ∉ jcl(z)".into())?;
    ensure(a.jcl_member(idx("z"), &[idx("j2")]), || "z ∉ jcl(j2)".into())
}

fn coefficient_poly(cs: &[i64]) -> String {
    cs.iter().enumerate().fold("0".to_string(), |s, (k, a)| format!("{s} + ({a})*x^{k}"))
}

fn constructive_lemmas() -> Outcome {
    let mut r = rng(7);
    let xv = vars_of(&["x"]);
    let lv = vars_of(&["t", "u"]);
    let targets = ["t", "t^2 + 1", "(t+2)/(t-5)", "t*u", "1/u"];
    for _ in 0..20 {
        let h = loop {
            let h: [i64; 4] = std::array::from_fn(|_| r.gen_range(-6..=6));
            if h[0] * h[3] != h[1] * h[2] && !(h[1] == 0 && h[2] == 0 && h[0] == h[3]) {
                break h;
            }
        };
        let p: Vec<i64> = (0..r.gen_range(1..4)).map(|_| r.gen_range(1..=4)).collect();
        let mult = parse_poly(&coefficient_poly(&p), &xv).map_err(|e| e.to_string())?;
        let g: [MultiPoly; 4] = h.map(|e| mult.scale(&e.into()));
        let ell2: RationalFunction = parse_rational_function(targets[r.gen_range(0..targets.len())], &lv).map_err(|e| e.to_string())?;
        let ell1 = act_function(&RatMatrix2::from_ints(h[0], h[1], h[2], h[3]), &ell2).ok_or("singular action")?;
        match disjoint1_extract(&g, &ell1, &ell2).map_err(|e| e.to_string())? {
            Disjoint1Outcome::Witness(w) | Disjoint1Outcome::SpecialOverBase(w) => {
                ensure(!w.is_scalar() && act_function(&w, &ell2) == Some(ell1.clone()), || format!("bad witness for {h:?}"))?;
            }
            Disjoint1Outcome::NoRelation => return Err(format!("no witness for {h:?}")),
        }
    }
    let (mut invertible, mut singular) = (0, 0);
    while invertible < 20 || singular < 5 {
        let size = r.gen_range(1..=3);
        let mut raw: Vec<Vec<Rational>> = (0..size).map(|_| (0..size).map(|_| Rational::from(r.gen_range(-5i64..=5))).collect()).collect();
        if invertible >= 20 && size > 1 {
            raw[size - 1] = raw[0].iter().map(|e| e * &Rational::from(2)).collect();
        }
        let is_singular = rank(raw.clone()) < size;
        match kronecker_normalize(&raw) {
            Ok(m) => {
                ensure(!is_singular, || format!("singular {raw:?} accepted"))?;
                for i in 0..size {
                    for k in 0..size {
                        let acc = (0..size).fold(Rational::zero(), |acc, l| &acc + &(&m[i][l] * &raw[l][k]));
                        ensure(acc == if i == k { Rational::one() } else { Rational::zero() }, || format!("not normalized: {raw:?}"))?;
                    }
                }
                invertible += 1;
            }
            Err(_) => {
                ensure(is_singular, || format!("invertible {raw:?} rejected"))?;
                singular += 1;
            }
        }
    }
    Ok(())
}

fn predimension_arithmetic() -> Outcome {
    let mut r = rng(8);
    for _ in 0..10 {
        let links = [r.gen_range(0..4u8), r.gen_range(0..4u8)];
        let cfg = Config {
            links,
            constant: r.gen_bool(0.5) && !links.contains(&1),
            extra: r.gen_bool(0.5),
        };
        let a = Analysis::from_json(&cfg.json(), DEFAULT_SEED).map_err(|e| e.to_string())?;
        let split: u32 = r.gen_range(1..7);
        let cs: Vec<usize> = (0..3).filter(|i| split >> i & 1 == 1).collect();
        let rest: Vec<usize> = (0..3).filter(|i| !cs.contains(i)).collect();
        let all = [0, 1, 2];
        let d = |p: &[usize], o: &[usize]| delta(&a, &zs(&a, p), &zs(&a, o)).map(|d| d.delta).map_err(|e| e.to_string());
        let (d_all, d_rel, d_c) = (d(&all, &[])?, d(&rest, &cs)?, d(&cs, &[])?);
        ensure(d_all == d_rel + d_c, || format!("{cfg:?}: δ = {d_all} ≠ {d_rel} + {d_c}"))?;
        let brute = (brute_delta(&a, &cfg, &all, &[]), brute_delta(&a, &cfg, &rest, &cs), brute_delta(&a, &cfg, &cs, &[]));
        ensure(brute == (d_all, d_rel, d_c), || format!("{cfg:?}: brute force {brute:?}"))?;
    }
    let a = Analysis::from_json(
        r#"{"generators": ["z", "j0", "j1", "j2"], "jpoints": [{"z": "z", "j0": "j0", "j1": "j1", "j2": "j2"}]}"#,
        DEFAULT_SEED,
    )
    .map_err(|e| e.to_string())?;
    let s = schanuel_report(&a, &[0], &[]).map_err(|e| e.to_string())?;
    ensure(s.holds && s.equality && s.lhs == 4 && s.dim_g == 1 && s.dim_j == 1, || format!("{s:?}"))
}

fn scale(v: &mut Option<Value>, by: f64) {
    let z = v.as_ref().map(Value::complex).unwrap_or_default() * by;
    *v = Some(Value::Numeric { re: z.re, im: z.im });
}

fn axiom_checker() -> Outcome {
    let cfg = AxiomConfig::default();
    let g2 = RatMatrix2::from_ints(2, 0, 0, 1);
    let mut r = rng(9);
    for k in 0..5 {
        let tau = c(r.gen_range(-0.5..0.5), r.gen_range(0.7..1.6));
        let g = [g2.clone(), RatMatrix2::from_ints(1, 1, 0, 1), RatMatrix2::from_ints(0, -1, 1, 0), RatMatrix2::from_ints(1, 0, 2, 1), RatMatrix2::from_ints(3, 1, 0, 1)][k].clone();
        let f = fragment_from_evaluator(&[tau], &[g], None).map_err(|e| e.to_string())?;
        let rep = check_axioms(&f, &cfg);
        for a in 1..=4 {
            ensure(rep.status(a) == Status::Pass, || format!("axiom {a} at {tau}: {:?}", rep.axioms[a as usize - 1]))?;
        }
        ensure(rep.status(5) != Status::Fail && rep.status(6) != Status::Fail, || format!("{rep:?}"))?;
    }
    let base = |gs: &[RatMatrix2]| fragment_from_evaluator(&[c(0.2, 1.3)], gs, None).map_err(|e| e.to_string());
    let mut dup = base(&[])?;
    let mut copy = dup.points[0].clone();
    copy.id = "copy".into();
    dup.points.push(copy);
    let mut moved = base(std::slice::from_ref(&g2))?;
    moved.points[1].value = Value::Numeric { re: 0.4, im: 2.7 };
    let mut third = base(&[])?;
    scale(&mut third.points[0].jet[3], 1.01);
    let mut transported = base(&[g2])?;
    scale(&mut transported.points[1].jet[2], 1.01);
    transported.points[1].jet.truncate(3);
    for (axiom, f) in [(1u8, dup), (2, moved), (3, third), (4, transported)] {
        let failing = check_axioms(&f, &cfg).failing();
        ensure(failing == vec![axiom], || format!("corruption of axiom {axiom} flagged {failing:?}"))?;
    }
    Ok(())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("exact ODE identity", exact_ode_identity),
        ("modular polynomials", modular_polynomials),
        ("special values", special_values),
        ("invariance and relations", invariance_and_relations),
        ("pregeometry suites", pregeometry_suites),
        ("derivation dimensions", derivation_dimensions),
        ("constructive lemmas", constructive_lemmas),
        ("predimension arithmetic", predimension_arithmetic),
        ("axiom checker", axiom_checker),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("PASS {} {name} ({secs:.1}s)", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name} ({secs:.1}s): {why}", k + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
