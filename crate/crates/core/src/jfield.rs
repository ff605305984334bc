//! Finite fragments of j-fields and a checker for the six j-field axioms.
//!
//! A fragment lists points of `D` with their values in `K` (the map `α`),
//! optional jets `(j, j′, j″, j‴)`, a few matrices and orbit relations
//! `dst = g·src`. Axioms 1–4 are decidable on such data up to a numeric
//! tolerance. Axioms 5 and 6 assert the existence of matrices, so the
//! checker searches up to a height bound and reports `Unverified` when
//! nothing is found.

use std::collections::HashSet;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::evaluator::{evaluate_jet, EvalError};
use crate::exactnum::Rational;
use crate::modpoly::{build_modular_polynomial_bounded, derived_relation, JetArgs, DEFAULT_MAX_LEVEL};
use crate::moebius::{act, enumerate_primitive_matrices, primitive_form, ExactPoint, Image, MatrixRecord, RatMatrix2};
use crate::numeric::Cx;
use crate::qseries::{daleth_form, solve_daleth_for_j3};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FragmentError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("duplicate point id {0:?}")]
    DuplicateId(String),
    #[error("unknown point id {0:?}")]
    UnknownId(String),
    #[error("group element {0} is out of range")]
    UnknownGroupElement(usize),
    #[error("group element {0} is singular")]
    SingularGroupElement(usize),
    #[error("a jet has {0} entries; expected 3 or 4")]
    JetLength(usize),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// A value in `K`: a complex number or an exact rational.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Numeric { re: f64, im: f64 },
    Exact(Rational),
}

impl Value {
    pub fn complex(&self) -> Complex64 {
        match self {
            Value::Numeric { re, im } => Complex64::new(*re, *im),
            Value::Exact(r) => Complex64::new(r.to_f64(), 0.0),
        }
    }

    fn from_complex(z: Complex64) -> Self {
        Value::Numeric { re: z.re, im: z.im }
    }

    fn point(&self) -> ExactPoint {
        match self {
            Value::Numeric { re, im } => ExactPoint::numeric(*re, *im),
            Value::Exact(r) => ExactPoint::Rational(r.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FragmentPoint {
    pub id: String,
    pub value: Value,
    /// `[j, j′, j″]` or `[j, j′, j″, j‴]`; a `null` `j‴` is free.
    pub jet: Vec<Option<Value>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitRelation {
    pub g: usize,
    pub src: String,
    pub dst: String,
}

fn default_tolerance() -> f64 {
    1e-6
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JFieldFragment {
    pub points: Vec<FragmentPoint>,
    #[serde(default)]
    pub group: Vec<MatrixRecord>,
    #[serde(default)]
    pub relations: Vec<OrbitRelation>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

impl JFieldFragment {
    pub fn from_json(s: &str) -> Result<Self, FragmentError> {
        let f: JFieldFragment = serde_json::from_str(s).map_err(|e| FragmentError::Parse(e.to_string()))?;
        f.validate()?;
        Ok(f)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("fragments serialize")
    }

    pub fn validate(&self) -> Result<(), FragmentError> {
        let mut ids = HashSet::new();
        for p in &self.points {
            if !ids.insert(p.id.as_str()) {
                return Err(FragmentError::DuplicateId(p.id.clone()));
            }
            if !(3..=4).contains(&p.jet.len()) {
                return Err(FragmentError::JetLength(p.jet.len()));
            }
        }
        for (k, g) in self.group.iter().enumerate() {
            if RatMatrix2::from(g.clone()).det().is_zero() {
                return Err(FragmentError::SingularGroupElement(k));
            }
        }
        for r in &self.relations {
            for id in [&r.src, &r.dst] {
                if !ids.contains(id.as_str()) {
                    return Err(FragmentError::UnknownId(id.clone()));
                }
            }
            if r.g >= self.group.len() {
                return Err(FragmentError::UnknownGroupElement(r.g));
            }
        }
        Ok(())
    }

    fn point(&self, id: &str) -> &FragmentPoint {
        self.points.iter().find(|p| p.id == id).expect("validated id")
    }

    fn matrix(&self, k: usize) -> RatMatrix2 {
        self.group[k].clone().into()
    }
}

/// Builds a fragment from numeric points: one point per `τ`, and for each
/// pair `(g, τ)` the image `g·τ` with its orbit relation.
pub fn fragment_from_evaluator(
    taus: &[Complex64],
    gs: &[RatMatrix2],
    terms: Option<usize>,
) -> Result<JFieldFragment, FragmentError> {
    let jet_of = |z: Complex64| -> Result<Vec<Option<Value>>, FragmentError> {
        let jv = evaluate_jet(z, terms)?;
        Ok(jv.to_c64().iter().map(|&c| Some(Value::from_complex(c))).collect())
    };
    let mut points = Vec::new();
    let mut relations = Vec::new();
    for (i, &t) in taus.iter().enumerate() {
        points.push(FragmentPoint {
            id: format!("z{i}"),
            value: Value::from_complex(t),
            jet: jet_of(t)?,
        });
    }
    for (k, g) in gs.iter().enumerate() {
        for (i, &t) in taus.iter().enumerate() {
            let image = match act(g, &ExactPoint::numeric(t.re, t.im)) {
                Ok(Image::Finite(p)) => p.as_complex().expect("numeric image"),
                _ => return Err(FragmentError::SingularGroupElement(k)),
            };
            let id = format!("g{k}z{i}");
            points.push(FragmentPoint {
                id: id.clone(),
                value: Value::from_complex(image),
                jet: jet_of(image)?,
            });
            relations.push(OrbitRelation {
                g: k,
                src: format!("z{i}"),
                dst: id,
            });
        }
    }
    Ok(JFieldFragment {
        points,
        group: gs.iter().map(MatrixRecord::from).collect(),
        relations,
        tolerance: default_tolerance(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Pass,
    Fail,
    Unverified,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomCheck {
    pub axiom: u8,
    pub status: Status,
    pub checked: usize,
    pub details: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub axioms: Vec<AxiomCheck>,
    pub tolerance: f64,
    pub height: u32,
    pub level_bound: u32,
    pub orientation: &'static str,
}

impl AxiomReport {
    pub fn status(&self, axiom: u8) -> Status {
        self.axioms
            .iter()
            .find(|a| a.axiom == axiom)
            .map(|a| a.status)
            .expect("axioms 1-6 are always reported")
    }

    pub fn failing(&self) -> Vec<u8> {
        self.axioms.iter().filter(|a| a.status == Status::Fail).map(|a| a.axiom).collect()
    }

    /// `Fail` if any axiom fails, `Unverified` if some axiom could not be
    /// confirmed, `Pass` otherwise.
    pub fn overall(&self) -> Status {
        let s: Vec<Status> = self.axioms.iter().map(|a| a.status).collect();
        if s.contains(&Status::Fail) {
            Status::Fail
        } else if s.contains(&Status::Unverified) {
            Status::Unverified
        } else {
            Status::Pass
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxiomConfig {
    /// Height bound of the witness searches for axioms 5 and 6.
    pub height: u32,
    /// Overrides the fragment's tolerance when set.
    pub tolerance: Option<f64>,
    /// Largest `N` for which pairs are scanned with `Φ_N` in axiom 5.
    pub level_bound: u32,
}

impl Default for AxiomConfig {
    fn default() -> Self {
        AxiomConfig {
            height: 3,
            tolerance: None,
            level_bound: 5,
        }
    }
}

struct Tally {
    axiom: u8,
    checked: usize,
    failed: bool,
    unverified: bool,
    details: Vec<String>,
}

impl Tally {
    fn new(axiom: u8) -> Self {
        Tally {
            axiom,
            checked: 0,
            failed: false,
            unverified: false,
            details: Vec::new(),
        }
    }

    fn pass(&mut self, note: Option<String>) {
        self.checked += 1;
        self.details.extend(note);
    }

    fn fail(&mut self, note: String) {
        self.checked += 1;
        self.failed = true;
        self.details.push(format!("FAIL {note}"));
    }

    fn unverified(&mut self, note: String) {
        self.checked += 1;
        self.unverified = true;
        self.details.push(format!("UNVERIFIED {note}"));
    }

    fn finish(self) -> AxiomCheck {
        AxiomCheck {
            axiom: self.axiom,
            status: if self.failed {
                Status::Fail
            } else if self.unverified {
                Status::Unverified
            } else {
                Status::Pass
            },
            checked: self.checked,
            details: self.details,
        }
    }
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * a.norm().max(b.norm()).max(1.0)
}

/// Jet as complex numbers with `j‴` filled from the differential equation
/// when it is absent and the point is off the singular locus.
fn complete_jet(p: &FragmentPoint, tol: f64) -> ([Complex64; 3], Option<Complex64>, bool) {
    let c: Vec<Option<Complex64>> = p.jet.iter().map(|v| v.as_ref().map(Value::complex)).collect();
    let j = [c[0], c[1], c[2]].map(|v| v.unwrap_or(Complex64::new(f64::NAN, f64::NAN)));
    if let Some(Some(j3)) = c.get(3) {
        return (j, Some(*j3), false);
    }
    if on_singular_locus(&j, tol) {
        return (j, None, false);
    }
    let filled = solve_daleth_for_j3(&Cx(j[0]), &Cx(j[1]), &Cx(j[2])).ok().map(|v| v.0);
    (j, filled, filled.is_some())
}

fn on_singular_locus(j: &[Complex64; 3], tol: f64) -> bool {
    let scale = 1728.0;
    j[0].norm() <= tol * scale || (j[0] - 1728.0).norm() <= tol * scale || j[1].norm() <= tol * j[0].norm().max(1.0)
}

/// Relative ℸ residual: `|N| / Σ|terms of N|`.
fn daleth_relative(j: &[Complex64; 4]) -> f64 {
    let form = daleth_form();
    let v = j.map(Cx);
    let n = form
        .numerator_at(&v[0], &v[1], &v[2], &v[3])
        .expect("numerator is a polynomial")
        .0;
    let scale: f64 = form
        .numerator
        .terms()
        .iter()
        .map(|(m, c)| c.to_f64().abs() * m.0.iter().zip(j).map(|(&e, z)| z.norm().powi(e as i32)).product::<f64>())
        .sum();
    if scale == 0.0 {
        0.0
    } else {
        n.norm() / scale
    }
}

fn show(z: Complex64) -> String {
    format!("{:.6e}{:+.6e}i", z.re, z.im)
}

fn is_scalar(m: &[i64; 4]) -> bool {
    m[1] == 0 && m[2] == 0 && m[0] == m[3]
}

fn fixes(m: &[i64; 4], z: Complex64, tol: f64) -> bool {
    let g = RatMatrix2::from_ints(m[0], m[1], m[2], m[3]);
    matches!(act(&g, &ExactPoint::numeric(z.re, z.im)), Ok(Image::Finite(w)) if close(w.as_complex().unwrap(), z, tol))
}

pub fn check_axioms(f: &JFieldFragment, cfg: &AxiomConfig) -> AxiomReport {
    let tol = cfg.tolerance.unwrap_or(f.tolerance);
    let jets: Vec<_> = f.points.iter().map(|p| complete_jet(p, tol)).collect();
    let index = |id: &str| f.points.iter().position(|p| p.id == id).expect("validated id");

    let mut a1 = Tally::new(1);
    for (i, p) in f.points.iter().enumerate() {
        for q in &f.points[i + 1..] {
            let equal = match (&p.value, &q.value) {
                (Value::Exact(x), Value::Exact(y)) => x == y,
                (x, y) => close(x.complex(), y.complex(), tol),
            };
            if equal {
                a1.fail(format!("{} and {} have the same value", p.id, q.id));
            } else {
                a1.pass(None);
            }
        }
    }

    let mut a2 = Tally::new(2);
    for r in &f.relations {
        let g = f.matrix(r.g);
        let (src, dst) = (f.point(&r.src), f.point(&r.dst));
        let ok = match act(&g, &src.value.point()) {
            Ok(Image::Finite(ExactPoint::Rational(x))) => match &dst.value {
                Value::Exact(y) => x == *y,
                v => close(Complex64::new(x.to_f64(), 0.0), v.complex(), tol),
            },
            Ok(Image::Finite(w)) => close(w.as_complex().expect("numeric image"), dst.value.complex(), tol),
            _ => false,
        };
        if ok {
            a2.pass(None);
        } else {
            a2.fail(format!("g{}·{} ≠ {}", r.g, r.src, r.dst));
        }
    }

    let mut a3 = Tally::new(3);
    for (p, (j, j3, filled)) in f.points.iter().zip(&jets) {
        if on_singular_locus(j, tol) {
            continue;
        }
        match j3 {
            Some(_) if *filled => a3.pass(Some(format!("{}: j‴ filled from the equation", p.id))),
            Some(w) => {
                let res = daleth_relative(&[j[0], j[1], j[2], *w]);
                if res <= tol {
                    a3.pass(None);
                } else {
                    a3.fail(format!("{}: relative ℸ residual {res:.3e}", p.id));
                }
            }
            None => a3.unverified(format!("{}: j‴ unavailable", p.id)),
        }
    }

    let mut a4 = Tally::new(4);
    for r in &f.relations {
        let g = f.matrix(r.g);
        let pf = primitive_form(&g);
        let n = pf.n() as u32;
        let label = format!("{} -> {} (N = {n})", r.src, r.dst);
        if n > DEFAULT_MAX_LEVEL {
            a4.unverified(format!("{label}: level above {DEFAULT_MAX_LEVEL}"));
            continue;
        }
        let (is, id) = (index(&r.src), index(&r.dst));
        let (jz, jz3, _) = jets[is];
        let (jg, jg3, _) = jets[id];
        let z = f.points[is].value.complex();
        let ints = pf.matrix.clone().map(|e| Rational::from(e).to_f64());
        let w = Complex64::new(1.0, 0.0) / (ints[2] * z + ints[3]);
        let phi = build_modular_polynomial_bounded(n, DEFAULT_MAX_LEVEL).expect("level within bound");
        let value = phi.eval(&Cx(jz[0]), &Cx(jg[0])).0;
        let scale = phi.poly.abs_eval(jz[0].norm(), jg[0].norm()).max(f64::MIN_POSITIVE);
        let mut worst = value.norm() / scale;
        let nan = Complex64::new(f64::NAN, f64::NAN);
        let full = [jz[0], jz[1], jz[2], jz3.unwrap_or(nan)];
        let fullg = [jg[0], jg[1], jg[2], jg3.unwrap_or(nan)];
        let top = if jz3.is_some() && jg3.is_some() { 3 } else { 2 };
        for order in 1..=top {
            let rel = derived_relation(n, order).expect("orders 1-3");
            let args = JetArgs {
                jz: full.map(Cx),
                jgz: fullg.map(Cx),
                g: ints.map(|e| Cx(Complex64::new(e, 0.0))),
                w: Cx(w),
            };
            let abs = JetArgs {
                jz: full.map(|c| c.norm()),
                jgz: fullg.map(|c| c.norm()),
                g: ints,
                w: w.norm(),
            };
            let res = rel.residual(&args).0.norm() / rel.magnitude(&abs).max(f64::MIN_POSITIVE);
            worst = worst.max(res);
        }
        if !worst.is_finite() || worst > tol {
            a4.fail(format!("{label}: relative residual {worst:.3e}"));
        } else {
            a4.pass(if top < 3 {
                Some(format!("{label}: order 3 skipped, j‴ unavailable"))
            } else {
                None
            });
        }
    }

    let mut a5 = Tally::new(5);
    for i in 0..f.points.len() {
        for k in 0..f.points.len() {
            if i == k {
                continue;
            }
            let (x, y) = (jets[i].0[0], jets[k].0[0]);
            for n in 1..=cfg.level_bound {
                let Ok(phi) = build_modular_polynomial_bounded(n, DEFAULT_MAX_LEVEL) else {
                    break;
                };
                let rel = phi.eval(&Cx(x), &Cx(y)).0.norm() / phi.poly.abs_eval(x.norm(), y.norm()).max(f64::MIN_POSITIVE);
                if rel > tol {
                    continue;
                }
                let (zi, zk) = (f.points[i].value.complex(), f.points[k].value.complex());
                let found = enumerate_primitive_matrices(cfg.height).iter().copied().find(|m| {
                    let det = (m[0] * m[3] - m[1] * m[2]).unsigned_abs();
                    det == n as u64
                        && matches!(act(&RatMatrix2::from_ints(m[0], m[1], m[2], m[3]), &ExactPoint::numeric(zk.re, zk.im)),
                            Ok(Image::Finite(w)) if close(w.as_complex().unwrap(), zi, tol))
                });
                match found {
                    Some(m) => a5.pass(Some(format!("{} = {:?}·{} (N = {n})", f.points[i].id, m, f.points[k].id))),
                    None => a5.unverified(format!(
                        "Φ_{n}(j({}), j({})) ≈ 0 but no witness of height ≤ {}",
                        f.points[i].id, f.points[k].id, cfg.height
                    )),
                }
                break;
            }
        }
    }

    let mut a6 = Tally::new(6);
    for (p, (j, _, _)) in f.points.iter().zip(&jets) {
        if !on_singular_locus(j, tol) {
            continue;
        }
        let z = p.value.complex();
        let found = enumerate_primitive_matrices(cfg.height)
            .iter().copied()
            .find(|m| !is_scalar(m) && fixes(m, z, tol));
        match found {
            Some(m) => a6.pass(Some(format!("{} fixed by {:?}", p.id, m))),
            None => a6.unverified(format!("{} at {}: no stabilizer of height ≤ {}", p.id, show(z), cfg.height)),
        }
    }

    AxiomReport {
        axioms: vec![a1.finish(), a2.finish(), a3.finish(), a4.finish(), a5.finish(), a6.finish()],
        tolerance: tol,
        height: cfg.height,
        level_bound: cfg.level_bound,
        orientation: "derived relations evaluated as Φ_N(j(src), j(dst)) with dst = g·src",
    }
}
