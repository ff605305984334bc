//! Numeric j, j′, j″, j‴ on ℍ⁺ ∪ ℍ⁻.
//!
//! The point is reduced into the fundamental domain, where `|q| ≤ e^{−π√3}`
//! and the q-series converges fast; θ-derivatives there are rescaled by
//! `(2πi)^k` and carried back through the Möbius map with chain-rule
//! formulas generated by [`formal::Derivation`](crate::exactnum::formal::Derivation).
//! Points in ℍ⁻ are handled by Schwarz reflection, `j(z) = conj(j(conj z))`.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

use crate::exactnum::formal::Derivation;
use crate::exactnum::{vars_of, Field, MultiPoly, Rational};
use crate::moebius::{reduce_to_fundamental_domain, SL2};
use crate::numeric::{cabs, Cx, Real, DD};
use crate::qseries::{daleth_form, j_integer_coefficients};

/// Default number of positive-index q-series terms for `f64` evaluation.
pub const F64_TERMS: usize = 24;
/// Default number of terms for double-double evaluation.
pub const DD_TERMS: usize = 40;

/// Distance from the elliptic points below which the bound is inflated.
const CORNER_RADIUS: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("τ lies on the real axis")]
    RealAxisInput,
    #[error("singular curve: a³ − 27b² = 0")]
    SingularCurve,
    #[error("degenerate Legendre parameter λ ∈ {{0, 1}}")]
    DegenerateLambda,
}

/// `(j, j′, j″, j‴)` at `tau` with absolute error bounds.
#[derive(Debug, Clone)]
pub struct JetValue<R: Real = f64> {
    pub tau: Complex<R>,
    pub j: [Complex<R>; 4],
    /// Largest of the component bounds.
    pub error_bound: f64,
    pub component_errors: [f64; 4],
    /// Reduced point `g·τ` (or `g·τ̄` on ℍ⁻).
    pub reduced: Complex<R>,
    pub g: SL2,
    pub word: String,
    /// `τ₀` lies within 1e−6 of `i` or `ρ`, where the bound was inflated.
    pub near_elliptic_point: bool,
}

impl<R: Real> JetValue<R> {
    pub fn j0(&self) -> Complex<R> {
        self.j[0]
    }

    pub fn to_c64(&self) -> [Complex64; 4] {
        self.j.map(|z| Complex64::new(z.re.to_f64(), z.im.to_f64()))
    }

    /// `ℸ(j0, j1, j2, j3)`, `None` on the polar locus.
    pub fn daleth_residual(&self) -> Option<Complex<R>> {
        let [a, b, c, d] = self.j.map(Cx);
        daleth_form().eval(&a, &b, &c, &d).map(|v| v.0)
    }
}

/// `[f, f′, f″, f‴]` of `f(τ) = J(u(τ))` with `u′ = w²`, `w′ = −c·w²`,
/// as polynomials in `J0..J3, w, c`.
fn transport_formulas() -> &'static [MultiPoly] {
    static F: OnceLock<Vec<MultiPoly>> = OnceLock::new();
    F.get_or_init(|| {
        let v = vars_of(&["J0", "J1", "J2", "J3", "J4", "w", "c"]);
        let var = |i| MultiPoly::var(v.clone(), i);
        let w2 = var(5).pow(2);
        let d = Derivation::new(vec![
            var(1).mul(&w2),
            var(2).mul(&w2),
            var(3).mul(&w2),
            var(4).mul(&w2),
            MultiPoly::zero(v.clone()),
            var(6).mul(&w2).neg(),
            MultiPoly::zero(v.clone()),
        ]);
        d.iterate(&var(0), 3)
    })
}

fn coefficients<R: Real>(terms: usize) -> Vec<R> {
    j_integer_coefficients(terms)
        .iter()
        .map(R::from_bigint)
        .collect()
}

/// Upper bound for `|c_n|`: twice the asymptotic `e^{4π√n}/(√2·n^{3/4})`.
fn coefficient_bound(n: usize) -> f64 {
    let n = n as f64;
    2.0 * (4.0 * std::f64::consts::PI * n.sqrt()).exp() / (std::f64::consts::SQRT_2 * n.powf(0.75))
}

/// θ^k j at `q` for `k = 0..=3`, with absolute error estimates.
fn theta_sums<R: Real>(q: Complex<R>, terms: usize) -> ([Complex<R>; 4], [f64; 4]) {
    let c = coefficients::<R>(terms);
    let c_abs: Vec<f64> = j_integer_coefficients(terms)
        .iter()
        .map(|x: &BigInt| x.to_f64().unwrap_or(f64::INFINITY).abs())
        .collect();
    let qa = cabs(&q);
    let mut out = [Complex::new(R::zero(), R::zero()); 4];
    let mut errs = [0.0; 4];
    for k in 0..4u32 {
        // Horner in q on q·θ^k j = Σ c_n n^k q^{n+1}.
        let mut acc = Complex::new(R::zero(), R::zero());
        let mut abs_sum = 0.0;
        for (idx, cn) in c.iter().enumerate().rev() {
            let n = idx as i64 - 1;
            let nk = R::from_i128((n as i128).pow(k));
            acc = acc * q + Complex::new(*cn * nk, R::zero());
            abs_sum += c_abs[idx] * (n.abs() as f64).powi(k as i32) * qa.powi(idx as i32);
        }
        out[k as usize] = acc / q;
        let abs_sum = abs_sum / qa;
        let rounding = 8.0 * (terms as f64 + 2.0) * R::eps() * abs_sum;
        let tail: f64 = (terms + 1..terms + 80)
            .map(|n| coefficient_bound(n) * (n as f64).powi(k as i32) * qa.powi(n as i32))
            .sum();
        errs[k as usize] = rounding + tail;
    }
    (out, errs)
}

fn rho() -> Complex64 {
    Complex64::new(-0.5, 3f64.sqrt() / 2.0)
}

/// Jet on the upper half plane.
fn jet_upper<R: Real>(tau: Complex<R>, terms: usize) -> Result<JetValue<R>, EvalError> {
    let red = reduce_to_fundamental_domain(tau).map_err(|_| EvalError::RealAxisInput)?;
    let tau0 = red.tau0;
    let two_pi = R::two_pi();
    let q = {
        let r = (-(two_pi * tau0.im)).exp();
        let (s, c) = (two_pi * tau0.re).sin_cos();
        Complex::new(r * c, r * s)
    };
    let (theta, theta_err) = theta_sums(q, terms);
    // d/dτ = 2πi·θ.
    let two_pi_i = Complex::new(R::zero(), two_pi);
    let mut jd = theta;
    let mut scale = Complex::new(R::one(), R::zero());
    let mut jd_err = theta_err;
    let tp = 2.0 * std::f64::consts::PI;
    for k in 0..4 {
        jd[k] = theta[k] * scale;
        jd_err[k] = theta_err[k] * tp.powi(k as i32) * (1.0 + 4.0 * R::eps()) + 4.0 * R::eps() * cabs(&jd[k]);
        scale = scale * two_pi_i;
    }
    // Rounding in τ₀ itself moves the point by about eps·(word length)·|τ₀|.
    let steps = red.word.split(' ').count() as f64 + 1.0;
    let dtau = 16.0 * R::eps() * steps * cabs(&tau0).max(1.0);
    let abs_theta_next: Vec<f64> = (0..4)
        .map(|k| {
            let next = if k < 3 { cabs(&jd[k + 1]) } else { tp * cabs(&jd[3]) * 4.0 };
            next * dtau
        })
        .collect();
    for k in 0..4 {
        jd_err[k] += abs_theta_next[k];
    }

    let g = red.g;
    let cz = Complex::new(R::from_i128(g.c), R::zero()) * tau + Complex::new(R::from_i128(g.d), R::zero());
    let w = Complex::new(R::one(), R::zero()) / cz;
    let formulas = transport_formulas();
    let zero = Complex::new(R::zero(), R::zero());
    let args: Vec<Cx<R>> = vec![
        Cx(jd[0]),
        Cx(jd[1]),
        Cx(jd[2]),
        Cx(jd[3]),
        Cx(zero),
        Cx(w),
        Cx(Complex::new(R::from_i128(g.c), R::zero())),
    ];
    let mut vals = [zero; 4];
    for k in 0..4 {
        vals[k] = formulas[k].eval(&args).expect("integer coefficients embed").0;
    }
    // Same formulas with absolute values bound the propagated error.
    let wa = cabs(&w);
    let ca = (g.c as f64).abs();
    let abs_eval = |p: &MultiPoly, j: &[f64; 4]| -> f64 {
        let vals = [j[0], j[1], j[2], j[3], 0.0, wa, ca];
        p.terms()
            .iter()
            .map(|(m, c)| {
                c.to_f64().abs()
                    * m.0.iter().zip(&vals).map(|(&e, v)| v.powi(e as i32)).product::<f64>()
            })
            .sum()
    };
    let jd_abs = [cabs(&jd[0]), cabs(&jd[1]), cabs(&jd[2]), cabs(&jd[3])];
    let mut errs = [0.0; 4];
    for k in 0..4 {
        let propagated = abs_eval(&formulas[k], &jd_err);
        let rounding = 16.0 * R::eps() * abs_eval(&formulas[k], &jd_abs);
        errs[k] = propagated + rounding;
    }

    let t0 = Complex64::new(tau0.re.to_f64(), tau0.im.to_f64());
    let dist = (t0 - Complex64::i()).norm().min((t0 - rho()).norm());
    let near = dist < CORNER_RADIUS;
    if near {
        let inflate = CORNER_RADIUS / dist.max(1e-300);
        for e in errs.iter_mut() {
            *e *= inflate.min(1e12);
        }
    }
    let bound = errs.iter().cloned().fold(0.0, f64::max);
    Ok(JetValue {
        tau,
        j: vals,
        error_bound: bound,
        component_errors: errs,
        reduced: tau0,
        g,
        word: red.word,
        near_elliptic_point: near,
    })
}

/// Jet of j at any `τ` off the real axis, generic over the scalar type.
pub fn evaluate_jet_in<R: Real>(tau: Complex<R>, terms: usize) -> Result<JetValue<R>, EvalError> {
    if tau.im.is_zero() {
        return Err(EvalError::RealAxisInput);
    }
    if tau.im > R::zero() {
        return jet_upper(tau, terms);
    }
    let mut jet = jet_upper(tau.conj(), terms)?;
    jet.tau = tau;
    jet.j = jet.j.map(|z| z.conj());
    jet.reduced = jet.reduced.conj();
    Ok(jet)
}

/// `f64` jet with the given number of terms (default [`F64_TERMS`]).
pub fn evaluate_jet(tau: Complex64, terms: Option<usize>) -> Result<JetValue<f64>, EvalError> {
    evaluate_jet_in(tau, terms.unwrap_or(F64_TERMS))
}

/// Double-double jet with the given number of terms (default [`DD_TERMS`]).
pub fn evaluate_jet_dd(tau: Complex<DD>, terms: Option<usize>) -> Result<JetValue<DD>, EvalError> {
    evaluate_jet_in(tau, terms.unwrap_or(DD_TERMS))
}

/// `1728·a³/(a³ − 27b²)`.
pub fn weierstrass_j_invariant(a: &Rational, b: &Rational) -> Result<Rational, EvalError> {
    let a3 = a.pow(3);
    let disc = &a3 - &(Rational::from(27) * b.pow(2));
    let inv = disc.inv().ok_or(EvalError::SingularCurve)?;
    Ok(Rational::from(1728) * a3 * inv)
}

/// `2⁸(λ² − λ + 1)³ / (λ²(λ − 1)²)` over any field.
pub fn legendre_j<F: Field>(lambda: &F) -> Result<F, EvalError> {
    let one = lambda.one_like();
    let lm1 = lambda.minus(&one);
    if lambda.is_zero() || lm1.is_zero() {
        return Err(EvalError::DegenerateLambda);
    }
    let inner = lambda.times(lambda).minus(lambda).plus(&one);
    let num = inner.times(&inner).times(&inner).times(&lambda.from_i64_like(256));
    let den = lambda.times(lambda).times(&lm1).times(&lm1);
    num.divided_by(&den).ok_or(EvalError::DegenerateLambda)
}

pub fn legendre_j_complex(lambda: Complex64) -> Result<Complex64, EvalError> {
    legendre_j(&Cx(lambda)).map(|c| c.0)
}

#[derive(Debug, Clone, Serialize)]
pub struct JetRecord {
    pub tau: ComplexRecord,
    pub reduced: ComplexRecord,
    pub word: String,
    pub j: Vec<ComplexRecord>,
    pub error_bound: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ComplexRecord {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexRecord {
    fn from(z: Complex64) -> Self {
        ComplexRecord { re: z.re, im: z.im }
    }
}

impl<R: Real> JetValue<R> {
    /// Serializable view with the first `derivs + 1` components.
    pub fn to_record(&self, derivs: usize) -> JetRecord {
        let c = |z: &Complex<R>| ComplexRecord::from(Complex64::new(z.re.to_f64(), z.im.to_f64()));
        JetRecord {
            tau: c(&self.tau),
            reduced: c(&self.reduced),
            word: self.word.clone(),
            j: self.j[..=derivs.min(3)].iter().map(c).collect(),
            error_bound: self.component_errors[..=derivs.min(3)]
                .iter()
                .cloned()
                .fold(0.0, f64::max),
        }
    }
}
