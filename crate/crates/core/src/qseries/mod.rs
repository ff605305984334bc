//! Exact q-expansions: truncated Laurent series, the j-function built from
//! Eisenstein series, `θ = q·d/dq`, and the order-3 differential equation of
//! j written through the rational function ℸ.

mod laurent;

pub use laurent::{LaurentSeries, SeriesRecord};

use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::exactnum::{vars_of, Field, MultiPoly, Rational, Ring};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QSeriesError {
    #[error("division by a series that is zero to precision")]
    DivisionByZeroSeries,
    #[error("singular locus: j1 = 0 or j0 in {{0, 1728}}")]
    SingularLocus,
    #[error("precision {0} below the minimum {1}")]
    InvalidPrecision(i64, i64),
}

fn divisor_power_sums(n: usize, k: u32) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); n + 1];
    for d in 1..=n {
        let dk = BigInt::from(d).pow(k);
        for m in (d..=n).step_by(d) {
            out[m] += &dk;
        }
    }
    out
}

fn eisenstein(n: usize, k: u32, c: i64) -> Vec<BigInt> {
    let mut e = divisor_power_sums(n, k);
    for x in e.iter_mut() {
        *x *= c;
    }
    e[0] = BigInt::one();
    e
}

fn conv(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// Inverse of an integer power series with constant term 1.
fn inverse_unit(a: &[BigInt]) -> Vec<BigInt> {
    let mut out: Vec<BigInt> = Vec::with_capacity(a.len());
    out.push(BigInt::one());
    for n in 1..a.len() {
        let mut acc = BigInt::zero();
        for k in 1..=n {
            acc += &a[k] * &out[n - k];
        }
        out.push(-acc);
    }
    out
}

/// Coefficients of `q^{-1}, q^0, …, q^m` of j.
fn j_coefficients(m: usize) -> Vec<BigInt> {
    let p = m + 2;
    let len = p + 1;
    let e4 = eisenstein(p, 3, 240);
    let e6 = eisenstein(p, 5, -504);
    let e4_cubed = conv(&conv(&e4, &e4, len), &e4, len);
    let e6_sq = conv(&e6, &e6, len);
    let delta: Vec<BigInt> = e4_cubed
        .iter()
        .zip(&e6_sq)
        .map(|(a, b)| {
            let d = a - b;
            debug_assert!((&d % 1728u32).is_zero());
            d / 1728u32
        })
        .collect();
    debug_assert!(delta[0].is_zero() && delta[1].is_one());
    let delta_inv = inverse_unit(&delta[1..]);
    conv(&e4_cubed, &delta_inv, m + 2)
}

fn cached_j_coefficients(m: usize) -> Arc<Vec<BigInt>> {
    static CACHE: OnceLock<Mutex<Option<Arc<Vec<BigInt>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(None));
    if let Some(c) = cache.lock().unwrap().as_ref() {
        if c.len() >= m + 2 {
            return c.clone();
        }
    }
    let fresh = Arc::new(j_coefficients(m));
    let mut guard = cache.lock().unwrap();
    match guard.as_ref() {
        Some(c) if c.len() >= fresh.len() => c.clone(),
        _ => {
            *guard = Some(fresh.clone());
            fresh
        }
    }
}

/// `E₄ = 1 + 240 Σ σ₃(n) qⁿ` through `q^m`.
pub fn e4_series(m: usize) -> LaurentSeries<Rational> {
    let c = eisenstein(m, 3, 240);
    LaurentSeries::from_rationals(0, c.into_iter().map(Rational::from).collect(), m as i64)
}

/// `E₆ = 1 − 504 Σ σ₅(n) qⁿ` through `q^m`.
pub fn e6_series(m: usize) -> LaurentSeries<Rational> {
    let c = eisenstein(m, 5, -504);
    LaurentSeries::from_rationals(0, c.into_iter().map(Rational::from).collect(), m as i64)
}

/// Integer coefficients of j from `q^{-1}` through `q^m`.
pub fn j_integer_coefficients(m: usize) -> Vec<BigInt> {
    let c = cached_j_coefficients(m);
    c[..m + 2].to_vec()
}

/// `j = q⁻¹ + 744 + 196884q + …` through `q^m`.
pub fn j_series(m: usize) -> LaurentSeries<Rational> {
    let c = j_integer_coefficients(m);
    LaurentSeries::from_rationals(-1, c.into_iter().map(Rational::from).collect(), m as i64)
}

pub fn theta<C: Ring>(s: &LaurentSeries<C>) -> LaurentSeries<C> {
    s.theta()
}

/// ℸ(X, Y, Z, W) as numerator over denominator with
/// `N = 2X²(X−1728)²WY − 3X²(X−1728)²Z² + (X² − 1968X + 2654208)Y⁴` and
/// `D = 2X²(X−1728)²Y²`.
#[derive(Debug, Clone)]
pub struct DalethForm {
    pub numerator: MultiPoly,
    pub denominator: MultiPoly,
}

pub fn daleth_form() -> &'static DalethForm {
    static FORM: OnceLock<DalethForm> = OnceLock::new();
    FORM.get_or_init(|| {
        let v = vars_of(&["X", "Y", "Z", "W"]);
        let var = |i| MultiPoly::var(v.clone(), i);
        let c = |n: i64| MultiPoly::constant(v.clone(), Rational::from(n));
        let (x, y, z, w) = (var(0), var(1), var(2), var(3));
        let xa = x.pow(2).mul(&x.sub(&c(1728)).pow(2));
        let quad = x.pow(2).sub(&x.scale(&Rational::from(1968))).add(&c(2654208));
        let numerator = c(2)
            .mul(&xa)
            .mul(&w)
            .mul(&y)
            .sub(&c(3).mul(&xa).mul(&z.pow(2)))
            .add(&quad.mul(&y.pow(4)));
        let denominator = c(2).mul(&xa).mul(&y.pow(2));
        DalethForm {
            numerator,
            denominator,
        }
    })
}

impl DalethForm {
    /// `ℸ(x, y, z, w)`, `None` on the polar locus `xy(x − 1728) = 0`.
    pub fn eval<F: Field>(&self, x: &F, y: &F, z: &F, w: &F) -> Option<F> {
        let args = [x.clone(), y.clone(), z.clone(), w.clone()];
        let d = self.denominator.eval(&args)?;
        self.numerator.eval(&args)?.divided_by(&d)
    }

    pub fn numerator_at<R: Ring>(&self, x: &R, y: &R, z: &R, w: &R) -> Option<R> {
        self.numerator.eval(&[x.clone(), y.clone(), z.clone(), w.clone()])
    }
}

/// `ℸ(j, θj, θ²j, θ³j)` as an exact series.
pub fn daleth_series(j: &LaurentSeries<Rational>) -> Result<LaurentSeries<Rational>, QSeriesError> {
    let y = j.theta();
    let z = y.theta();
    let w = z.theta();
    if y.is_zero() {
        return Err(QSeriesError::DivisionByZeroSeries);
    }
    let c = |n: i64| Rational::from(n);
    let x2 = j.mul(j);
    let shifted = j.add_constant(&c(-1728));
    let xa = x2.mul(&shifted.mul(&shifted));
    let quad = x2.sub(&j.scale(&c(1968))).add_constant(&c(2654208));
    let num = xa
        .mul(&w)
        .mul(&y)
        .scale(&c(2))
        .sub(&xa.mul(&z.mul(&z)).scale(&c(3)))
        .add(&quad.mul(&y.pow(4)));
    let den = xa.mul(&y.mul(&y)).scale(&c(2));
    num.div(&den).ok_or(QSeriesError::DivisionByZeroSeries)
}

/// Residual `ℸ(j, θj, θ²j, θ³j)` through `q^m`; zero for the genuine j.
pub fn verify_modular_ode(m: i64) -> Result<LaurentSeries<Rational>, QSeriesError> {
    if m < 5 {
        return Err(QSeriesError::InvalidPrecision(m, 5));
    }
    let j = j_series((m + 8) as usize);
    Ok(daleth_series(&j)?.truncate(m))
}

/// `R(x) = (x² − 1968x + 2654208) / (2x²(x − 1728)²)`.
pub fn daleth_rational_part<F: Field>(j0: &F) -> Option<F> {
    let c = |n: i64| j0.from_i64_like(n);
    let shifted = j0.minus(&c(1728));
    let den = c(2).times(&j0.times(j0)).times(&shifted.times(&shifted));
    let num = j0.times(j0).minus(&c(1968).times(j0)).plus(&c(2654208));
    num.divided_by(&den)
}

/// `j3 = 3j2²/(2j1) − R(j0)·j1³`, the ODE solved for the third derivative.
pub fn solve_daleth_for_j3<F: Field>(j0: &F, j1: &F, j2: &F) -> Result<F, QSeriesError> {
    if j1.is_zero() || j0.is_zero() || j0.minus(&j0.from_i64_like(1728)).is_zero() {
        return Err(QSeriesError::SingularLocus);
    }
    let r = daleth_rational_part(j0).ok_or(QSeriesError::SingularLocus)?;
    let three_half = j0.embed_rational(&Rational::new(3, 2)).expect("3/2 embeds");
    let first = three_half
        .times(&j2.times(j2))
        .divided_by(j1)
        .ok_or(QSeriesError::SingularLocus)?;
    Ok(first.minus(&r.times(&j1.times(j1).times(j1))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn j_leading_terms() {
        let j = j_series(1);
        assert_eq!(j.valuation(), -1);
        assert_eq!(j.precision(), 1);
        assert_eq!(j.coeff(-1), Rational::one());
        assert_eq!(j.coeff(0), Rational::from(744));
        assert_eq!(j.coeff(1), Rational::from(196884));
        assert_eq!(j_series(0).coeff(0), Rational::from(744));
    }

    #[test]
    fn theta_of_j() {
        let t = j_series(3).theta();
        assert_eq!(t.coeff(0), Rational::zero());
        assert_eq!(t.coeff(1), Rational::from(196884));
        assert_eq!(t.coeff(-1), Rational::from(-1));
    }

    #[test]
    fn ode_small_precision() {
        let r = verify_modular_ode(30).unwrap();
        assert!(r.is_zero());
        assert_eq!(r.precision(), 30);
    }

    #[test]
    fn ode_detects_perturbation() {
        let j = j_series(20);
        let bump = LaurentSeries::monomial(Rational::one(), 1, 20);
        let r = daleth_series(&j.add(&bump)).unwrap().truncate(12);
        assert!(!r.is_zero());
    }

    #[test]
    fn daleth_solution_consistent_with_form() {
        let (j0, j1, j2) = (Rational::from(5), Rational::new(-2, 3), Rational::from(7));
        let j3 = solve_daleth_for_j3(&j0, &j1, &j2).unwrap();
        assert!(daleth_form().eval(&j0, &j1, &j2, &j3).unwrap().is_zero());
        assert_eq!(
            solve_daleth_for_j3(&j0, &Rational::zero(), &j2),
            Err(QSeriesError::SingularLocus)
        );
        assert_eq!(
            solve_daleth_for_j3(&Rational::from(1728), &j1, &j2),
            Err(QSeriesError::SingularLocus)
        );
    }

    #[test]
    fn verify_requires_minimum_precision() {
        assert_eq!(verify_modular_ode(4), Err(QSeriesError::InvalidPrecision(4, 5)));
    }
}
