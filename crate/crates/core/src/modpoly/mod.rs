//! Classical modular polynomials Φ_N and the relations obtained by
//! differentiating `Φ_N(j(z), j(gz)) = 0` in `z`.

mod build;
mod derived;

pub use build::coset_representatives;
pub use derived::{derived_relation, relation_vars, DerivedRelation, JetArgs};

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactnum::{Field, IntPoly2, Rational, Ring};
use crate::qseries::{j_series, LaurentSeries};

/// Default upper bound on the level accepted by [`build_modular_polynomial`].
pub const DEFAULT_MAX_LEVEL: u32 = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModPolyError {
    #[error("level {0} outside 1..={1}")]
    LevelOutOfRange(u32, u32),
    #[error("precision {precision} cannot resolve the principal parts of level {level}")]
    PrecisionExhausted { level: u32, precision: usize },
    #[error("expansion failed integrality check at exponent {exponent}: {detail}")]
    NonIntegralExpansion { exponent: i64, detail: String },
    #[error("relation order {0} outside 1..=3")]
    InvalidOrder(u32),
}

/// `ψ(N) = N·Π_{p | N}(1 + 1/p)`, the number of cosets and the degree of Φ_N.
pub fn psi(n: u32) -> u64 {
    let mut m = n;
    let mut out = n as u64;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            out = out / p as u64 * (p as u64 + 1);
            while m.is_multiple_of(p) {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        out = out / m as u64 * (m as u64 + 1);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModularPolynomial {
    pub level: u32,
    pub poly: IntPoly2,
    /// `∂Φ_N/∂X`.
    pub dx: IntPoly2,
    /// `∂Φ_N/∂Y`.
    pub dy: IntPoly2,
}

impl ModularPolynomial {
    fn from_poly(level: u32, poly: IntPoly2) -> Self {
        let dx = poly.d_dx();
        let dy = poly.d_dy();
        ModularPolynomial { level, poly, dx, dy }
    }

    pub fn eval<R: Ring>(&self, x: &R, y: &R) -> R {
        self.poly.eval(x, y)
    }

    /// Mixed partial `∂^{i+k}Φ/∂X^i∂Y^k`.
    pub fn partial(&self, i: u32, k: u32) -> IntPoly2 {
        let mut p = self.poly.clone();
        for _ in 0..i {
            p = p.d_dx();
        }
        for _ in 0..k {
            p = p.d_dy();
        }
        p
    }

    pub fn to_record(&self) -> ModPolyRecord {
        ModPolyRecord {
            n: self.level,
            coeffs: self
                .poly
                .terms()
                .map(|(&(i, j), c)| (i, j, c.to_string()))
                .collect(),
        }
    }
}

/// Serialized form `{N, coeffs: [[i, j, "c"], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModPolyRecord {
    #[serde(rename = "N")]
    pub n: u32,
    pub coeffs: Vec<(u32, u32, String)>,
}

/// Initial j precision used by the construction.
pub fn construction_precision(n: u32) -> usize {
    (psi(n) * (n as u64 + 1) + 16) as usize
}

pub fn build_modular_polynomial(n: u32) -> Result<Arc<ModularPolynomial>, ModPolyError> {
    build_modular_polynomial_bounded(n, DEFAULT_MAX_LEVEL)
}

/// Builds (or fetches from the process-wide cache) Φ_N, retrying at doubled
/// precision when the principal parts are not resolved.
pub fn build_modular_polynomial_bounded(n: u32, max_level: u32) -> Result<Arc<ModularPolynomial>, ModPolyError> {
    if n == 0 || n > max_level {
        return Err(ModPolyError::LevelOutOfRange(n, max_level));
    }
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<ModularPolynomial>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&n) {
        return Ok(p.clone());
    }
    let built = Arc::new(construct_modular_polynomial(n)?);
    cache.lock().unwrap().insert(n, built.clone());
    Ok(built)
}

/// Builds Φ_N without consulting the cache.
pub fn construct_modular_polynomial(n: u32) -> Result<ModularPolynomial, ModPolyError> {
    if n == 0 {
        return Err(ModPolyError::LevelOutOfRange(n, DEFAULT_MAX_LEVEL));
    }
    let mut m = construction_precision(n);
    let mut last = None;
    for _ in 0..4 {
        match build::build_at_precision(n, m) {
            Ok(poly) => return Ok(ModularPolynomial::from_poly(n, poly)),
            Err(e @ ModPolyError::PrecisionExhausted { .. }) => {
                last = Some(e);
                m *= 2;
            }
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

/// `Φ_N(j(q^N), j(q))` through `q^m`; identically zero for a correct Φ_N.
pub fn verify_modular_polynomial(phi: &ModularPolynomial, m: i64) -> LaurentSeries<Rational> {
    let n = phi.level;
    let extra = (psi(n) * (n as u64 + 1)) as i64;
    let jq = j_series((m.max(0) + extra) as usize);
    let jn = jq.substitute_power(n);
    let dx = phi.poly.degree_x() as usize;
    let dy = phi.poly.degree_y() as usize;
    let powers = |s: &LaurentSeries<Rational>, k: usize| {
        let mut v = vec![s.pow(0)];
        for i in 1..=k {
            let next = v[i - 1].mul(s);
            v.push(next);
        }
        v
    };
    let xp = powers(&jn, dx);
    let yp = powers(&jq, dy);
    let mut acc: Option<LaurentSeries<Rational>> = None;
    for (&(i, j), c) in phi.poly.terms() {
        let term = xp[i as usize]
            .mul(&yp[j as usize])
            .scale(&Rational::from(c.clone()));
        acc = Some(match acc {
            None => term,
            Some(a) => a.add(&term),
        });
    }
    acc.unwrap_or_else(|| LaurentSeries::rational_zero(m)).truncate(m)
}

/// `(x, y)` is a singular point of the curve `Φ_N(X, Y) = 0`.
pub fn check_singularity<F: Field>(phi: &ModularPolynomial, x: &F, y: &F) -> bool {
    phi.poly.vanishes_at(x, y) && phi.dx.vanishes_at(x, y) && phi.dy.vanishes_at(x, y)
}

/// Integer coefficient of `X^i Y^j`.
pub fn coefficient(phi: &ModularPolynomial, i: u32, j: u32) -> BigInt {
    phi.poly.coeff(i, j)
}
