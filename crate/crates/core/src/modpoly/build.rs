use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;

use super::{psi, ModPolyError};
use crate::exactnum::{CycloCoeff, IntPoly2, Rational, Ring};
use crate::qseries::{j_integer_coefficients, LaurentSeries};

/// Upper-triangular coset representatives `(a, b, d)` with `ad = N`,
/// `0 ≤ b < d` and `gcd(a, b, d) = 1`.
pub fn coset_representatives(n: u32) -> Vec<(u32, u32, u32)> {
    let mut out = Vec::new();
    for a in 1..=n {
        if !n.is_multiple_of(a) {
            continue;
        }
        let d = n / a;
        for b in 0..d {
            if a.gcd(&b).gcd(&d) == 1 {
                out.push((a, b, d));
            }
        }
    }
    out
}

/// Builds `Φ_N` from j expanded to `q^m`. Returns `PrecisionExhausted` when
/// the principal parts cannot all be resolved at this precision.
pub(super) fn build_at_precision(n: u32, m: usize) -> Result<IntPoly2, ModPolyError> {
    if n == 1 {
        let mut p = IntPoly2::new();
        p.add_term((1, 0), BigInt::from(1));
        p.add_term((0, 1), BigInt::from(-1));
        return Ok(p);
    }
    let j = j_integer_coefficients(m);
    let order = n;
    let zero = CycloCoeff::zero(order);
    let zetas: Vec<CycloCoeff> = (0..order as i64).map(|k| CycloCoeff::zeta_power(order, k)).collect();
    // Precisions beyond anything the factors can carry, for exact constants.
    let s_cap = (n * n) as i64 * (m as i64 + 2);

    // Factors j((aτ + b)/d) as series in s = q^{1/N}: q^{a/d}·ζ_d^b = s^{a²}·ζ_N^{ab}.
    let mut poly: Vec<LaurentSeries<CycloCoeff>> = vec![LaurentSeries::constant(CycloCoeff::from_integer(order, 1), s_cap)];
    for (a, b, _d) in coset_representatives(n) {
        let step = (a * a) as usize;
        let len = step * (j.len() - 1) + 1;
        let mut coeffs = vec![zero.clone(); len];
        for (k, c) in j.iter().enumerate() {
            let e = k as i64 - 1;
            let root = (a as i64 * b as i64 * e).rem_euclid(order as i64) as usize;
            coeffs[k * step] = zetas[root].scale(c);
        }
        let val = -(step as i64);
        let prec = step as i64 * (m as i64 + 1) - 1;
        let f = LaurentSeries::new(val, coeffs, prec, zero.clone());
        // Multiply the polynomial in X by (X − f); poly[k] is the coefficient of X^k.
        let mut next = Vec::with_capacity(poly.len() + 1);
        next.push(poly[0].mul(&f).neg());
        for k in 1..poly.len() {
            next.push(poly[k - 1].sub(&poly[k].mul(&f)));
        }
        next.push(poly[poly.len() - 1].clone());
        poly = next;
    }

    let jq = LaurentSeries::from_rationals(
        -1,
        j.iter().map(|c| Rational::from(c.clone())).collect(),
        m as i64,
    );
    let deg = psi(n) as usize;
    let mut jpow = vec![LaurentSeries::constant(Rational::one(), m as i64 + 2)];
    for k in 1..=deg {
        let next = jpow[k - 1].mul(&jq);
        jpow.push(next);
    }

    let mut out = IntPoly2::new();
    for (xdeg, coeff) in poly.iter().enumerate() {
        let qs = to_q_series(coeff, n)?;
        for (ydeg, c) in eliminate(&qs, &jpow, n, m)? {
            out.add_term((xdeg as u32, ydeg), c);
        }
    }
    Ok(out)
}

/// Rewrites a series in `s = q^{1/N}` as a series in `q`, checking that only
/// exponents divisible by `N` occur and that every coefficient is an integer.
fn to_q_series(s: &LaurentSeries<CycloCoeff>, n: u32) -> Result<LaurentSeries<Rational>, ModPolyError> {
    let n = n as i64;
    let prec = Integer::div_floor(&s.precision(), &n);
    if s.is_zero() {
        return Ok(LaurentSeries::rational_zero(prec));
    }
    let val = Integer::div_ceil(&s.valuation(), &n);
    let mut coeffs = Vec::new();
    for (k, c) in s.coefficients().iter().enumerate() {
        let e = s.valuation() + k as i64;
        if c.is_zero() {
            continue;
        }
        if e.rem_euclid(n) != 0 {
            return Err(ModPolyError::NonIntegralExpansion {
                exponent: e,
                detail: "fractional power of q survives symmetrization".into(),
            });
        }
        let int = c.as_integer().ok_or_else(|| ModPolyError::NonIntegralExpansion {
            exponent: e,
            detail: "coefficient outside ℤ".into(),
        })?;
        if e / n > prec {
            break;
        }
        let idx = (e / n - val) as usize;
        if coeffs.len() <= idx {
            coeffs.resize(idx + 1, Rational::zero());
        }
        coeffs[idx] = Rational::from(int.clone());
    }
    Ok(LaurentSeries::from_rationals(val, coeffs, prec))
}

/// Expresses a q-series as an integer polynomial in j by cancelling the
/// principal part against powers of j; the remainder must vanish.
fn eliminate(
    s: &LaurentSeries<Rational>,
    jpow: &[LaurentSeries<Rational>],
    n: u32,
    m: usize,
) -> Result<BTreeMap<u32, BigInt>, ModPolyError> {
    let exhausted = || ModPolyError::PrecisionExhausted {
        level: n,
        precision: m,
    };
    let mut rest = s.clone();
    let mut out = BTreeMap::new();
    let start = rest.valuation().min(0);
    for t in start..=0 {
        let c = rest.get(t).ok_or_else(exhausted)?;
        if c.is_zero() {
            continue;
        }
        let k = (-t) as usize;
        let p = jpow.get(k).ok_or_else(|| ModPolyError::NonIntegralExpansion {
            exponent: t,
            detail: format!("pole of order {k} exceeds ψ(N)"),
        })?;
        let int = c.to_integer().ok_or_else(|| ModPolyError::NonIntegralExpansion {
            exponent: t,
            detail: "non-integral principal part".into(),
        })?;
        rest = rest.sub(&p.scale(&c));
        out.insert(k as u32, int);
    }
    if rest.precision() < 1 {
        return Err(exhausted());
    }
    if !rest.is_zero() {
        return Err(ModPolyError::NonIntegralExpansion {
            exponent: rest.valuation(),
            detail: "nonzero remainder after eliminating the principal part".into(),
        });
    }
    Ok(out)
}
