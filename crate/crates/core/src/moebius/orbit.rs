use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use num_integer::Integer;

use super::matrix::{primitive_form, RatMatrix2};
use super::{act_complex, act_function_matrix, MoebiusError};
use crate::exactnum::linalg::nullspace;
use crate::exactnum::{MultiPoly, Rational, RationalFunction, Ring};

/// Outcome of an exact orbit decision; the witness `g` satisfies `g·y = x`.
#[derive(Debug, Clone, PartialEq)]
pub enum ExactOrbitDecision<W> {
    Dependent(W),
    Independent,
}

impl<W> ExactOrbitDecision<W> {
    pub fn is_dependent(&self) -> bool {
        matches!(self, ExactOrbitDecision::Dependent(_))
    }
}

/// Outcome of a bounded numeric search; never a proof of independence.
#[derive(Debug, Clone, PartialEq)]
pub enum NumericOrbitDecision {
    Dependent(RatMatrix2),
    IndependentUpTo(u32),
}

/// Decides whether `x = g·y` for some `g ∈ GL₂(ℚ)`, with `x, y ∈ ℚ(t̄)`.
pub fn orbit_decide_exact(
    x: &RationalFunction,
    y: &RationalFunction,
) -> Result<ExactOrbitDecision<RatMatrix2>, MoebiusError> {
    if x.is_constant() || y.is_constant() {
        return Err(MoebiusError::ConstantInput);
    }
    Ok(match orbit_decide_exact_over(x, y, &[])? {
        ExactOrbitDecision::Dependent(w) => {
            let m = RatMatrix2::new(
                w[0].constant_value().unwrap(),
                w[1].constant_value().unwrap(),
                w[2].constant_value().unwrap(),
                w[3].constant_value().unwrap(),
            );
            ExactOrbitDecision::Dependent(canonical_witness(&m))
        }
        ExactOrbitDecision::Independent => ExactOrbitDecision::Independent,
    })
}

/// Primitive integral form with `(c, d)` lexicographically positive.
pub fn canonical_witness(m: &RatMatrix2) -> RatMatrix2 {
    let p = primitive_form(m).to_matrix();
    let flip = p.c.is_negative() || (p.c.is_zero() && p.d.is_negative());
    if flip {
        p.scale(&Rational::from(-1))
    } else {
        p
    }
}

/// Decision over the base field `F = ℚ(base)`, where `base` names variables
/// of the common context that are treated as coefficients. Points lying in
/// `F` are mutually dependent and independent from points outside `F`.
pub fn orbit_decide_exact_over(
    x: &RationalFunction,
    y: &RationalFunction,
    base: &[String],
) -> Result<ExactOrbitDecision<[RationalFunction; 4]>, MoebiusError> {
    if x.vars() != y.vars() {
        return Err(MoebiusError::VariableMismatch);
    }
    let vars = x.vars().clone();
    let point_vars: Vec<usize> = (0..vars.len()).filter(|&i| !base.contains(&vars[i])).collect();
    let in_base = |f: &RationalFunction| {
        f.numer()
            .support()
            .into_iter()
            .chain(f.denom().support())
            .all(|i| !point_vars.contains(&i))
    };
    let one = x.one_like();
    let zero = x.zero_like();
    match (in_base(x), in_base(y)) {
        (true, true) => {
            return Ok(ExactOrbitDecision::Dependent([
                one.clone(),
                x.sub(y),
                zero,
                one,
            ]))
        }
        (true, false) | (false, true) => return Ok(ExactOrbitDecision::Independent),
        _ => {}
    }
    // a·y + b − c·x·y − d·x = 0 after clearing denominators.
    let (xn, xd, yn, yd) = (x.numer(), x.denom(), y.numer(), y.denom());
    let coeffs = [
        yn.mul(xd),
        xd.mul(yd),
        xn.mul(yn).neg(),
        xn.mul(yd).neg(),
    ];
    let splits: Vec<_> = coeffs.iter().map(|p| p.split_by(&point_vars)).collect();
    let mut keys: Vec<_> = splits.iter().flat_map(|s| s.keys().cloned()).collect();
    keys.sort();
    keys.dedup();
    let zero_poly = MultiPoly::zero(vars.clone());
    let entry = |k: usize, key| splits[k].get(key).cloned().unwrap_or_else(|| zero_poly.clone());

    let candidates: Vec<[RationalFunction; 4]> = if base.is_empty() {
        let rows: Vec<Vec<Rational>> = keys
            .iter()
            .map(|key| {
                (0..4)
                    .map(|k| entry(k, key).constant_value().expect("coefficients are rational"))
                    .collect()
            })
            .collect();
        let ns = nullspace(&rows, 4, &Rational::zero());
        combinations(&ns)
            .into_iter()
            .map(|v| std::array::from_fn(|i| RationalFunction::constant(vars.clone(), v[i].clone())))
            .collect()
    } else {
        let rows: Vec<Vec<RationalFunction>> = keys
            .iter()
            .map(|key| (0..4).map(|k| RationalFunction::from_poly(entry(k, key))).collect())
            .collect();
        let ns = nullspace(&rows, 4, &zero);
        combinations(&ns)
            .into_iter()
            .map(|v| std::array::from_fn(|i| v[i].clone()))
            .collect()
    };
    for w in candidates {
        let det = w[0].mul(&w[3]).sub(&w[1].mul(&w[2]));
        if det.is_zero() {
            continue;
        }
        if act_function_matrix(&w, y).is_some_and(|img| img == *x) {
            return Ok(ExactOrbitDecision::Dependent(w));
        }
    }
    Ok(ExactOrbitDecision::Independent)
}

/// Basis vectors followed by a few small integer combinations, enough to
/// find a nonsingular element when the solution space has dimension ≥ 2.
fn combinations<F: Ring>(basis: &[Vec<F>]) -> Vec<Vec<F>> {
    let mut out: Vec<Vec<F>> = basis.to_vec();
    if basis.len() >= 2 {
        for i in 0..basis.len() {
            for j in (i + 1)..basis.len() {
                for k in 1..=3i64 {
                    let kk = basis[j][0].from_i64_like(k);
                    out.push(
                        basis[i]
                            .iter()
                            .zip(&basis[j])
                            .map(|(a, b)| a.plus(&b.times(&kk)))
                            .collect(),
                    );
                }
            }
        }
    }
    out
}

/// Primitive integer matrices with entries in `[-h, h]`, nonzero
/// determinant and `(c, d)` lexicographically positive, ordered by
/// `(height, |det|, |c|, c, d, a, b)`.
pub fn enumerate_primitive_matrices(h: u32) -> Arc<Vec<[i64; 4]>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<[i64; 4]>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&h) {
        return v.clone();
    }
    let h = h as i64;
    let mut out = Vec::new();
    for c in 0..=h {
        for d in -h..=h {
            if c == 0 && d <= 0 {
                continue;
            }
            for a in -h..=h {
                for b in -h..=h {
                    if a * d - b * c == 0 {
                        continue;
                    }
                    if a.gcd(&b).gcd(&c).gcd(&d) != 1 {
                        continue;
                    }
                    out.push([a, b, c, d]);
                }
            }
        }
    }
    let key = |m: &[i64; 4]| {
        let height = m.iter().map(|x| x.abs()).max().unwrap();
        let det = (m[0] * m[3] - m[1] * m[2]).abs();
        (height, det, m[2].abs(), m[2], m[3], m[0], m[1])
    };
    out.sort_by_key(key);
    let arc = Arc::new(out);
    cache.lock().unwrap().insert(h as u32, arc.clone());
    arc
}

/// Searches primitive integer matrices of height ≤ `h` for `g·x ≈ y`.
pub fn orbit_decide_numeric(x: Complex64, y: Complex64, h: u32, tol: f64) -> NumericOrbitDecision {
    for m in enumerate_primitive_matrices(h).iter() {
        let g = RatMatrix2::from_ints(m[0], m[1], m[2], m[3]);
        if let Some(w) = act_complex(&g, x) {
            if (w - y).norm() < tol {
                return NumericOrbitDecision::Dependent(g);
            }
        }
    }
    NumericOrbitDecision::IndependentUpTo(h)
}
