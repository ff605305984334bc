use serde::Serialize;

use super::{gcl_dimension, GclConfig, PointSpec, PregeomError};
use crate::exactnum::{poly_coefficient_split, vars_of, MultiPoly, RationalFunction};
use crate::moebius::{act_function, act_function_matrix, RatMatrix2};

#[derive(Debug, Clone, PartialEq)]
pub enum Disjoint1Outcome {
    /// A non-scalar `g_i ∈ GL₂(ℚ)` with `g_i·ℓ₂ = ℓ₁`.
    Witness(RatMatrix2),
    /// `ℓ₁ = ℓ₂` and the returned non-scalar matrix fixes it.
    SpecialOverBase(RatMatrix2),
    NoRelation,
}

/// Given `g` over `ℚ[x̄]` and `ℓ₁, ℓ₂` in separate variables with
/// `ℓ₁ = g·ℓ₂`, writes `g = Σ g_i x̄^i` and returns a coefficient matrix
/// over `ℚ` carrying `ℓ₂` to `ℓ₁`.
pub fn disjoint1_extract(
    g: &[MultiPoly; 4],
    l1: &RationalFunction,
    l2: &RationalFunction,
) -> Result<Disjoint1Outcome, PregeomError> {
    let xv = g[0].vars().clone();
    if g.iter().any(|p| p.vars() != &xv) || l1.vars() != l2.vars() {
        return Err(PregeomError::Config("inconsistent variable lists".into()));
    }
    let lv = l1.vars().clone();
    if xv.iter().any(|n| lv.contains(n)) {
        return Err(PregeomError::VariableOverlap);
    }
    let names: Vec<String> = xv.iter().chain(lv.iter()).cloned().collect();
    let all = vars_of(&names);
    let embed_err = |e: crate::exactnum::ExactError| PregeomError::Parse(e.to_string());

    let gg: [RationalFunction; 4] = g
        .iter()
        .map(|p| p.embed(&all).map(RationalFunction::from_poly))
        .collect::<Result<Vec<_>, _>>()
        .map_err(embed_err)?
        .try_into()
        .expect("four entries");
    let det = gg[0].mul(&gg[3]).sub(&gg[1].mul(&gg[2]));
    if det.is_zero() {
        return Err(PregeomError::HypothesisViolated("det(g) = 0".into()));
    }
    let (e1, e2) = (l1.embed(&all).map_err(embed_err)?, l2.embed(&all).map_err(embed_err)?);
    if act_function_matrix(&gg, &e2).is_none_or(|img| img != e1) {
        return Ok(Disjoint1Outcome::NoRelation);
    }

    let mut chosen = None;
    for (exponent, entries) in poly_coefficient_split(g) {
        let [a, b, c, d] = entries;
        let gi = RatMatrix2::new(a, b, c, d);
        if gi.entries().iter().all(|e| e.is_zero()) {
            continue;
        }
        if gi.det().is_zero() {
            return Err(PregeomError::HypothesisViolated(format!(
                "coefficient matrix at x^{exponent:?} is singular"
            )));
        }
        if act_function(&gi, l2).is_none_or(|img| img != *l1) {
            return Err(PregeomError::HypothesisViolated(format!(
                "coefficient matrix at x^{exponent:?} does not carry l2 to l1"
            )));
        }
        if chosen.is_none() && !gi.is_scalar() {
            chosen = Some(gi);
        }
    }
    let w = chosen.ok_or_else(|| PregeomError::HypothesisViolated("g is scalar".into()))?;
    Ok(if l1 == l2 {
        Disjoint1Outcome::SpecialOverBase(w)
    } else {
        Disjoint1Outcome::Witness(w)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Disjoint2Report {
    pub dim_f_over_l: usize,
    pub dim_e_over_l: usize,
    pub dim_f_over_a: usize,
    pub dim_e_over_a: usize,
    pub lhs: i64,
    pub rhs: i64,
    pub holds: bool,
}

/// Evaluates `dim_F(x̄/L) − dim_E(x̄/L) ≤ dim_F(x̄/A) − dim_E(x̄/A)` for
/// `A ⊆ L`, where `e` and `f` configure the two base fields.
pub fn disjoint2_check(
    xs: &[PointSpec],
    a: &[PointSpec],
    l: &[PointSpec],
    e: &GclConfig,
    f: &GclConfig,
) -> Result<Disjoint2Report, PregeomError> {
    if let Some(p) = a.iter().find(|p| !l.contains(p)) {
        return Err(PregeomError::Config(format!("{p} is in A but not in L")));
    }
    let dim_f_over_l = gcl_dimension(xs, l, f)?.dim;
    let dim_e_over_l = gcl_dimension(xs, l, e)?.dim;
    let dim_f_over_a = gcl_dimension(xs, a, f)?.dim;
    let dim_e_over_a = gcl_dimension(xs, a, e)?.dim;
    let lhs = dim_f_over_l as i64 - dim_e_over_l as i64;
    let rhs = dim_f_over_a as i64 - dim_e_over_a as i64;
    Ok(Disjoint2Report {
        dim_f_over_l,
        dim_e_over_l,
        dim_f_over_a,
        dim_e_over_a,
        lhs,
        rhs,
        holds: lhs <= rhs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::parse::{parse_poly, parse_rational_function};

    fn gmat(entries: [&str; 4]) -> [MultiPoly; 4] {
        let v = vars_of(&["x"]);
        entries.map(|e| parse_poly(e, &v).unwrap())
    }

    fn ell(s: &str, var: &str) -> RationalFunction {
        parse_rational_function(s, &vars_of(&[var])).unwrap()
    }

    #[test]
    fn scaling_witness() {
        let g = gmat(["2+4*x", "0", "0", "1+2*x"]);
        let out = disjoint1_extract(&g, &ell("2*t", "t"), &ell("t", "t")).unwrap();
        assert_eq!(out, Disjoint1Outcome::Witness(RatMatrix2::from_ints(2, 0, 0, 1)));
    }

    #[test]
    fn no_relation() {
        let g = gmat(["1+x", "x", "0", "1"]);
        let out = disjoint1_extract(&g, &ell("2*t", "t"), &ell("t", "t")).unwrap();
        assert_eq!(out, Disjoint1Outcome::NoRelation);
    }

    #[test]
    fn special_over_base() {
        // Both coefficient matrices fix 1; only the constant one is non-scalar.
        let g = gmat(["2+x", "-1", "0", "1+x"]);
        let out = disjoint1_extract(&g, &ell("1", "t"), &ell("1", "t")).unwrap();
        assert_eq!(out, Disjoint1Outcome::SpecialOverBase(RatMatrix2::from_ints(2, -1, 0, 1)));
    }

    #[test]
    fn singular_coefficient_violates_hypothesis() {
        let g = gmat(["2+x", "-1-x", "0", "1"]);
        let out = disjoint1_extract(&g, &ell("1", "t"), &ell("1", "t"));
        assert!(matches!(out, Err(PregeomError::HypothesisViolated(_))), "{out:?}");
    }

    #[test]
    fn overlapping_variables() {
        let g = gmat(["1", "x", "0", "1"]);
        let out = disjoint1_extract(&g, &ell("x", "x"), &ell("x", "x"));
        assert_eq!(out, Err(PregeomError::VariableOverlap));
    }

    fn ex(s: &[&str]) -> Vec<PointSpec> {
        s.iter().map(|p| PointSpec::Exact(p.to_string())).collect()
    }

    #[test]
    fn disjoint2_examples() {
        let e = GclConfig::new("Q");
        let f = GclConfig::new("Q(tau)");
        let r = disjoint2_check(&ex(&["t"]), &[], &ex(&["s"]), &e, &f).unwrap();
        assert!(r.holds);
        assert_eq!((r.lhs, r.rhs), (0, 0));

        let r = disjoint2_check(&ex(&["s"]), &[], &ex(&["s"]), &e, &f).unwrap();
        assert!(r.holds && r.lhs <= 0 && 0 <= r.rhs);
    }
}
