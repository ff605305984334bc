//! Exact arithmetic: big rationals, sparse multivariate polynomials,
//! rational functions, bivariate integer polynomials, cyclotomic residues,
//! a prime field for specialization, and generic linear algebra.

mod cyclo;
pub mod formal;
mod fp;
mod intpoly2;
pub mod linalg;
pub mod parse;
mod poly;
mod rational;
mod ratfunc;
mod ring;

pub use cyclo::{cyclotomic_polynomial, euler_phi, residue_content, CycloCoeff};
pub use fp::{upoly, Fp, FP_MODULUS};
pub use intpoly2::IntPoly2;
pub use poly::{int, vars_of, Monomial, MultiPoly, PolyRecord, Vars};
pub use rational::{common_denominator, gcd_all, Rational};
pub use ratfunc::{rational_function_equal, RationalFunction};
pub use ring::{Field, Ring};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
    #[error("variable lists differ")]
    VariableMismatch,
}

/// Splits a 2×2 matrix of polynomials into its constant coefficient
/// matrices: `g = Σ_i g_i · x̄^i`. Entries are `[a, b, c, d]`.
pub fn poly_coefficient_split(g: &[MultiPoly; 4]) -> Vec<(Vec<u32>, [Rational; 4])> {
    use std::collections::BTreeMap;
    let arity = g[0].arity();
    assert!(
        g.iter().all(|p| p.arity() == arity),
        "matrix entries must share one variable arity"
    );
    let mut out: BTreeMap<Monomial, [Rational; 4]> = BTreeMap::new();
    for (k, p) in g.iter().enumerate() {
        for (m, c) in p.terms() {
            out.entry(m.clone()).or_default()[k] = c.clone();
        }
    }
    out.into_iter().map(|(m, e)| (m.0, e)).collect()
}

/// Rebuilds `Σ g_i · x̄^i` from a coefficient split.
pub fn poly_coefficient_join(vars: &Vars, parts: &[(Vec<u32>, [Rational; 4])]) -> [MultiPoly; 4] {
    let mut out: [MultiPoly; 4] = std::array::from_fn(|_| MultiPoly::zero(vars.clone()));
    for (e, m) in parts {
        for k in 0..4 {
            out[k].add_term(Monomial(e.clone()), m[k].clone());
        }
    }
    out
}
