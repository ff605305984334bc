use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;

use super::{build_modular_polynomial, ModPolyError, ModularPolynomial};
use crate::exactnum::formal::Derivation;
use crate::exactnum::{vars_of, IntPoly2, Monomial, MultiPoly, Rational, Ring, Vars};

/// Partial-derivative slots `(i, k)` for `∂^{i+k}Φ/∂X^i∂Y^k`, `1 ≤ i+k ≤ 3`.
const PARTIALS: [(u32, u32); 9] = [
    (1, 0),
    (0, 1),
    (2, 0),
    (1, 1),
    (0, 2),
    (3, 0),
    (2, 1),
    (1, 2),
    (0, 3),
];

const X1: usize = 9;
const Y1: usize = 12;
const A: usize = 15;
const W: usize = 19;

/// Variables of the relation templates: `P_ik`, then `x1..x3` (derivatives
/// of j at z), `y1..y3` (derivatives of j at gz), then `a, b, c, d` and
/// `w = 1/(cz + d)`.
pub fn relation_vars() -> Vars {
    static VARS: OnceLock<Vars> = OnceLock::new();
    VARS.get_or_init(|| {
        let mut names: Vec<String> = PARTIALS.iter().map(|(i, k)| format!("P{i}{k}")).collect();
        names.extend(["x1", "x2", "x3", "y1", "y2", "y3", "a", "b", "c", "d", "w"].map(String::from));
        vars_of(&names)
    })
    .clone()
}

fn partial_index(i: u32, k: u32) -> Option<usize> {
    PARTIALS.iter().position(|&p| p == (i, k))
}

fn z_derivation() -> &'static Derivation {
    static D: OnceLock<Derivation> = OnceLock::new();
    D.get_or_init(|| {
        let v = relation_vars();
        let var = |i| MultiPoly::var(v.clone(), i);
        let zero = MultiPoly::zero(v.clone());
        let det = var(A).mul(&var(A + 3)).sub(&var(A + 1).mul(&var(A + 2)));
        // d(gz)/dz = det·w².
        let chain = det.mul(&var(W).pow(2));
        let mut images = Vec::with_capacity(v.len());
        for &(i, k) in PARTIALS.iter() {
            let img = match (partial_index(i + 1, k), partial_index(i, k + 1)) {
                (Some(px), Some(py)) => var(px)
                    .mul(&var(X1))
                    .add(&var(py).mul(&var(Y1)).mul(&chain)),
                _ => zero.clone(),
            };
            images.push(img);
        }
        images.extend([var(X1 + 1), var(X1 + 2), zero.clone()]);
        images.extend([
            var(Y1 + 1).mul(&chain),
            var(Y1 + 2).mul(&chain),
            zero.clone(),
        ]);
        images.extend(std::iter::repeat_n(zero.clone(), 4));
        images.push(var(A + 2).mul(&var(W).pow(2)).neg());
        Derivation::new(images)
    })
}

/// The `order`-th z-derivative of `Φ_N(j(z), j(gz)) = 0`.
#[derive(Debug, Clone)]
pub struct DerivedRelation {
    pub level: u32,
    pub order: u32,
    /// Template over [`relation_vars`].
    pub expr: MultiPoly,
    partials: Vec<IntPoly2>,
    phi: Arc<ModularPolynomial>,
}

/// Numeric or exact inputs of a relation: the jets `(j, j′, j″, j‴)` at `z`
/// and at `gz`, the entries of `g` and `w = 1/(cz + d)`.
#[derive(Debug, Clone)]
pub struct JetArgs<R> {
    pub jz: [R; 4],
    pub jgz: [R; 4],
    pub g: [R; 4],
    pub w: R,
}

pub fn derived_relation(n: u32, order: u32) -> Result<DerivedRelation, ModPolyError> {
    if !(1..=3).contains(&order) {
        return Err(ModPolyError::InvalidOrder(order));
    }
    let phi = build_modular_polynomial(n)?;
    let v = relation_vars();
    let var = |i| MultiPoly::var(v.clone(), i);
    let det = var(A).mul(&var(A + 3)).sub(&var(A + 1).mul(&var(A + 2)));
    let first = var(0)
        .mul(&var(X1))
        .add(&var(1).mul(&var(Y1)).mul(&det).mul(&var(W).pow(2)));
    let expr = z_derivation().iterate(&first, (order - 1) as usize).pop().unwrap();
    let partials = PARTIALS.iter().map(|&(i, k)| phi.partial(i, k)).collect();
    Ok(DerivedRelation {
        level: n,
        order,
        expr,
        partials,
        phi,
    })
}

impl DerivedRelation {
    pub fn modular_polynomial(&self) -> &ModularPolynomial {
        &self.phi
    }

    /// Value of the relation's left-hand side; zero on genuine data.
    pub fn residual<R: Ring>(&self, args: &JetArgs<R>) -> R {
        let mut values: Vec<R> = self
            .partials
            .iter()
            .map(|p| p.eval(&args.jz[0], &args.jgz[0]))
            .collect();
        values.extend(args.jz[1..].iter().cloned());
        values.extend(args.jgz[1..].iter().cloned());
        values.extend(args.g.iter().cloned());
        values.push(args.w.clone());
        self.expr.eval(&values).expect("integer coefficients embed")
    }

    /// Sum of absolute values of the expanded monomials, a natural scale for
    /// relative residuals.
    pub fn magnitude(&self, abs_args: &JetArgs<f64>) -> f64 {
        let mut values: Vec<f64> = self
            .partials
            .iter()
            .map(|p| p.abs_eval(abs_args.jz[0].abs(), abs_args.jgz[0].abs()))
            .collect();
        values.extend(abs_args.jz[1..].iter().map(|x| x.abs()));
        values.extend(abs_args.jgz[1..].iter().map(|x| x.abs()));
        values.extend(abs_args.g.iter().map(|x| x.abs()));
        values.push(abs_args.w.abs());
        self.expr
            .terms()
            .iter()
            .map(|(m, c)| {
                c.to_f64().abs()
                    * m.0
                        .iter()
                        .zip(&values)
                        .map(|(&e, v)| v.powi(e as i32))
                        .product::<f64>()
            })
            .sum()
    }

    /// Polynomial form over `x0..x3, y0..y3, a, b, c, d, z`, obtained by
    /// substituting the partials of Φ_N and multiplying by `(cz + d)^{2·order}`.
    pub fn polynomial_form(&self) -> MultiPoly {
        let names = ["x0", "x1", "x2", "x3", "y0", "y1", "y2", "y3", "a", "b", "c", "d", "z"];
        let tv = vars_of(&names);
        let var = |i| MultiPoly::var(tv.clone(), i);
        let u = var(10).mul(&var(12)).add(&var(11));
        let partials: Vec<MultiPoly> = self
            .partials
            .iter()
            .map(|p| intpoly_to_multi(p, &tv, 0, 4))
            .collect();
        let mut images: Vec<MultiPoly> = partials;
        images.extend([var(1), var(2), var(3), var(5), var(6), var(7)]);
        images.extend([var(8), var(9), var(10), var(11)]);
        images.push(MultiPoly::one(tv.clone()));
        let top = 2 * self.order;
        let mut out = MultiPoly::zero(tv.clone());
        for (m, c) in self.expr.terms() {
            let wdeg = m.0[W];
            assert!(wdeg <= top, "w-degree exceeds 2·order");
            let mut single = MultiPoly::zero(self.expr.vars().clone());
            single.add_term(m.clone(), c.clone());
            let term = single.compose(&images).mul(&u.pow(top - wdeg));
            out = out.add(&term);
        }
        out
    }
}

fn intpoly_to_multi(p: &IntPoly2, vars: &Vars, xi: usize, yi: usize) -> MultiPoly {
    let arity = vars.len();
    let mut out = MultiPoly::zero(vars.clone());
    for (&(i, j), c) in p.terms() {
        let mut e = vec![0u32; arity];
        e[xi] = i;
        e[yi] = j;
        out.add_term(Monomial(e), Rational::from(BigInt::clone(c)));
    }
    out
}
