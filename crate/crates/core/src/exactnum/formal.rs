//! Formal derivations on polynomial rings. A derivation is fixed by the
//! images of the variables; the chain rule does the rest. Repeated
//! application produces higher-order composite formulas mechanically.

use super::MultiPoly;

/// Derivation of `ℚ[x_1, …, x_n]` given by `x_i ↦ images[i]`.
#[derive(Clone, Debug)]
pub struct Derivation {
    images: Vec<MultiPoly>,
}

impl Derivation {
    pub fn new(images: Vec<MultiPoly>) -> Self {
        Derivation { images }
    }

    pub fn image(&self, var: usize) -> &MultiPoly {
        &self.images[var]
    }

    /// `D(p) = Σ_i ∂p/∂x_i · D(x_i)`.
    pub fn apply(&self, p: &MultiPoly) -> MultiPoly {
        assert_eq!(self.images.len(), p.arity(), "derivation arity mismatch");
        let mut out = MultiPoly::zero(p.vars().clone());
        for i in p.support() {
            if self.images[i].is_zero() {
                continue;
            }
            out = out.add(&p.derivative(i).mul(&self.images[i]));
        }
        out
    }

    /// `[p, D p, D² p, …, D^k p]`.
    pub fn iterate(&self, p: &MultiPoly, k: usize) -> Vec<MultiPoly> {
        let mut out = vec![p.clone()];
        for _ in 0..k {
            let next = self.apply(out.last().unwrap());
            out.push(next);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, vars_of};

    #[test]
    fn chain_rule_composition() {
        // f(u(z)) with u' = w^2, w' = -w^2 (w = 1/z): D^2 of f gives
        // f2*u1^2 + f1*u1'.
        let v = vars_of(&["f0", "f1", "f2", "w"]);
        let var = |i| MultiPoly::var(v.clone(), i);
        let u1 = var(3).pow(2);
        let d = Derivation::new(vec![
            var(1).mul(&u1),
            var(2).mul(&u1),
            MultiPoly::zero(v.clone()),
            var(3).pow(2).scale(&int(-1)),
        ]);
        let seq = d.iterate(&var(0), 2);
        assert_eq!(seq[1].to_string(), "f1*w^2");
        assert_eq!(seq[2].to_string(), "f2*w^4 - 2*f1*w^3");
    }
}
