//! Minimal algebraic traits shared by series, linear algebra and the
//! numeric pipelines.
//!
//! Elements carry their own context (a cyclotomic order, a variable list),
//! so constants are produced from an existing element with `zero_like` /
//! `one_like` rather than from a static constructor.

use std::fmt::Debug;

use super::Rational;

pub trait Ring: Clone + PartialEq + Debug + Send + Sync {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, rhs: &Self) -> Self;
    fn minus(&self, rhs: &Self) -> Self;
    fn times(&self, rhs: &Self) -> Self;
    fn negated(&self) -> Self;

    /// Image of a rational number, `None` when it does not exist (a
    /// denominator that vanishes in a prime field, for instance).
    fn embed_rational(&self, r: &Rational) -> Option<Self>;

    fn from_i64_like(&self, n: i64) -> Self {
        self.embed_rational(&Rational::from(n))
            .expect("integers embed in every ring used here")
    }

    /// `self += a * b`.
    fn add_product(&mut self, a: &Self, b: &Self) {
        *self = self.plus(&a.times(b));
    }

    fn pow_u(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = self.one_like();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.times(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.times(&base);
            }
        }
        acc
    }
}

pub trait Field: Ring {
    /// Multiplicative inverse, `None` for zero.
    fn inverse(&self) -> Option<Self>;

    fn divided_by(&self, rhs: &Self) -> Option<Self> {
        rhs.inverse().map(|inv| self.times(&inv))
    }
}
