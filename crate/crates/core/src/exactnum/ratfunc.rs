use std::fmt;

use super::ring::{Field, Ring};
use super::{ExactError, MultiPoly, Rational, Vars};

/// Quotient of two polynomials over a shared variable list.
///
/// Normalization: for at most one occurring variable the fraction is
/// reduced by the univariate gcd; otherwise only the rational content and
/// common monomial factors are cleared. The denominator's leading
/// coefficient is always `1`.
#[derive(Clone)]
pub struct RationalFunction {
    num: MultiPoly,
    den: MultiPoly,
}

impl RationalFunction {
    pub fn new(num: MultiPoly, den: MultiPoly) -> Result<Self, ExactError> {
        if den.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        if num.vars() != den.vars() {
            return Err(ExactError::VariableMismatch);
        }
        Ok(Self::normalized(num, den))
    }

    pub fn from_poly(p: MultiPoly) -> Self {
        let one = MultiPoly::one(p.vars().clone());
        RationalFunction { num: p, den: one }
    }

    pub fn constant(vars: Vars, c: Rational) -> Self {
        Self::from_poly(MultiPoly::constant(vars, c))
    }

    pub fn var(vars: Vars, i: usize) -> Self {
        Self::from_poly(MultiPoly::var(vars, i))
    }

    fn normalized(mut num: MultiPoly, mut den: MultiPoly) -> Self {
        if num.is_zero() {
            let vars = den.vars().clone();
            return RationalFunction {
                num,
                den: MultiPoly::one(vars),
            };
        }
        if let Some(g) = num.gcd_univariate(&den) {
            if !g.is_constant() {
                num = num.div_exact(&g).expect("gcd divides numerator");
                den = den.div_exact(&g).expect("gcd divides denominator");
            }
        } else if let Some(q) = num.div_exact(&den) {
            num = q;
            den = MultiPoly::one(den.vars().clone());
        } else if let Some(q) = den.div_exact(&num) {
            den = q;
            num = MultiPoly::one(num.vars().clone());
        } else {
            let mn = num.monomial_content();
            let md = den.monomial_content();
            let common = super::Monomial(mn.0.iter().zip(&md.0).map(|(a, b)| *a.min(b)).collect());
            if !common.is_one() {
                num = num.div_monomial(&common).unwrap();
                den = den.div_monomial(&common).unwrap();
            }
        }
        let lc = den.leading_term().unwrap().1.clone();
        let inv = lc.inv().unwrap();
        RationalFunction {
            num: num.scale(&inv),
            den: den.scale(&inv),
        }
    }

    pub fn numer(&self) -> &MultiPoly {
        &self.num
    }

    pub fn denom(&self) -> &MultiPoly {
        &self.den
    }

    pub fn vars(&self) -> &Vars {
        self.num.vars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Value in ℚ when the function is constant.
    pub fn constant_value(&self) -> Option<Rational> {
        let n = self.num.constant_value()?;
        let d = self.den.constant_value()?;
        Some(n / d)
    }

    pub fn is_constant(&self) -> bool {
        self.constant_value().is_some()
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.den == o.den {
            return Self::normalized(self.num.add(&o.num), self.den.clone());
        }
        Self::normalized(
            self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            self.den.mul(&o.den),
        )
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        RationalFunction {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::normalized(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    pub fn inv(&self) -> Option<Self> {
        if self.num.is_zero() {
            None
        } else {
            Some(Self::normalized(self.den.clone(), self.num.clone()))
        }
    }

    pub fn div(&self, o: &Self) -> Option<Self> {
        o.inv().map(|i| self.mul(&i))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::normalized(self.num.scale(c), self.den.clone())
    }

    /// Partial derivative by the quotient rule.
    pub fn derivative(&self, var: usize) -> Self {
        let n = self
            .num
            .derivative(var)
            .mul(&self.den)
            .sub(&self.num.mul(&self.den.derivative(var)));
        Self::normalized(n, self.den.mul(&self.den))
    }

    /// Evaluation in a field; `None` when the denominator vanishes or a
    /// coefficient does not embed.
    pub fn eval<F: Field>(&self, values: &[F]) -> Option<F> {
        let n = self.num.eval(values)?;
        let d = self.den.eval(values)?;
        n.divided_by(&d)
    }

    pub fn embed(&self, target: &Vars) -> Result<Self, ExactError> {
        Ok(Self::normalized(self.num.embed(target)?, self.den.embed(target)?))
    }
}

/// Equality by cross-multiplication.
pub fn rational_function_equal(a: &RationalFunction, b: &RationalFunction) -> bool {
    a.num.mul(&b.den) == b.num.mul(&a.den)
}

impl PartialEq for RationalFunction {
    fn eq(&self, other: &Self) -> bool {
        rational_function_equal(self, other)
    }
}

impl Ring for RationalFunction {
    fn zero_like(&self) -> Self {
        Self::from_poly(MultiPoly::zero(self.vars().clone()))
    }
    fn one_like(&self) -> Self {
        Self::from_poly(MultiPoly::one(self.vars().clone()))
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn plus(&self, rhs: &Self) -> Self {
        self.add(rhs)
    }
    fn minus(&self, rhs: &Self) -> Self {
        self.sub(rhs)
    }
    fn times(&self, rhs: &Self) -> Self {
        self.mul(rhs)
    }
    fn negated(&self) -> Self {
        self.neg()
    }
    fn embed_rational(&self, r: &Rational) -> Option<Self> {
        Some(Self::constant(self.vars().clone(), r.clone()))
    }
}

impl Field for RationalFunction {
    fn inverse(&self) -> Option<Self> {
        self.inv()
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_constant() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} in {:?}", self.vars())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, vars_of};

    #[test]
    fn spec_equalities() {
        let v = vars_of(&["x"]);
        let x = MultiPoly::var(v.clone(), 0);
        let one = MultiPoly::one(v.clone());
        let a = RationalFunction::new(x.pow(2).sub(&one), x.sub(&one)).unwrap();
        let b = RationalFunction::from_poly(x.add(&one));
        assert!(rational_function_equal(&a, &b));
        assert_eq!(a.numer(), b.numer());
        let c = RationalFunction::new(x.pow(2), x.clone()).unwrap();
        assert!(rational_function_equal(&RationalFunction::from_poly(x.clone()), &c));
        assert!(!rational_function_equal(
            &RationalFunction::from_poly(x.clone()),
            &RationalFunction::from_poly(x.add(&one))
        ));
    }

    #[test]
    fn derivative_quotient_rule() {
        let v = vars_of(&["x"]);
        let x = RationalFunction::var(v.clone(), 0);
        let one = x.one_like();
        let f = x.div(&x.add(&one)).unwrap();
        let d = f.derivative(0);
        let expected = one.div(&x.add(&one).mul(&x.add(&one))).unwrap();
        assert_eq!(d, expected);
        assert_eq!(f.eval(&[int(1)]).unwrap(), Rational::new(1, 2));
        assert!(f.eval(&[int(-1)]).is_none());
    }
}
