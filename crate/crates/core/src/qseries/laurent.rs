use std::fmt;

use serde::{Deserialize, Serialize};

use crate::exactnum::{Field, Rational, Ring};

/// Truncated Laurent series `Σ_{n=v}^{M} c_n qⁿ + O(q^{M+1})`.
///
/// Coefficients are stored densely from the valuation through the absolute
/// precision `M`. The leading stored coefficient is nonzero unless the
/// series is zero to precision, in which case nothing is stored and the
/// valuation is reported as `M + 1`.
#[derive(Clone, PartialEq)]
pub struct LaurentSeries<C> {
    val: i64,
    prec: i64,
    coeffs: Vec<C>,
    zero: C,
}

impl<C: Ring> LaurentSeries<C> {
    /// Builds a series from coefficients of `q^val, q^{val+1}, …`, truncated
    /// at `prec`.
    pub fn new(val: i64, mut coeffs: Vec<C>, prec: i64, zero: C) -> Self {
        let keep = (prec - val + 1).max(0) as usize;
        coeffs.truncate(keep);
        coeffs.resize(keep, zero.clone());
        let lead = coeffs.iter().position(|c| !c.is_zero());
        match lead {
            None => Self::zero_series(prec, zero),
            Some(k) => {
                coeffs.drain(..k);
                LaurentSeries {
                    val: val + k as i64,
                    prec,
                    coeffs,
                    zero,
                }
            }
        }
    }

    pub fn zero_series(prec: i64, zero: C) -> Self {
        LaurentSeries {
            val: prec + 1,
            prec,
            coeffs: Vec::new(),
            zero,
        }
    }

    /// `c·q^e + O(q^{prec+1})`.
    pub fn monomial(c: C, e: i64, prec: i64) -> Self {
        let zero = c.zero_like();
        Self::new(e, vec![c], prec, zero)
    }

    pub fn constant(c: C, prec: i64) -> Self {
        Self::monomial(c, 0, prec)
    }

    pub fn valuation(&self) -> i64 {
        self.val
    }

    pub fn precision(&self) -> i64 {
        self.prec
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn zero_elem(&self) -> &C {
        &self.zero
    }

    /// Stored coefficients from the valuation upwards.
    pub fn coefficients(&self) -> &[C] {
        &self.coeffs
    }

    /// Coefficient of `qⁿ`; `None` beyond the precision.
    pub fn get(&self, n: i64) -> Option<C> {
        if n > self.prec {
            None
        } else if n < self.val {
            Some(self.zero.clone())
        } else {
            Some(self.coeffs[(n - self.val) as usize].clone())
        }
    }

    /// Coefficient of `qⁿ`. Panics beyond the precision.
    pub fn coeff(&self, n: i64) -> C {
        self.get(n)
            .unwrap_or_else(|| panic!("coefficient q^{n} beyond precision {}", self.prec))
    }

    pub fn leading_coefficient(&self) -> Option<&C> {
        self.coeffs.first()
    }

    /// First exponent with a nonzero coefficient.
    pub fn first_nonzero(&self) -> Option<(i64, &C)> {
        self.coeffs.first().map(|c| (self.val, c))
    }

    pub fn truncate(&self, prec: i64) -> Self {
        let prec = prec.min(self.prec);
        Self::new(self.val, self.coeffs.clone(), prec, self.zero.clone())
    }

    pub fn add(&self, o: &Self) -> Self {
        self.combine(o, |a, b| a.plus(b))
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.combine(o, |a, b| a.minus(b))
    }

    fn combine(&self, o: &Self, f: impl Fn(&C, &C) -> C) -> Self {
        let prec = self.prec.min(o.prec);
        let val = self.val.min(o.val);
        if val > prec {
            return Self::zero_series(prec, self.zero.clone());
        }
        let coeffs = (val..=prec)
            .map(|n| f(&self.at(n), &o.at(n)))
            .collect();
        Self::new(val, coeffs, prec, self.zero.clone())
    }

    fn at(&self, n: i64) -> C {
        if n < self.val || n > self.prec {
            self.zero.clone()
        } else {
            self.coeffs[(n - self.val) as usize].clone()
        }
    }

    pub fn neg(&self) -> Self {
        LaurentSeries {
            val: self.val,
            prec: self.prec,
            coeffs: self.coeffs.iter().map(Ring::negated).collect(),
            zero: self.zero.clone(),
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        let coeffs = self.coeffs.iter().map(|x| x.times(c)).collect();
        Self::new(self.val, coeffs, self.prec, self.zero.clone())
    }

    pub fn add_constant(&self, c: &C) -> Self {
        self.add(&Self::constant(c.clone(), self.prec))
    }

    /// Multiplication by `q^k`.
    pub fn shift(&self, k: i64) -> Self {
        LaurentSeries {
            val: self.val + k,
            prec: self.prec + k,
            coeffs: self.coeffs.clone(),
            zero: self.zero.clone(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let prec = (self.prec + o.val).min(o.prec + self.val);
        let val = self.val + o.val;
        if self.is_zero() || o.is_zero() || val > prec {
            return Self::zero_series(prec, self.zero.clone());
        }
        let len = (prec - val + 1) as usize;
        let mut out = vec![self.zero.clone(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() || i >= len {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate().take(len - i) {
                if !b.is_zero() {
                    out[i + j].add_product(a, b);
                }
            }
        }
        Self::new(val, out, prec, self.zero.clone())
    }

    pub fn pow(&self, mut e: u32) -> Self {
        if e == 0 {
            return Self::constant(self.zero.one_like(), self.prec - self.val);
        }
        let mut acc: Option<Self> = None;
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base),
                });
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc.expect("e > 0")
    }

    /// `θ = q·d/dq`.
    pub fn theta(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c.times(&c.from_i64_like(self.val + k as i64)))
            .collect();
        Self::new(self.val, coeffs, self.prec, self.zero.clone())
    }

    /// `f(q) ↦ f(q^k)` for `k ≥ 1`.
    pub fn substitute_power(&self, k: u32) -> Self {
        let k = k as i64;
        let prec = k * (self.prec + 1) - 1;
        if self.is_zero() {
            return Self::zero_series(prec, self.zero.clone());
        }
        let mut coeffs = vec![self.zero.clone(); ((self.coeffs.len() - 1) as i64 * k + 1) as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * k as usize] = c.clone();
        }
        Self::new(self.val * k, coeffs, prec, self.zero.clone())
    }

    pub fn map<D: Ring>(&self, zero: D, f: impl Fn(&C) -> D) -> LaurentSeries<D> {
        LaurentSeries::new(self.val, self.coeffs.iter().map(f).collect(), self.prec, zero)
    }
}

impl<C: Field> LaurentSeries<C> {
    /// Multiplicative inverse; `None` for a series that is zero to precision.
    pub fn inverse(&self) -> Option<Self> {
        let lead = self.coeffs.first()?;
        let inv0 = lead.inverse()?;
        let len = self.coeffs.len();
        let mut out: Vec<C> = Vec::with_capacity(len);
        out.push(inv0.clone());
        for n in 1..len {
            let mut acc = self.zero.clone();
            for k in 1..=n {
                acc.add_product(&self.coeffs[k], &out[n - k]);
            }
            out.push(acc.times(&inv0).negated());
        }
        let prec = self.prec - 2 * self.val;
        Some(Self::new(-self.val, out, prec, self.zero.clone()))
    }

    pub fn div(&self, o: &Self) -> Option<Self> {
        Some(self.mul(&o.inverse()?))
    }
}

impl LaurentSeries<Rational> {
    pub fn rational_zero(prec: i64) -> Self {
        Self::zero_series(prec, Rational::zero())
    }

    pub fn from_rationals(val: i64, coeffs: Vec<Rational>, prec: i64) -> Self {
        Self::new(val, coeffs, prec, Rational::zero())
    }

    pub fn to_record(&self) -> SeriesRecord {
        SeriesRecord {
            valuation: self.val,
            precision: self.prec,
            coeffs: self.coeffs.clone(),
        }
    }

    pub fn from_record(r: &SeriesRecord) -> Self {
        Self::from_rationals(r.valuation, r.coeffs.clone(), r.precision)
    }
}

/// Serialized form `{valuation, precision, coeffs: ["p/q", ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesRecord {
    pub valuation: i64,
    pub precision: i64,
    pub coeffs: Vec<Rational>,
}

impl<C: Ring + fmt::Display> fmt::Display for LaurentSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match self.val + k as i64 {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})*q")?,
                e => write!(f, "({c})*q^{e}")?,
            }
        }
        if !first {
            write!(f, " + ")?;
        }
        write!(f, "O(q^{})", self.prec + 1)
    }
}

impl<C: Ring + fmt::Display> fmt::Debug for LaurentSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
