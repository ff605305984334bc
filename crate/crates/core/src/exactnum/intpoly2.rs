use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::{Field, Rational, Ring};

/// Bivariate polynomial in `X, Y` with big-integer coefficients, keyed by
/// `(deg_X, deg_Y)`.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct IntPoly2 {
    coeffs: BTreeMap<(u32, u32), BigInt>,
}

impl IntPoly2 {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_terms(terms: impl IntoIterator<Item = ((u32, u32), BigInt)>) -> Self {
        let mut p = Self::new();
        for (k, c) in terms {
            p.add_term(k, c);
        }
        p
    }

    pub fn add_term(&mut self, key: (u32, u32), c: BigInt) {
        if c.is_zero() {
            return;
        }
        let e = self.coeffs.entry(key).or_insert_with(BigInt::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&key);
        }
    }

    pub fn coeff(&self, i: u32, j: u32) -> BigInt {
        self.coeffs.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &BigInt)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn degree_x(&self) -> u32 {
        self.coeffs.keys().map(|k| k.0).max().unwrap_or(0)
    }

    pub fn degree_y(&self) -> u32 {
        self.coeffs.keys().map(|k| k.1).max().unwrap_or(0)
    }

    pub fn transpose(&self) -> Self {
        IntPoly2 {
            coeffs: self.coeffs.iter().map(|(&(i, j), c)| ((j, i), c.clone())).collect(),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        *self == self.transpose()
    }

    pub fn neg(&self) -> Self {
        IntPoly2 {
            coeffs: self.coeffs.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }

    pub fn is_antisymmetric(&self) -> bool {
        self.transpose() == self.neg()
    }

    pub fn d_dx(&self) -> Self {
        Self::from_terms(
            self.coeffs
                .iter()
                .filter(|(k, _)| k.0 > 0)
                .map(|(&(i, j), c)| ((i - 1, j), c * BigInt::from(i))),
        )
    }

    pub fn d_dy(&self) -> Self {
        Self::from_terms(
            self.coeffs
                .iter()
                .filter(|(k, _)| k.1 > 0)
                .map(|(&(i, j), c)| ((i, j - 1), c * BigInt::from(j))),
        )
    }

    /// Evaluation in any ring via Horner in `Y` then `X`.
    pub fn eval<R: Ring>(&self, x: &R, y: &R) -> R {
        let mut rows: BTreeMap<u32, Vec<(u32, &BigInt)>> = BTreeMap::new();
        for (&(i, j), c) in &self.coeffs {
            rows.entry(i).or_default().push((j, c));
        }
        let zero = x.zero_like();
        let dx = self.degree_x();
        let mut acc = zero.clone();
        for i in (0..=dx).rev() {
            acc = acc.times(x);
            if let Some(row) = rows.get(&i) {
                let dy = row.iter().map(|r| r.0).max().unwrap();
                let mut inner = zero.clone();
                let mut it = row.iter().rev().peekable();
                for j in (0..=dy).rev() {
                    inner = inner.times(y);
                    if let Some(&&(jj, c)) = it.peek() {
                        if jj == j {
                            let cr = x
                                .embed_rational(&Rational::from_integer(c.clone()))
                                .expect("integers embed");
                            inner = inner.plus(&cr);
                            it.next();
                        }
                    }
                }
                acc = acc.plus(&inner);
            }
        }
        acc
    }

    /// Evaluation over a field given as rationals.
    pub fn eval_rational(&self, x: &Rational, y: &Rational) -> Rational {
        self.eval(x, y)
    }

    /// Sum of absolute values of the monomials at `(x, y)`; used as a scale
    /// for relative residuals.
    pub fn abs_eval(&self, ax: f64, ay: f64) -> f64 {
        self.coeffs
            .iter()
            .map(|(&(i, j), c)| {
                num_traits::ToPrimitive::to_f64(&c.abs()).unwrap_or(f64::INFINITY)
                    * ax.powi(i as i32)
                    * ay.powi(j as i32)
            })
            .sum()
    }

    /// `true` if the polynomial vanishes exactly at `(x, y)`.
    pub fn vanishes_at<F: Field>(&self, x: &F, y: &F) -> bool {
        self.eval(x, y).is_zero()
    }

    /// Records `[i, j, "c"]` sorted by `(i, j)`.
    pub fn to_records(&self) -> Vec<(u32, u32, String)> {
        self.coeffs
            .iter()
            .map(|(&(i, j), c)| (i, j, c.to_string()))
            .collect()
    }
}

impl fmt::Display for IntPoly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut keys: Vec<_> = self.coeffs.keys().copied().collect();
        keys.sort_by(|a, b| (b.0 + b.1, b.0).cmp(&(a.0 + a.1, a.0)));
        for (n, k) in keys.iter().enumerate() {
            let c = &self.coeffs[k];
            let neg = c.is_negative();
            let a = c.abs();
            if n == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let mut parts = Vec::new();
            if a != BigInt::from(1) || (k.0 == 0 && k.1 == 0) {
                parts.push(a.to_string());
            }
            for (name, e) in [("X", k.0), ("Y", k.1)] {
                match e {
                    0 => {}
                    1 => parts.push(name.to_string()),
                    _ => parts.push(format!("{name}^{e}")),
                }
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for IntPoly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
