use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use super::rational::{common_denominator, gcd_all};
use super::ring::Ring;
use super::{ExactError, Rational};

/// Exponent vector ordered graded-lexicographically: total degree first,
/// then lexicographically with the first variable most significant.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(arity: usize) -> Self {
        Monomial(vec![0; arity])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self / other` if `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Monomial)
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub type Vars = Arc<Vec<String>>;

pub fn vars_of<S: AsRef<str>>(names: &[S]) -> Vars {
    Arc::new(names.iter().map(|s| s.as_ref().to_string()).collect())
}

/// Sparse multivariate polynomial over ℚ in a named, ordered variable list.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    vars: Vars,
    terms: BTreeMap<Monomial, Rational>,
}

impl MultiPoly {
    pub fn zero(vars: Vars) -> Self {
        MultiPoly {
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: Vars, c: Rational) -> Self {
        let mut p = MultiPoly::zero(vars);
        let arity = p.arity();
        p.add_term(Monomial::one(arity), c);
        p
    }

    pub fn one(vars: Vars) -> Self {
        MultiPoly::constant(vars, Rational::one())
    }

    /// The `i`-th variable as a polynomial.
    pub fn var(vars: Vars, i: usize) -> Self {
        let mut e = vec![0; vars.len()];
        e[i] = 1;
        let mut p = MultiPoly::zero(vars);
        p.add_term(Monomial(e), Rational::one());
        p
    }

    pub fn var_named(vars: Vars, name: &str) -> Option<Self> {
        let i = vars.iter().position(|v| v == name)?;
        Some(MultiPoly::var(vars, i))
    }

    pub fn from_terms(vars: Vars, terms: impl IntoIterator<Item = (Vec<u32>, Rational)>) -> Self {
        let mut p = MultiPoly::zero(vars);
        for (e, c) in terms {
            assert_eq!(e.len(), p.arity(), "exponent arity mismatch");
            p.add_term(Monomial(e), c);
        }
        p
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn arity(&self) -> usize {
        self.vars.len()
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Rational> {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    /// Constant term value when the polynomial is constant.
    pub fn constant_value(&self) -> Option<Rational> {
        if self.is_constant() {
            Some(self.coefficient(&Monomial::one(self.arity())))
        } else {
            None
        }
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.0[var]).max().unwrap_or(0)
    }

    /// Variables that actually occur.
    pub fn support(&self) -> Vec<usize> {
        (0..self.arity())
            .filter(|&i| self.terms.keys().any(|m| m.0[i] > 0))
            .collect()
    }

    /// Largest term in graded-lex order.
    pub fn leading_term(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    fn check_vars(&self, other: &MultiPoly) {
        assert!(
            Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars,
            "polynomials over different variable lists: {:?} vs {:?}",
            self.vars,
            other.vars
        );
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        self.check_vars(other);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        self.check_vars(other);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn neg(&self) -> MultiPoly {
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        self.check_vars(other);
        let mut out = MultiPoly::zero(self.vars.clone());
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(self.vars.clone());
        }
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> MultiPoly {
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(k, v)| (k.mul(m), v.clone())).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> MultiPoly {
        Ring::pow_u(self, e)
    }

    /// Formal partial derivative with respect to variable `var`.
    pub fn derivative(&self, var: usize) -> MultiPoly {
        let mut out = MultiPoly::zero(self.vars.clone());
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e > 0 {
                let mut m2 = m.clone();
                m2.0[var] -= 1;
                out.add_term(m2, c * &Rational::from(e as i64));
            }
        }
        out
    }

    /// Evaluates at `values` (one per variable) in any ring that admits
    /// the rational coefficients. `None` if a coefficient does not embed.
    pub fn eval<R: Ring>(&self, values: &[R]) -> Option<R> {
        assert_eq!(values.len(), self.arity(), "evaluation arity mismatch");
        let proto = values.first()?;
        let mut acc = proto.zero_like();
        // Cache powers per variable to avoid recomputation on dense inputs.
        let mut powers: Vec<Vec<R>> = values.iter().map(|v| vec![v.one_like(), v.clone()]).collect();
        for (m, c) in &self.terms {
            let mut t = proto.embed_rational(c)?;
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let pw = &mut powers[i];
                while pw.len() <= e as usize {
                    let next = pw.last().unwrap().times(&values[i]);
                    pw.push(next);
                }
                t = t.times(&pw[e as usize]);
            }
            acc = acc.plus(&t);
        }
        Some(acc)
    }

    /// Evaluation for a polynomial without variables-in-use check; returns
    /// the constant for arity zero.
    pub fn eval_rational(&self, values: &[Rational]) -> Rational {
        if self.arity() == 0 {
            return self.constant_value().unwrap_or_default();
        }
        self.eval(values).expect("rationals embed in ℚ")
    }

    /// Re-expresses the polynomial over a larger variable list containing
    /// every variable of `self`.
    pub fn embed(&self, target: &Vars) -> Result<MultiPoly, ExactError> {
        if &self.vars == target {
            return Ok(self.clone());
        }
        let map: Vec<usize> = self
            .vars
            .iter()
            .map(|v| {
                target
                    .iter()
                    .position(|t| t == v)
                    .ok_or_else(|| ExactError::UnknownVariable(v.clone()))
            })
            .collect::<Result<_, _>>()?;
        let mut out = MultiPoly::zero(target.clone());
        for (m, c) in &self.terms {
            let mut e = vec![0; target.len()];
            for (i, &k) in m.0.iter().enumerate() {
                e[map[i]] += k;
            }
            out.add_term(Monomial(e), c.clone());
        }
        Ok(out)
    }

    /// Substitutes every variable by a polynomial over a common target list.
    pub fn compose(&self, images: &[MultiPoly]) -> MultiPoly {
        assert_eq!(images.len(), self.arity());
        match images.first() {
            Some(p) => self.eval(images).unwrap_or_else(|| MultiPoly::zero(p.vars.clone())),
            None => self.clone(),
        }
    }

    /// Groups terms by their exponents in the variables `split`; each
    /// coefficient is a polynomial in the remaining variables (same list).
    pub fn split_by(&self, split: &[usize]) -> BTreeMap<Monomial, MultiPoly> {
        let mut out: BTreeMap<Monomial, MultiPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let key = Monomial(split.iter().map(|&i| m.0[i]).collect());
            let mut rest = m.clone();
            for &i in split {
                rest.0[i] = 0;
            }
            out.entry(key)
                .or_insert_with(|| MultiPoly::zero(self.vars.clone()))
                .add_term(rest, c.clone());
        }
        out
    }

    /// Rational content: positive `c` with `self / c` having coprime
    /// integer coefficients.
    pub fn content(&self) -> Rational {
        if self.is_zero() {
            return Rational::one();
        }
        let den = common_denominator(self.terms.values());
        let nums: Vec<BigInt> = self
            .terms
            .values()
            .map(|c| (c * &Rational::from_integer(den.clone())).to_integer().unwrap())
            .collect();
        let g = gcd_all(nums.iter()).abs();
        Rational::new(g, den)
    }

    /// Largest monomial dividing every term.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return Monomial::one(self.arity());
        };
        let mut g = first.0.clone();
        for m in it {
            for (a, b) in g.iter_mut().zip(&m.0) {
                *a = (*a).min(*b);
            }
        }
        Monomial(g)
    }

    pub fn div_monomial(&self, m: &Monomial) -> Option<MultiPoly> {
        let mut out = MultiPoly::zero(self.vars.clone());
        for (k, c) in &self.terms {
            out.add_term(k.div(m)?, c.clone());
        }
        Some(out)
    }

    /// Exact division; `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &MultiPoly) -> Option<MultiPoly> {
        self.check_vars(d);
        let (dm, dc) = d.leading_term()?;
        let (dm, dc) = (dm.clone(), dc.clone());
        let mut rem = self.clone();
        let mut quot = MultiPoly::zero(self.vars.clone());
        while let Some((rm, rc)) = rem.leading_term() {
            let qm = rm.div(&dm)?;
            let qc = rc / &dc;
            let mut t = MultiPoly::zero(self.vars.clone());
            t.add_term(qm, qc);
            rem = rem.sub(&t.mul(d));
            quot = quot.add(&t);
        }
        Some(quot)
    }

    /// Index of the single variable this polynomial lives in, if any.
    fn univariate_index(&self, other: &MultiPoly) -> Option<Option<usize>> {
        let mut s = self.support();
        s.extend(other.support());
        s.sort_unstable();
        s.dedup();
        match s.len() {
            0 => Some(None),
            1 => Some(Some(s[0])),
            _ => None,
        }
    }

    /// Univariate division with remainder in variable `var`. Both
    /// polynomials must only involve `var`.
    pub fn div_rem_univariate(&self, d: &MultiPoly, var: usize) -> (MultiPoly, MultiPoly) {
        let dd = d.degree_in(var);
        let lc = d.coefficient(&unit_power(self.arity(), var, dd));
        assert!(!lc.is_zero(), "division by zero polynomial");
        let mut rem = self.clone();
        let mut quot = MultiPoly::zero(self.vars.clone());
        loop {
            if rem.is_zero() {
                break;
            }
            let rd = rem.degree_in(var);
            if rd < dd {
                break;
            }
            let rc = rem.coefficient(&unit_power(self.arity(), var, rd));
            let mut t = MultiPoly::zero(self.vars.clone());
            t.add_term(unit_power(self.arity(), var, rd - dd), rc / &lc);
            rem = rem.sub(&t.mul(d));
            quot = quot.add(&t);
        }
        (quot, rem)
    }

    /// Monic gcd when both polynomials involve at most one common
    /// variable; `None` for genuinely multivariate input.
    pub fn gcd_univariate(&self, other: &MultiPoly) -> Option<MultiPoly> {
        let var = self.univariate_index(other)?;
        let one = MultiPoly::one(self.vars.clone());
        let Some(var) = var else {
            // Both constant.
            return Some(if self.is_zero() && other.is_zero() {
                MultiPoly::zero(self.vars.clone())
            } else {
                one
            });
        };
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem_univariate(&b, var);
            a = b;
            b = r;
        }
        if a.is_zero() {
            return Some(a);
        }
        let lc = a.leading_term().unwrap().1.clone();
        Some(a.scale(&lc.inv().unwrap()))
    }

    /// Sorted `[exponents..., "p/q"]` records (ascending graded-lex).
    pub fn to_records(&self) -> Vec<PolyRecord> {
        self.terms
            .iter()
            .map(|(m, c)| PolyRecord {
                exponents: m.0.clone(),
                coeff: c.clone(),
            })
            .collect()
    }

    pub fn from_records(vars: Vars, records: &[PolyRecord]) -> Result<Self, ExactError> {
        let mut p = MultiPoly::zero(vars);
        for r in records {
            if r.exponents.len() != p.arity() {
                return Err(ExactError::Parse(format!(
                    "record has {} exponents, expected {}",
                    r.exponents.len(),
                    p.arity()
                )));
            }
            p.add_term(Monomial(r.exponents.clone()), r.coeff.clone());
        }
        Ok(p)
    }
}

fn unit_power(arity: usize, var: usize, e: u32) -> Monomial {
    let mut m = vec![0; arity];
    m[var] = e;
    Monomial(m)
}

impl Ring for MultiPoly {
    fn zero_like(&self) -> Self {
        MultiPoly::zero(self.vars.clone())
    }
    fn one_like(&self) -> Self {
        MultiPoly::one(self.vars.clone())
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
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
        Some(MultiPoly::constant(self.vars.clone(), r.clone()))
    }
}

/// One serialized term: exponents followed by the coefficient string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyRecord {
    pub exponents: Vec<u32>,
    pub coeff: Rational,
}

impl Serialize for PolyRecord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.exponents.len() + 1))?;
        for e in &self.exponents {
            seq.serialize_element(e)?;
        }
        seq.serialize_element(&self.coeff.to_string())?;
        seq.end()
    }
}

impl<'de> Deserialize<'de> for PolyRecord {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw: Vec<serde_json::Value> = Vec::deserialize(d)?;
        let Some((last, rest)) = raw.split_last() else {
            return Err(serde::de::Error::custom("empty polynomial record"));
        };
        let coeff = match last {
            serde_json::Value::String(s) => s.parse().map_err(serde::de::Error::custom)?,
            serde_json::Value::Number(n) => n
                .to_string()
                .parse()
                .map_err(serde::de::Error::custom)?,
            _ => return Err(serde::de::Error::custom("coefficient must be a string")),
        };
        let exponents = rest
            .iter()
            .map(|v| {
                v.as_u64()
                    .and_then(|e| u32::try_from(e).ok())
                    .ok_or_else(|| serde::de::Error::custom("exponent must be a small integer"))
            })
            .collect::<Result<_, _>>()?;
        Ok(PolyRecord { exponents, coeff })
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let mut factors = Vec::new();
            if !abs.is_one() || m.is_one() {
                factors.push(abs.to_string());
            }
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.vars[i].clone()),
                    _ => factors.push(format!("{}^{}", self.vars[i], e)),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in {:?}", self, self.vars)
    }
}

/// Convenience used by tests and examples: integer coefficient.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xy() -> Vars {
        vars_of(&["x", "y"])
    }

    #[test]
    fn grlex_order() {
        let a = Monomial(vec![2, 0]);
        let b = Monomial(vec![0, 3]);
        let c = Monomial(vec![1, 1]);
        assert!(b > a);
        assert!(a > c);
    }

    #[test]
    fn arithmetic_and_display() {
        let v = xy();
        let x = MultiPoly::var(v.clone(), 0);
        let y = MultiPoly::var(v.clone(), 1);
        let p = x.add(&y).pow(2);
        assert_eq!(p.to_string(), "x^2 + 2*x*y + y^2");
        let d = p.derivative(0);
        assert_eq!(d.to_string(), "2*x + 2*y");
        assert!(p.sub(&p).is_zero());
    }

    #[test]
    fn exact_division() {
        let v = xy();
        let x = MultiPoly::var(v.clone(), 0);
        let y = MultiPoly::var(v.clone(), 1);
        let one = MultiPoly::one(v.clone());
        let a = x.add(&y);
        let b = x.sub(&one).mul(&y.add(&one));
        let p = a.mul(&b);
        assert_eq!(p.div_exact(&a).unwrap(), b);
        assert!(p.add(&one).div_exact(&a).is_none());
    }

    #[test]
    fn univariate_gcd() {
        let v = vars_of(&["x"]);
        let x = MultiPoly::var(v.clone(), 0);
        let one = MultiPoly::one(v.clone());
        let p = x.pow(2).sub(&one);
        let q = x.sub(&one).mul(&x.add(&one).pow(2));
        let g = p.gcd_univariate(&q).unwrap();
        assert_eq!(g, x.add(&one).mul(&x.sub(&one)));
    }

    #[test]
    fn records_roundtrip() {
        let v = xy();
        let p = MultiPoly::from_terms(v.clone(), vec![(vec![1, 0], int(3)), (vec![0, 2], Rational::new(-1, 2))]);
        let json = serde_json::to_string(&p.to_records()).unwrap();
        assert_eq!(json, r#"[[1,0,"3"],[0,2,"-1/2"]]"#);
        let recs: Vec<PolyRecord> = serde_json::from_str(&json).unwrap();
        assert_eq!(MultiPoly::from_records(v, &recs).unwrap(), p);
    }

    #[test]
    fn content_and_embed() {
        let v = xy();
        let p = MultiPoly::from_terms(v.clone(), vec![(vec![1, 0], Rational::new(2, 3)), (vec![0, 1], Rational::new(4, 9))]);
        assert_eq!(p.content(), Rational::new(2, 9));
        let big = vars_of(&["y", "z", "x"]);
        let e = p.embed(&big).unwrap();
        assert_eq!(e.to_string(), "4/9*y + 2/3*x");
    }
}
