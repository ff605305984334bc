//! Floating-point scalars for the numeric pipelines: plain `f64` and a
//! double-double type carrying roughly 32 significant digits.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::{Num, One, ToPrimitive, Zero};

use crate::exactnum::{Field, Rational, Ring};

/// Real scalar usable by the evaluator and the reduction algorithm.
pub trait Real:
    Copy + PartialOrd + fmt::Debug + fmt::Display + Send + Sync + Num + Neg<Output = Self> + 'static
{
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn from_bigint(n: &BigInt) -> Self;
    fn pi() -> Self;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    /// `(sin θ, cos θ)`.
    fn sin_cos(self) -> (Self, Self);
    fn abs(self) -> Self;
    /// Nearest integer, ties away from zero.
    fn round(self) -> Self;
    /// Unit roundoff.
    fn eps() -> f64;
    /// Tie-breaking tolerance for boundary decisions.
    fn boundary_eps() -> Self;

    fn from_i128(n: i128) -> Self {
        Self::from_bigint(&BigInt::from(n))
    }

    fn from_rational(r: &Rational) -> Self {
        Self::from_bigint(r.numer()) / Self::from_bigint(r.denom())
    }

    fn two_pi() -> Self {
        Self::pi() + Self::pi()
    }
}

impl Real for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn from_bigint(n: &BigInt) -> Self {
        n.to_f64().unwrap_or(f64::NAN)
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn sin_cos(self) -> (Self, Self) {
        f64::sin_cos(self)
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn round(self) -> Self {
        f64::round(self)
    }
    fn eps() -> f64 {
        f64::EPSILON / 2.0
    }
    fn boundary_eps() -> Self {
        1e-12
    }
}

/// Unevaluated sum `hi + lo` with `|lo| ≤ ulp(hi)/2`.
#[derive(Clone, Copy, Default)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

pub type DD = DoubleDouble;

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub const fn new(hi: f64, lo: f64) -> Self {
        DoubleDouble { hi, lo }
    }

    pub fn from_parts(hi: f64, lo: f64) -> Self {
        let (h, l) = quick_two_sum(hi, lo);
        DoubleDouble { hi: h, lo: l }
    }

    fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let e = e + self.lo * b;
        Self::from_parts(p, e)
    }

    fn ldexp(self, k: i32) -> Self {
        let f = 2f64.powi(k);
        DoubleDouble::new(self.hi * f, self.lo * f)
    }

    fn floor(self) -> Self {
        let h = self.hi.floor();
        if h == self.hi {
            Self::from_parts(h, self.lo.floor())
        } else {
            DoubleDouble::new(h, 0.0)
        }
    }

    const LN2: DoubleDouble = DoubleDouble::new(std::f64::consts::LN_2, 2.3190468138462996e-17);
    const PI: DoubleDouble = DoubleDouble::new(std::f64::consts::PI, 1.2246467991473532e-16);
}

impl PartialEq for DoubleDouble {
    fn eq(&self, other: &Self) -> bool {
        self.hi == other.hi && self.lo == other.lo
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi)? {
            Ordering::Equal => self.lo.partial_cmp(&other.lo),
            o => Some(o),
        }
    }
}

impl fmt::Debug for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DD({:e} + {:e})", self.hi, self.lo)
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.hi + self.lo)
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, b: Self) -> Self {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (s1, s2) = quick_two_sum(s1, s2 + t2);
        DoubleDouble::new(s1, s2)
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        DoubleDouble::new(-self.hi, -self.lo)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        Self::from_parts(p, e)
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (q1, q2) = quick_two_sum(q1, q2);
        DoubleDouble::new(q1, q2) + DoubleDouble::new(q3, 0.0)
    }
}

impl Rem for DoubleDouble {
    type Output = Self;
    fn rem(self, b: Self) -> Self {
        let q = self / b;
        let t = if q.hi >= 0.0 { q.floor() } else { -((-q).floor()) };
        self - t * b
    }
}

impl Zero for DoubleDouble {
    fn zero() -> Self {
        DoubleDouble::new(0.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.hi == 0.0 && self.lo == 0.0
    }
}

impl One for DoubleDouble {
    fn one() -> Self {
        DoubleDouble::new(1.0, 0.0)
    }
}

impl Num for DoubleDouble {
    type FromStrRadixErr = std::num::ParseFloatError;
    fn from_str_radix(s: &str, _radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        s.parse::<f64>().map(|x| DoubleDouble::new(x, 0.0))
    }
}

impl Real for DoubleDouble {
    fn from_f64(x: f64) -> Self {
        DoubleDouble::new(x, 0.0)
    }
    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
    fn from_bigint(n: &BigInt) -> Self {
        let hi = n.to_f64().unwrap_or(f64::NAN);
        if !hi.is_finite() {
            return DoubleDouble::new(hi, 0.0);
        }
        let lo = (n - exact_bigint_of_f64(hi)).to_f64().unwrap_or(0.0);
        Self::from_parts(hi, lo)
    }
    fn pi() -> Self {
        Self::PI
    }
    fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return Self::zero();
        }
        let s = self.hi.sqrt();
        let sd = DoubleDouble::new(s, 0.0);
        let r = self - sd * sd;
        sd + DoubleDouble::new(r.hi / (2.0 * s), 0.0)
    }
    fn exp(self) -> Self {
        if self.hi > 709.0 {
            return DoubleDouble::new(f64::INFINITY, 0.0);
        }
        if self.hi < -745.0 {
            return Self::zero();
        }
        let k = (self.hi / Self::LN2.hi).round();
        let r = self - Self::LN2.mul_f64(k);
        const SQ: i32 = 10;
        let r = r.ldexp(-SQ);
        // Taylor series for exp(r) - 1 with |r| < 2^-10 · ln2/2.
        let mut term = r;
        let mut sum = r;
        for n in 2..=14 {
            term = term * r / DoubleDouble::from_f64(n as f64);
            sum = sum + term;
            if term.hi.abs() < 1e-36 {
                break;
            }
        }
        // (1 + s)^2 - 1 = 2s + s^2 keeps precision while squaring.
        for _ in 0..SQ {
            sum = sum.ldexp(1) + sum * sum;
        }
        (sum + Self::one()).ldexp(k as i32)
    }
    fn sin_cos(self) -> (Self, Self) {
        let half_pi = Self::PI.ldexp(-1);
        let quadrant = (self / half_pi).round();
        let x = self - quadrant * half_pi;
        const HALVINGS: i32 = 3;
        let x = x.ldexp(-HALVINGS);
        let x2 = x * x;
        let mut s = x;
        let mut c = Self::one();
        let mut ts = x;
        let mut tc = Self::one();
        for k in 1..=12 {
            let kf = k as f64;
            ts = -(ts * x2) / DoubleDouble::from_f64((2.0 * kf) * (2.0 * kf + 1.0));
            tc = -(tc * x2) / DoubleDouble::from_f64((2.0 * kf - 1.0) * (2.0 * kf));
            s = s + ts;
            c = c + tc;
        }
        for _ in 0..HALVINGS {
            let s2 = (s * c).ldexp(1);
            let c2 = (c * c) - (s * s);
            s = s2;
            c = c2;
        }
        match (quadrant.hi as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }
    fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }
    fn round(self) -> Self {
        let h = self.hi.round();
        if h == self.hi {
            // hi is integral; the fractional part lives in lo.
            Self::from_parts(h, self.lo.round())
        } else if (h - self.hi).abs() == 0.5 {
            // hi is a half-integer; lo decides the direction.
            let down = self.hi.floor();
            let up = down + 1.0;
            if self.lo > 0.0 || (self.lo == 0.0 && self.hi > 0.0) {
                DoubleDouble::new(up, 0.0)
            } else {
                DoubleDouble::new(down, 0.0)
            }
        } else {
            DoubleDouble::new(h, 0.0)
        }
    }
    fn eps() -> f64 {
        1.2e-32
    }
    fn boundary_eps() -> Self {
        DoubleDouble::new(1e-28, 0.0)
    }
}

fn exact_bigint_of_f64(x: f64) -> BigInt {
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { -1 } else { 1 };
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let mant = if exp == 0 {
        (bits & ((1 << 52) - 1)) << 1
    } else {
        (bits & ((1 << 52) - 1)) | (1 << 52)
    };
    let e = exp - 1075;
    let m = BigInt::from(mant) * sign;
    if e >= 0 {
        m << (e as usize)
    } else {
        m >> ((-e) as usize)
    }
}

/// Complex number newtype implementing the exact-arithmetic ring traits,
/// so symbolic formulas can be evaluated numerically.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cx<R: Real>(pub Complex<R>);

impl<R: Real> Cx<R> {
    pub fn new(re: R, im: R) -> Self {
        Cx(Complex::new(re, im))
    }
}

impl<R: Real> Ring for Cx<R> {
    fn zero_like(&self) -> Self {
        Cx(Complex::new(R::zero(), R::zero()))
    }
    fn one_like(&self) -> Self {
        Cx(Complex::new(R::one(), R::zero()))
    }
    fn is_zero(&self) -> bool {
        self.0.re.is_zero() && self.0.im.is_zero()
    }
    fn plus(&self, rhs: &Self) -> Self {
        Cx(self.0 + rhs.0)
    }
    fn minus(&self, rhs: &Self) -> Self {
        Cx(self.0 - rhs.0)
    }
    fn times(&self, rhs: &Self) -> Self {
        Cx(self.0 * rhs.0)
    }
    fn negated(&self) -> Self {
        Cx(-self.0)
    }
    fn embed_rational(&self, r: &Rational) -> Option<Self> {
        Some(Cx(Complex::new(R::from_rational(r), R::zero())))
    }
}

impl<R: Real> Field for Cx<R> {
    fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Cx(Complex::new(R::one(), R::zero()) / self.0))
        }
    }
}

/// `|z|` computed without overflow-prone squaring in the `f64` view.
pub fn cabs<R: Real>(z: &Complex<R>) -> f64 {
    z.re.to_f64().hypot(z.im.to_f64())
}

/// `e^{iθ}`.
pub fn cis<R: Real>(theta: R) -> Complex<R> {
    let (s, c) = theta.sin_cos();
    Complex::new(c, s)
}

pub fn to_c64<R: Real>(z: &Complex<R>) -> Complex<f64> {
    Complex::new(z.re.to_f64(), z.im.to_f64())
}

pub fn from_c64<R: Real>(z: Complex<f64>) -> Complex<R> {
    Complex::new(R::from_f64(z.re), R::from_f64(z.im))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: DD, b: f64, tol: f64) -> bool {
        (a.to_f64() - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn dd_arithmetic() {
        let third = DD::one() / DD::from_f64(3.0);
        let back = third * DD::from_f64(3.0);
        assert!((back - DD::one()).abs().to_f64() < 1e-31);
        let two = DD::from_f64(2.0);
        let r = two.sqrt();
        assert!((r * r - two).abs().to_f64() < 1e-31);
    }

    #[test]
    fn dd_exp_and_trig() {
        let e = DD::one().exp();
        // e to 32 digits: 2.71828182845904523536028747135266
        let e_ref = DD::from_parts(2.718281828459045, 1.4456468917292502e-16);
        assert!((e - e_ref).abs().to_f64() < 1e-30);
        let x = DD::from_f64(-20.5);
        let y = x.exp() * (-x).exp();
        assert!((y - DD::one()).abs().to_f64() < 1e-30);
        let (s, c) = DD::from_f64(0.7).sin_cos();
        assert!((s * s + c * c - DD::one()).abs().to_f64() < 1e-30);
        assert!(close(s, 0.7f64.sin(), 1e-15));
        let (s, c) = DD::pi().sin_cos();
        assert!(s.abs().to_f64() < 1e-30);
        assert!((c + DD::one()).abs().to_f64() < 1e-30);
        let (s, _) = (DD::pi() / DD::from_f64(6.0)).sin_cos();
        assert!((s - DD::from_f64(0.5)).abs().to_f64() < 1e-30);
    }

    #[test]
    fn dd_bigint_and_round() {
        let n: BigInt = "123456789012345678901234567890123".parse().unwrap();
        let d = DD::from_bigint(&n);
        let lo_exact = n - exact_bigint_of_f64(d.hi);
        assert!((lo_exact.to_f64().unwrap() - d.lo).abs() <= d.lo.abs() * 1e-15);
        assert!((d.to_f64() / 1.2345678901234568e32 - 1.0).abs() < 1e-15);
        assert_eq!(DD::from_parts(2.0, -1e-20).round().to_f64(), 2.0);
        assert_eq!(DD::from_f64(2.5).round().to_f64(), 3.0);
        assert_eq!(DD::from_parts(2.5, -1e-20).round().to_f64(), 2.0);
        assert_eq!(DD::from_f64(-2.5).round().to_f64(), -3.0);
    }
}
