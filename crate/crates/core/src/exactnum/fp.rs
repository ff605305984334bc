use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::Rng;

use super::{Field, Rational, Ring};

/// The Mersenne prime `2^61 - 1`.
pub const FP_MODULUS: u64 = (1u64 << 61) - 1;

/// Element of the prime field `F_p` with `p = 2^61 - 1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Fp(u64);

impl Fp {
    pub const ZERO: Fp = Fp(0);
    pub const ONE: Fp = Fp(1);

    pub fn new(v: u64) -> Self {
        Fp(v % FP_MODULUS)
    }

    pub fn from_i64(v: i64) -> Self {
        Fp(v.rem_euclid(FP_MODULUS as i64) as u64)
    }

    pub fn from_bigint(v: &BigInt) -> Self {
        let m = BigInt::from(FP_MODULUS);
        Fp(v.mod_floor(&m).to_u64().unwrap())
    }

    pub fn from_rational(r: &Rational) -> Option<Self> {
        let d = Fp::from_bigint(r.denom());
        Fp::from_bigint(r.numer()).div(d)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Fp(rng.gen_range(0..FP_MODULUS))
    }

    pub fn add(self, o: Fp) -> Fp {
        let s = self.0 + o.0;
        Fp(if s >= FP_MODULUS { s - FP_MODULUS } else { s })
    }

    pub fn sub(self, o: Fp) -> Fp {
        Fp(if self.0 >= o.0 {
            self.0 - o.0
        } else {
            self.0 + FP_MODULUS - o.0
        })
    }

    pub fn neg(self) -> Fp {
        Fp::ZERO.sub(self)
    }

    pub fn mul(self, o: Fp) -> Fp {
        let p = self.0 as u128 * o.0 as u128;
        let lo = (p as u64) & FP_MODULUS;
        let hi = (p >> 61) as u64;
        let s = lo + hi;
        Fp(if s >= FP_MODULUS { s - FP_MODULUS } else { s })
    }

    pub fn pow(self, mut e: u64) -> Fp {
        let mut base = self;
        let mut acc = Fp::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(base);
            }
            base = base.mul(base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(self) -> Option<Fp> {
        (self.0 != 0).then(|| self.pow(FP_MODULUS - 2))
    }

    pub fn div(self, o: Fp) -> Option<Fp> {
        o.inv().map(|i| self.mul(i))
    }
}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Ring for Fp {
    fn zero_like(&self) -> Self {
        Fp::ZERO
    }
    fn one_like(&self) -> Self {
        Fp::ONE
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
    fn plus(&self, rhs: &Self) -> Self {
        self.add(*rhs)
    }
    fn minus(&self, rhs: &Self) -> Self {
        self.sub(*rhs)
    }
    fn times(&self, rhs: &Self) -> Self {
        self.mul(*rhs)
    }
    fn negated(&self) -> Self {
        self.neg()
    }
    fn embed_rational(&self, r: &Rational) -> Option<Self> {
        Fp::from_rational(r)
    }
}

impl Field for Fp {
    fn inverse(&self) -> Option<Self> {
        self.inv()
    }
}

/// Dense univariate polynomials over `F_p`, lowest degree first, used to
/// find roots when specializing nonlinear relations.
pub mod upoly {
    use super::*;

    pub fn trim(mut a: Vec<Fp>) -> Vec<Fp> {
        while a.last().is_some_and(|c| c.0 == 0) {
            a.pop();
        }
        a
    }

    pub fn sub(a: &[Fp], b: &[Fp]) -> Vec<Fp> {
        let n = a.len().max(b.len());
        trim(
            (0..n)
                .map(|i| {
                    let x = a.get(i).copied().unwrap_or_default();
                    let y = b.get(i).copied().unwrap_or_default();
                    x.sub(y)
                })
                .collect(),
        )
    }

    pub fn mul(a: &[Fp], b: &[Fp]) -> Vec<Fp> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![Fp::ZERO; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] = out[i + j].add(x.mul(*y));
            }
        }
        trim(out)
    }

    /// Remainder of `a` modulo nonzero `m`.
    pub fn rem(a: &[Fp], m: &[Fp]) -> Vec<Fp> {
        let mut r = trim(a.to_vec());
        let dm = m.len() - 1;
        let inv = m[dm].inv().expect("nonzero divisor");
        while r.len() > dm {
            let k = r.len() - 1 - dm;
            let c = r.last().unwrap().mul(inv);
            for (i, mi) in m.iter().enumerate() {
                r[k + i] = r[k + i].sub(c.mul(*mi));
            }
            r = trim(r);
        }
        r
    }

    pub fn div(a: &[Fp], m: &[Fp]) -> Vec<Fp> {
        let mut r = trim(a.to_vec());
        let dm = m.len() - 1;
        if r.len() <= dm {
            return Vec::new();
        }
        let inv = m[dm].inv().expect("nonzero divisor");
        let mut q = vec![Fp::ZERO; r.len() - dm];
        while r.len() > dm {
            let k = r.len() - 1 - dm;
            let c = r.last().unwrap().mul(inv);
            q[k] = c;
            for (i, mi) in m.iter().enumerate() {
                r[k + i] = r[k + i].sub(c.mul(*mi));
            }
            r = trim(r);
        }
        trim(q)
    }

    pub fn monic(a: &[Fp]) -> Vec<Fp> {
        let inv = a.last().unwrap().inv().unwrap();
        a.iter().map(|c| c.mul(inv)).collect()
    }

    pub fn gcd(a: &[Fp], b: &[Fp]) -> Vec<Fp> {
        let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
        while !b.is_empty() {
            let r = rem(&a, &b);
            a = b;
            b = r;
        }
        if a.is_empty() {
            a
        } else {
            monic(&a)
        }
    }

    /// `base^e mod m`.
    pub fn powmod(base: &[Fp], mut e: u64, m: &[Fp]) -> Vec<Fp> {
        let mut b = rem(base, m);
        let mut acc = vec![Fp::ONE];
        while e > 0 {
            if e & 1 == 1 {
                acc = rem(&mul(&acc, &b), m);
            }
            b = rem(&mul(&b, &b), m);
            e >>= 1;
        }
        acc
    }

    /// Distinct roots of `f` in `F_p` via `gcd(f, x^p - x)` and
    /// Cantor–Zassenhaus equal-degree splitting.
    pub fn roots<R: Rng + ?Sized>(f: &[Fp], rng: &mut R) -> Vec<Fp> {
        let f = trim(f.to_vec());
        if f.len() <= 1 {
            return Vec::new();
        }
        let f = monic(&f);
        let x = vec![Fp::ZERO, Fp::ONE];
        let xp = powmod(&x, FP_MODULUS, &f);
        let g = gcd(&f, &sub(&xp, &x));
        let mut out = Vec::new();
        split(&g, rng, &mut out);
        out.sort_by_key(|r| r.0);
        out
    }

    fn split<R: Rng + ?Sized>(g: &[Fp], rng: &mut R, out: &mut Vec<Fp>) {
        match g.len() {
            0 | 1 => {}
            2 => out.push(g[0].neg()),
            _ => {
                for _ in 0..128 {
                    let a = Fp::random(rng);
                    let h = powmod(&[a, Fp::ONE], (FP_MODULUS - 1) / 2, g);
                    let d = gcd(g, &sub(&h, &[Fp::ONE]));
                    if d.len() > 1 && d.len() < g.len() {
                        let other = div(g, &d);
                        split(&d, rng, out);
                        split(&other, rng, out);
                        return;
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn field_ops() {
        let a = Fp::from_i64(-5);
        assert_eq!(a.add(Fp::new(5)), Fp::ZERO);
        let b = Fp::new(123456789123);
        assert_eq!(b.mul(b.inv().unwrap()), Fp::ONE);
        assert_eq!(Fp::from_rational(&Rational::new(1, 2)).unwrap().mul(Fp::new(2)), Fp::ONE);
    }

    #[test]
    fn roots_of_product() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let rs = [Fp::new(3), Fp::new(17), Fp::new(1 << 40)];
        let mut f = vec![Fp::ONE];
        for r in rs {
            f = upoly::mul(&f, &[r.neg(), Fp::ONE]);
        }
        // times an irreducible quadratic x^2 + 1 has no roots iff p ≡ 3 mod 4
        f = upoly::mul(&f, &[Fp::ONE, Fp::ZERO, Fp::ONE]);
        let got = upoly::roots(&f, &mut rng);
        let mut want: Vec<_> = rs.to_vec();
        want.sort_by_key(|r| r.value());
        assert_eq!(got, want);
    }
}
