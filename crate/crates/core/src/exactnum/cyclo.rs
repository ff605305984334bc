use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::{Rational, Ring};

pub fn euler_phi(n: u32) -> u32 {
    let mut m = n;
    let mut out = n;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            while m.is_multiple_of(p) {
                m /= p;
            }
            out -= out / p;
        }
        p += 1;
    }
    if m > 1 {
        out -= out / m;
    }
    out
}

fn poly_div_exact_i64(num: &[i64], den: &[i64]) -> Vec<i64> {
    // Both monic-up-to-sign integer polynomials, lowest degree first.
    let mut rem = num.to_vec();
    let dl = den.len();
    let lead = *den.last().unwrap();
    let mut q = vec![0i64; num.len() + 1 - dl];
    for k in (0..q.len()).rev() {
        let c = rem[k + dl - 1] / lead;
        q[k] = c;
        for (i, d) in den.iter().enumerate() {
            rem[k + i] -= c * d;
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    q
}

/// Coefficients of the `n`-th cyclotomic polynomial, lowest degree first.
pub fn cyclotomic_polynomial(n: u32) -> Vec<i64> {
    // x^n - 1 = Π_{d | n} Φ_d(x)
    let mut p = vec![0i64; n as usize + 1];
    p[0] = -1;
    p[n as usize] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            p = poly_div_exact_i64(&p, &cyclotomic_polynomial(d));
        }
    }
    p
}

#[derive(Debug)]
struct CycloCtx {
    order: u32,
    phi: usize,
    /// `reduce[k]` is `ζ^(phi + k)` written in the power basis.
    reduce: Vec<Vec<i64>>,
}

fn context(order: u32) -> Arc<CycloCtx> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<CycloCtx>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("cyclotomic cache poisoned");
    guard
        .entry(order)
        .or_insert_with(|| {
            let poly = cyclotomic_polynomial(order);
            let phi = poly.len() - 1;
            // ζ^phi = -Σ_{i<phi} poly[i] ζ^i
            let mut cur: Vec<i64> = poly[..phi].iter().map(|c| -c).collect();
            let mut reduce = Vec::with_capacity(phi.max(1));
            for _ in 0..phi.max(1) {
                reduce.push(cur.clone());
                // multiply by ζ
                let top = cur[phi - 1];
                let mut next = vec![0i64; phi];
                next[1..phi].copy_from_slice(&cur[..(phi - 1)]);
                for i in 0..phi {
                    next[i] -= top * poly[i];
                }
                cur = next;
            }
            Arc::new(CycloCtx { order, phi, reduce })
        })
        .clone()
}

/// Element of ℤ[ζ_N] stored as a residue modulo the `N`-th cyclotomic
/// polynomial, of length `φ(N)`.
#[derive(Clone)]
pub struct CycloCoeff {
    ctx: Arc<CycloCtx>,
    residue: Vec<BigInt>,
}

impl CycloCoeff {
    pub fn zero(order: u32) -> Self {
        let ctx = context(order);
        let residue = vec![BigInt::zero(); ctx.phi];
        CycloCoeff { ctx, residue }
    }

    pub fn from_integer(order: u32, n: impl Into<BigInt>) -> Self {
        let mut z = Self::zero(order);
        z.residue[0] = n.into();
        z
    }

    /// `ζ_N^k` for any integer `k`.
    pub fn zeta_power(order: u32, k: i64) -> Self {
        let k = k.rem_euclid(order as i64) as usize;
        let ctx = context(order);
        let phi = ctx.phi;
        let mut cur = vec![0i64; phi];
        cur[0] = 1;
        for _ in 0..k {
            let top = cur[phi - 1];
            let mut next = vec![0i64; phi];
            next[1..].copy_from_slice(&cur[..phi - 1]);
            for (i, r) in ctx.reduce[0].iter().enumerate() {
                next[i] += top * r;
            }
            cur = next;
        }
        CycloCoeff {
            ctx,
            residue: cur.into_iter().map(BigInt::from).collect(),
        }
    }

    pub fn order(&self) -> u32 {
        self.ctx.order
    }

    pub fn residue(&self) -> &[BigInt] {
        &self.residue
    }

    /// Integer value when only the constant term is nonzero.
    pub fn as_integer(&self) -> Option<&BigInt> {
        self.residue[1..]
            .iter()
            .all(Zero::is_zero)
            .then(|| &self.residue[0])
    }

    pub fn is_rational(&self) -> bool {
        self.as_integer().is_some()
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        CycloCoeff {
            ctx: self.ctx.clone(),
            residue: self.residue.iter().map(|r| r * c).collect(),
        }
    }

    /// Complex value at `ζ = e^{2πi/N}`.
    pub fn to_complex(&self) -> (f64, f64) {
        let n = self.ctx.order as f64;
        let mut re = 0.0;
        let mut im = 0.0;
        for (k, c) in self.residue.iter().enumerate() {
            let c = c.to_f64().unwrap_or(f64::NAN);
            let t = 2.0 * std::f64::consts::PI * k as f64 / n;
            re += c * t.cos();
            im += c * t.sin();
        }
        (re, im)
    }

    fn check(&self, other: &Self) {
        assert_eq!(self.ctx.order, other.ctx.order, "cyclotomic orders differ");
    }
}

impl PartialEq for CycloCoeff {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.order == other.ctx.order && self.residue == other.residue
    }
}

impl Ring for CycloCoeff {
    fn zero_like(&self) -> Self {
        CycloCoeff {
            ctx: self.ctx.clone(),
            residue: vec![BigInt::zero(); self.ctx.phi],
        }
    }
    fn one_like(&self) -> Self {
        let mut z = self.zero_like();
        z.residue[0] = BigInt::from(1);
        z
    }
    fn is_zero(&self) -> bool {
        self.residue.iter().all(Zero::is_zero)
    }
    fn plus(&self, rhs: &Self) -> Self {
        self.check(rhs);
        CycloCoeff {
            ctx: self.ctx.clone(),
            residue: self.residue.iter().zip(&rhs.residue).map(|(a, b)| a + b).collect(),
        }
    }
    fn minus(&self, rhs: &Self) -> Self {
        self.check(rhs);
        CycloCoeff {
            ctx: self.ctx.clone(),
            residue: self.residue.iter().zip(&rhs.residue).map(|(a, b)| a - b).collect(),
        }
    }
    fn times(&self, rhs: &Self) -> Self {
        let mut out = self.zero_like();
        out.add_product(self, rhs);
        out
    }
    fn negated(&self) -> Self {
        CycloCoeff {
            ctx: self.ctx.clone(),
            residue: self.residue.iter().map(|a| -a).collect(),
        }
    }
    fn embed_rational(&self, r: &Rational) -> Option<Self> {
        let n = r.to_integer()?;
        let mut z = self.zero_like();
        z.residue[0] = n;
        Some(z)
    }
    fn add_product(&mut self, a: &Self, b: &Self) {
        a.check(b);
        self.check(a);
        let phi = self.ctx.phi;
        let mut full = vec![BigInt::zero(); 2 * phi - 1];
        let mut any = false;
        for (i, x) in a.residue.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.residue.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                full[i + j] += x * y;
                any = true;
            }
        }
        if !any {
            return;
        }
        for (k, c) in full.iter().enumerate().take(phi) {
            if !c.is_zero() {
                self.residue[k] += c;
            }
        }
        for k in phi..(2 * phi - 1) {
            let c = &full[k];
            if c.is_zero() {
                continue;
            }
            for (i, r) in self.ctx.reduce[k - phi].iter().enumerate() {
                if *r != 0 {
                    self.residue[i] += c * r;
                }
            }
        }
    }
}

impl fmt::Debug for CycloCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .residue
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| match k {
                0 => c.to_string(),
                1 => format!("{c}*z"),
                _ => format!("{c}*z^{k}"),
            })
            .collect();
        if parts.is_empty() {
            write!(f, "0 (mod Φ_{})", self.ctx.order)
        } else {
            write!(f, "{} (mod Φ_{})", parts.join(" + "), self.ctx.order)
        }
    }
}

/// gcd of all residue entries; useful for content checks in tests.
pub fn residue_content(c: &CycloCoeff) -> BigInt {
    c.residue.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}
