use std::fmt;

use num_complex::Complex;
use serde::Serialize;

use super::{MoebiusError, RatMatrix2};
use crate::numeric::Real;

/// Integer matrix of determinant one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct SL2 {
    pub a: i128,
    pub b: i128,
    pub c: i128,
    pub d: i128,
}

impl SL2 {
    pub const IDENTITY: SL2 = SL2 {
        a: 1,
        b: 0,
        c: 0,
        d: 1,
    };

    pub fn new(a: i128, b: i128, c: i128, d: i128) -> Self {
        SL2 { a, b, c, d }
    }

    pub fn det(&self) -> i128 {
        self.a * self.d - self.b * self.c
    }

    pub fn mul(&self, o: &SL2) -> SL2 {
        SL2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }

    pub fn inverse(&self) -> SL2 {
        SL2::new(self.d, -self.b, -self.c, self.a)
    }

    pub fn act<R: Real>(&self, z: Complex<R>) -> Complex<R> {
        let f = |v: i128| Complex::new(R::from_i128(v), R::zero());
        (f(self.a) * z + f(self.b)) / (f(self.c) * z + f(self.d))
    }

    pub fn to_rat(&self) -> RatMatrix2 {
        let r = |v: i128| crate::exactnum::Rational::from_integer(v);
        RatMatrix2::new(r(self.a), r(self.b), r(self.c), r(self.d))
    }

    pub fn height(&self) -> i128 {
        [self.a, self.b, self.c, self.d].iter().map(|v| v.abs()).max().unwrap()
    }
}

impl fmt::Display for SL2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// Result of reducing `τ` into the fundamental domain: `τ₀ = g·τ`.
#[derive(Debug, Clone)]
pub struct Reduction<R: Real> {
    pub tau0: Complex<R>,
    pub g: SL2,
    /// `g` as a word in `S` and `T`, leftmost factor applied last.
    pub word: String,
}

#[derive(Clone, Copy, PartialEq)]
enum Step {
    S,
    T(i128),
}

fn word_of(steps: &[Step]) -> String {
    let mut merged: Vec<Step> = Vec::new();
    for s in steps {
        match (merged.last_mut(), s) {
            (Some(Step::T(n)), Step::T(m)) => {
                *n += m;
                if *n == 0 {
                    merged.pop();
                }
            }
            (Some(Step::S), Step::S) => {
                // S² = −I acts trivially.
                merged.pop();
            }
            _ => merged.push(*s),
        }
    }
    if merged.is_empty() {
        return "I".into();
    }
    merged
        .iter()
        .rev()
        .map(|s| match s {
            Step::S => "S".to_string(),
            Step::T(1) => "T".to_string(),
            Step::T(n) => format!("T^{n}"),
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Membership in `{−½ ≤ x ≤ 0, |z| ≥ 1} ∪ {0 < x < ½, |z| > 1}` with the
/// scalar type's boundary tolerance.
pub fn in_fundamental_domain<R: Real>(z: Complex<R>) -> bool {
    let eps = R::boundary_eps();
    let half = R::from_f64(0.5);
    let x = z.re;
    let n2 = z.norm_sqr();
    if z.im <= R::zero() {
        return false;
    }
    let left = x >= -half - eps && x <= eps && n2 >= R::one() - eps;
    let right = x > eps && x < half - eps && n2 > R::one() + eps;
    left || right
}

pub fn reduce_to_fundamental_domain<R: Real>(tau: Complex<R>) -> Result<Reduction<R>, MoebiusError> {
    if tau.im <= R::zero() {
        return Err(MoebiusError::NotInUpperHalfPlane);
    }
    let eps = R::boundary_eps();
    let half = R::from_f64(0.5);
    let mut z = tau;
    let mut g = SL2::IDENTITY;
    let mut steps = Vec::new();
    let translate = |z: &mut Complex<R>, g: &mut SL2, steps: &mut Vec<Step>, n: i128| {
        if n != 0 {
            z.re = z.re + R::from_i128(n);
            *g = SL2::new(g.a + n * g.c, g.b + n * g.d, g.c, g.d);
            steps.push(Step::T(n));
        }
    };
    let invert = |z: &mut Complex<R>, g: &mut SL2, steps: &mut Vec<Step>| {
        let n2 = z.norm_sqr();
        *z = Complex::new(-z.re / n2, z.im / n2);
        *g = SL2::new(-g.c, -g.d, g.a, g.b);
        steps.push(Step::S);
    };
    for _ in 0..100_000 {
        let n = -(z.re.round());
        translate(&mut z, &mut g, &mut steps, n.to_f64() as i128);
        if z.norm_sqr() < R::one() - eps {
            invert(&mut z, &mut g, &mut steps);
        } else {
            break;
        }
    }
    // Boundary conventions: x = ½ goes to x = −½; on |z| = 1 keep x ≤ 0.
    if z.re >= half - eps {
        translate(&mut z, &mut g, &mut steps, -1);
    }
    if (z.norm_sqr() - R::one()).abs() <= eps && z.re > eps {
        invert(&mut z, &mut g, &mut steps);
    }
    if z.re < -half - eps {
        translate(&mut z, &mut g, &mut steps, 1);
    }
    Ok(Reduction {
        tau0: z,
        g,
        word: word_of(&steps),
    })
}
