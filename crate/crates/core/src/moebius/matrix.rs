use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Signed;

use super::MoebiusError;
use crate::exactnum::{common_denominator, gcd_all, Rational};

/// 2×2 matrix over ℚ, `[[a, b], [c, d]]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix2 {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub d: Rational,
}

impl RatMatrix2 {
    pub fn new(a: Rational, b: Rational, c: Rational, d: Rational) -> Self {
        RatMatrix2 { a, b, c, d }
    }

    pub fn from_ints(a: i64, b: i64, c: i64, d: i64) -> Self {
        RatMatrix2::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn identity() -> Self {
        RatMatrix2::from_ints(1, 0, 0, 1)
    }

    pub fn entries(&self) -> [&Rational; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn det(&self) -> Rational {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn is_scalar(&self) -> bool {
        self.b.is_zero() && self.c.is_zero() && self.a == self.d
    }

    pub fn mul(&self, o: &RatMatrix2) -> RatMatrix2 {
        RatMatrix2::new(
            &self.a * &o.a + &self.b * &o.c,
            &self.a * &o.b + &self.b * &o.d,
            &self.c * &o.a + &self.d * &o.c,
            &self.c * &o.b + &self.d * &o.d,
        )
    }

    pub fn scale(&self, s: &Rational) -> RatMatrix2 {
        RatMatrix2::new(&self.a * s, &self.b * s, &self.c * s, &self.d * s)
    }

    /// Adjugate; equals the inverse up to the scalar `det`, which is the
    /// same Möbius map.
    pub fn adjugate(&self) -> RatMatrix2 {
        RatMatrix2::new(self.d.clone(), -&self.b, -&self.c, self.a.clone())
    }

    pub fn inverse(&self) -> Option<RatMatrix2> {
        let inv = self.det().inv()?;
        Some(self.adjugate().scale(&inv))
    }

    pub fn to_f64(&self) -> [f64; 4] {
        [self.a.to_f64(), self.b.to_f64(), self.c.to_f64(), self.d.to_f64()]
    }

    /// Largest absolute value of the entries of the primitive form.
    pub fn height(&self) -> BigInt {
        let p = primitive_form(self);
        p.matrix.iter().map(|x| x.abs()).max().unwrap_or_default()
    }
}

impl fmt::Display for RatMatrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

impl fmt::Debug for RatMatrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Unique primitive integral representative of a rational matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimitiveForm {
    /// Positive λ with `λ·g` integral and of entry-gcd 1.
    pub scale: Rational,
    /// `[a, b, c, d]` of `λ·g`.
    pub matrix: [BigInt; 4],
    /// Determinant of `λ·g`; may be negative.
    pub level: BigInt,
}

impl PrimitiveForm {
    /// `|level|`, the index of the modular polynomial relating `z` and `gz`.
    pub fn n(&self) -> u64 {
        use num_traits::ToPrimitive;
        self.level.abs().to_u64().expect("level fits in u64")
    }

    pub fn sign(&self) -> i32 {
        if self.level.is_negative() {
            -1
        } else {
            1
        }
    }

    pub fn to_matrix(&self) -> RatMatrix2 {
        let [a, b, c, d] = self.matrix.clone();
        RatMatrix2::new(a.into(), b.into(), c.into(), d.into())
    }
}

/// Clears denominators and common factors. Panics on a singular matrix,
/// which violates the precondition.
pub fn primitive_form(g: &RatMatrix2) -> PrimitiveForm {
    assert!(!g.det().is_zero(), "primitive_form requires det(g) ≠ 0");
    let den = common_denominator(g.entries());
    let ints: Vec<BigInt> = g
        .entries()
        .iter()
        .map(|e| (*e * &Rational::from_integer(den.clone())).to_integer().unwrap())
        .collect();
    let content = gcd_all(ints.iter()).abs();
    let matrix: [BigInt; 4] = std::array::from_fn(|i| ints[i].div_floor(&content));
    let scale = Rational::new(den, content);
    let level = &matrix[0] * &matrix[3] - &matrix[1] * &matrix[2];
    PrimitiveForm {
        scale,
        matrix,
        level,
    }
}

/// Coefficients `(c, d − a, −b)` of `c·x² + (d − a)·x − b = 0`, whose roots
/// are the finite fixed points of `g`.
pub fn special_point_equation(g: &RatMatrix2) -> Result<[Rational; 3], MoebiusError> {
    if g.is_scalar() {
        return Err(MoebiusError::ScalarMatrix);
    }
    Ok([g.c.clone(), &g.d - &g.a, -&g.b])
}
