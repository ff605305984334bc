//! GL₂ machinery: the Möbius action, primitive normalization, fixed-point
//! equations, orbit decisions for exact and numeric points, and reduction
//! into the standard fundamental domain for SL₂(ℤ).

mod matrix;
mod orbit;
mod reduce;

pub use matrix::{primitive_form, special_point_equation, PrimitiveForm, RatMatrix2};
pub use orbit::{
    canonical_witness, enumerate_primitive_matrices, orbit_decide_exact, orbit_decide_exact_over, orbit_decide_numeric,
    ExactOrbitDecision, NumericOrbitDecision,
};
pub use reduce::{in_fundamental_domain, reduce_to_fundamental_domain, Reduction, SL2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactnum::{Rational, RationalFunction};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MoebiusError {
    #[error("singular matrix (determinant zero)")]
    SingularMatrix,
    #[error("scalar matrix: every point is fixed")]
    ScalarMatrix,
    #[error("constant input: rational points are all GL2(Q)-equivalent")]
    ConstantInput,
    #[error("point is not in the upper half plane")]
    NotInUpperHalfPlane,
    #[error("points live in different variable contexts")]
    VariableMismatch,
}

/// A point of ℙ¹ in one of the supported representations.
#[derive(Debug, Clone, PartialEq)]
pub enum ExactPoint {
    Rational(Rational),
    Function(RationalFunction),
    Numeric { z: Complex64, radius: f64 },
}

impl ExactPoint {
    pub fn numeric(re: f64, im: f64) -> Self {
        ExactPoint::Numeric {
            z: Complex64::new(re, im),
            radius: 0.0,
        }
    }

    pub fn as_complex(&self) -> Option<Complex64> {
        match self {
            ExactPoint::Numeric { z, .. } => Some(*z),
            ExactPoint::Rational(r) => Some(Complex64::new(r.to_f64(), 0.0)),
            ExactPoint::Function(_) => None,
        }
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self, ExactPoint::Numeric { .. })
    }
}

/// Image of a point under a Möbius map.
#[derive(Debug, Clone, PartialEq)]
pub enum Image {
    Finite(ExactPoint),
    Infinity,
}

impl Image {
    pub fn finite(self) -> Option<ExactPoint> {
        match self {
            Image::Finite(p) => Some(p),
            Image::Infinity => None,
        }
    }
}

/// `gx = (ax + b)/(cx + d)`.
pub fn act(g: &RatMatrix2, x: &ExactPoint) -> Result<Image, MoebiusError> {
    if g.det().is_zero() {
        return Err(MoebiusError::SingularMatrix);
    }
    Ok(match x {
        ExactPoint::Rational(r) => {
            let den = &g.c * r + &g.d;
            match den.inv() {
                None => Image::Infinity,
                Some(inv) => Image::Finite(ExactPoint::Rational((&g.a * r + &g.b) * inv)),
            }
        }
        ExactPoint::Function(f) => match act_function(g, f) {
            Some(v) => Image::Finite(ExactPoint::Function(v)),
            None => Image::Infinity,
        },
        ExactPoint::Numeric { z, radius } => {
            let [a, b, c, d] = g.to_f64();
            let den = c * z + d;
            if den.norm() <= radius.max(f64::EPSILON * (c.abs() * z.norm() + d.abs())) {
                Image::Infinity
            } else {
                let w = (a * z + b) / den;
                // |d(gz)/dz| = |det| / |cz + d|^2 scales the radius.
                let det = g.det().to_f64().abs();
                let r = radius * det / den.norm_sqr() + 4.0 * f64::EPSILON * w.norm();
                Image::Finite(ExactPoint::Numeric { z: w, radius: r })
            }
        }
    })
}

/// Möbius image of a rational function under a matrix over ℚ.
pub fn act_function(g: &RatMatrix2, f: &RationalFunction) -> Option<RationalFunction> {
    let embed = |r: &Rational| RationalFunction::constant(f.vars().clone(), r.clone());
    let num = embed(&g.a).mul(f).add(&embed(&g.b));
    let den = embed(&g.c).mul(f).add(&embed(&g.d));
    num.div(&den)
}

/// Möbius image under a matrix whose entries are rational functions.
pub fn act_function_matrix(g: &[RationalFunction; 4], f: &RationalFunction) -> Option<RationalFunction> {
    let num = g[0].mul(f).add(&g[1]);
    let den = g[2].mul(f).add(&g[3]);
    num.div(&den)
}

/// Numeric action of a rational matrix on a complex number.
pub fn act_complex(g: &RatMatrix2, z: Complex64) -> Option<Complex64> {
    let [a, b, c, d] = g.to_f64();
    let den = c * z + d;
    (den.norm() > 0.0).then(|| (a * z + b) / den)
}

/// Serialized matrix: `["a","b","c","d"]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MatrixRecord(pub [Rational; 4]);

impl From<&RatMatrix2> for MatrixRecord {
    fn from(g: &RatMatrix2) -> Self {
        MatrixRecord([g.a.clone(), g.b.clone(), g.c.clone(), g.d.clone()])
    }
}

impl From<MatrixRecord> for RatMatrix2 {
    fn from(r: MatrixRecord) -> Self {
        let [a, b, c, d] = r.0;
        RatMatrix2::new(a, b, c, d)
    }
}
