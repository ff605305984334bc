//! Exact and numeric machinery around the modular j-function.
pub mod derivations;
pub mod evaluator;
pub mod exactnum;
pub mod jfield;
pub mod modpoly;
pub mod moebius;
pub mod numeric;
pub mod pregeom;
pub mod qseries;

pub use derivations::{Analysis, DerivationError, Presentation, PresentationSpec};
pub use evaluator::{evaluate_jet, JetValue};
pub use exactnum::{Field, Fp, MultiPoly, Rational, RationalFunction, Ring};
pub use jfield::{check_axioms, fragment_from_evaluator, AxiomConfig, AxiomReport, JFieldFragment, Status};
pub use modpoly::{build_modular_polynomial, ModularPolynomial};
pub use moebius::{ExactPoint, MatrixRecord, RatMatrix2};
pub use qseries::LaurentSeries;
