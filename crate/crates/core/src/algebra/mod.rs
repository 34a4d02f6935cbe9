//! Exact arithmetic kernels: rationals, integer matrices, Laurent
//! polynomials/matrices, rational linear algebra and logarithmic forms.
//!
//! Everything downstream reduces its claims to identities in these rings, so
//! all representations here are canonical: equal objects are structurally
//! equal.

pub mod forms;
pub mod intmat;
pub mod laurent;
pub mod linalg;
pub mod matrix;
pub mod rational;

pub use forms::{LogOneForm, LogTwoForm};
pub use intmat::{IntMat, Snf};
pub use laurent::Laurent;
pub use linalg::{QMat, Subspace};
pub use matrix::LaurentMat;
pub use rational::Rat;

use thiserror::Error;

/// Errors raised by the exact-algebra layer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    /// A substitution image was not an invertible monomial.
    #[error("substitution image for variable {var} is not a unit monomial")]
    NonUnitImage { var: usize },
    /// Two operands disagree on dimensions (matrix shape or variable count).
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    /// Matrix inversion requested for a matrix whose determinant is not a
    /// monomial unit.
    #[error("matrix is not invertible over the Laurent ring: determinant {det}")]
    NonUnitDeterminant { det: String },
    /// A rational string could not be parsed.
    #[error("malformed rational literal {0:?}")]
    BadRational(String),
}
