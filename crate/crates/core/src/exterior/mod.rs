//! Exact exterior calculus on a coordinate chart.
//!
//! Coefficients are [`Poly`]s over exact rationals, so identities such as
//! `d∘d = 0` hold as structural equalities of normalized term maps.

mod chart;
mod form;
mod poly;

pub use chart::{Chart, Variable};
pub use form::{CoordVectorField, Form, FormDoc, FormTermDoc, IndexTuple};
pub use poly::{CompiledPoly, Exponents, Poly, TermDoc};

pub(crate) use poly::rational_to_f64;

use thiserror::Error;

/// Exact rational coefficient, always in lowest terms with positive denominator.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExteriorError {
    #[error("forms live on different charts")]
    ChartMismatch,
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },
    #[error("expected a point of dimension {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("axis {axis} outside chart of dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },
    #[error("variable {0} is not periodic")]
    NotPeriodic(String),
    #[error("unsupported integrand: {0}")]
    UnsupportedIntegrand(String),
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error("malformed form document: {0}")]
    Malformed(&'static str),
}

/// Shorthand for an integer-valued [`Rational`].
pub fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Shorthand for `n / d`.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}
