use thiserror::Error;

use crate::recurrence::ValidationReport;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands live in different fields")]
    DescriptorMismatch,
    #[error("modulus {0} is not a prime")]
    InvalidModulus(u64),
    #[error("cannot parse scalar {text:?}: {reason}")]
    ParseScalar { text: String, reason: String },
    #[error("exponent too large to evaluate exactly")]
    ExponentTooLarge,

    #[error("zero polynomial where a nonzero one is required")]
    ZeroPolynomial,
    #[error("both polynomials are constant; the Sylvester matrix would be empty")]
    BothConstant,
    #[error("resultant of two zero polynomials is undefined")]
    BothZero,
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix shape {rows}x{cols} does not match {len} entries")]
    ShapeMismatch { rows: usize, cols: usize, len: usize },

    #[error("no step coefficients for n = {0}")]
    MissingStep(usize),
    #[error("window holds {found} polynomials, expected {expected}")]
    WindowSizeMismatch { expected: usize, found: usize },
    #[error("instance failed validation with {} violation(s)", .0.violations.len())]
    ValidationFailed(Box<ValidationReport>),
    #[error("r_{n} has degree {found}, closed form predicts {expected}")]
    DegreeMismatch { n: usize, expected: String, found: String },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("zero coefficient: {0}")]
    ZeroCoefficient(String),
    #[error("index {n} is out of range (minimum {min})")]
    IndexOutOfRange { n: usize, min: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
