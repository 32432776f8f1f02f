//! Exact arithmetic for polynomial sequences defined by a nonlinear
//! recurrence, and for their consecutive resultants.
//!
//! * [`field`]: scalars over Q and F_p.
//! * [`poly`]: dense univariate polynomials.
//! * [`resultant`]: Sylvester determinant and remainder-sequence resultants.
//! * [`recurrence`]: instances, validation, generation and presets.
//! * [`closedform`]: the resultant identity and its ingredients.

pub mod closedform;
pub mod error;
pub mod field;
pub mod poly;
pub mod recurrence;
pub mod resultant;

pub use closedform::{degree_formula, exponents, schur_formula, FormulaContext, StepExponents};
pub use error::{Error, Result};
pub use field::{FieldDescriptor, PrimeModulus, Scalar};
pub use poly::{Degree, Poly};
pub use recurrence::{
    generate, step, validate, Corollary2Params, RecurrenceSpec, SchurParams, StepCoeffs, TTerm, UlasParams,
    ValidationOptions, ValidationReport, Violation, ViolationCode,
};
pub use resultant::{determinant, resultant_euclid, resultant_sylvester, sylvester_matrix, Matrix};
