//! Exact prime-field arithmetic and dense linear algebra.

mod field;
mod linear;
mod matrix;
mod vandermonde;

use thiserror::Error;

pub use field::{ff_inv, sum_in, FieldElement, PrimeField, DEFAULT_MODULUS, MAX_MODULUS};
pub use linear::{row_span_contains, solve_linear, LinearSolveOutcome, SolveKind};
pub use matrix::Matrix;
pub use vandermonde::{
    cauchy_like_det, cauchy_like_matrix, vandermonde, vandermonde_last_column_of_inverse,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("modulus {0} is not a supported prime")]
    NotPrime(u64),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("inputs are not pairwise distinct")]
    DegenerateInput,
}
