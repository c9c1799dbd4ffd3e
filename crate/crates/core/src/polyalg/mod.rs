//! Sparse multivariate polynomial arithmetic over `f64`, differentiation,
//! linear changes of variables, and finite-group symmetrization.
//!
//! Polynomials are immutable values: every operation returns a new value and
//! none of them touches shared state, so they can be sent to and shared
//! between worker threads freely. Coefficients below [`PRUNE_EPS`] in
//! magnitude are dropped on construction so that the zero polynomial has an
//! empty term map. Monomials are ordered graded-lexicographically and the
//! ordering is used everywhere a deterministic basis or file output is
//! needed.

mod monomial;
mod parse;
mod poly;
mod symmetry;

pub use monomial::Monomial;
pub use parse::parse_polynomial;
pub use poly::{eval_batch, lie_derivative, Polynomial, PRUNE_EPS};
pub use symmetry::{compose_linear, symmetrize, LinearSymmetry, SymmetryGroup};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PolyError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite input coordinate at index {0}")]
    NonFiniteInput(usize),
    #[error("matrix is not an invertible signed permutation")]
    NotSignedPermutation,
    #[error("element list is not closed under composition")]
    NotAGroup,
    #[error("symmetry group closure exceeds {0} elements")]
    GroupTooLarge(usize),
    #[error("polynomial parse error: {0}")]
    Parse(String),
}
