//! Rational matrix functions with values in the scaled-quaternion rings `H_t`.
//!
//! `H_t` is the real algebra spanned by `1, i, j_t, k_t` with `i^2 = -1` and `j_t^2 = t`.
//! Everything is computed through the embedding `a + b j_t -> [[a, t b], [conj b, conj a]]`
//! into complex 2x2 matrices.

pub mod batch;
pub mod constructors;
pub mod error;
pub mod factorization;
pub mod linalg;
pub mod matrix;
pub mod realization;
pub mod scalar;
pub mod structured;
pub mod subspace;

pub use error::{HtError, Result};
pub use matrix::HtMatrix;
pub use realization::Node;
pub use scalar::{AlgebraContext, HtScalar};

/// Default tolerance for equality tests.
pub const DEFAULT_TOL: f64 = 1e-9;
