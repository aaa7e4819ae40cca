//! Exact arithmetic kernels shared by the rest of the crate.

mod matrix;
mod poly;
mod scalar;

pub use matrix::Matrix;
pub use poly::UniPoly;
pub use scalar::{Field, Rational, Scalar, DEFAULT_PRIME};
