//! Persistence modules on finite boxes of Z^n with exact coefficients.

pub mod constructions;
pub mod covers;
pub mod error;
pub mod grid;
pub mod io;
pub mod linalg;
pub mod rect;
pub mod sample;
pub mod verify;

pub use error::{Error, Result};
pub use grid::{AxisEmbedding, AxisMap, GridBox, ModMorphism, PersModule};
pub use linalg::{Field, Matrix, Rational, Scalar, UniPoly};
pub use rect::{FormalMatrix, RectDecomp, Rectangle};
