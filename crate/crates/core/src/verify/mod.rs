//! Morphisms, endomorphism algebras and decomposition checks.

mod candy;
mod endo;
mod hom;
mod iso;
mod split;
mod tworows;

pub use candy::{check_candy, CandyReport};
pub use endo::{end_algebra, end_dim, local_dim, EndAlgebra};
pub use hom::{hom_basis, hom_basis_arc, hom_dim};
pub use iso::iso_certificate;
pub use split::{has_nontrivial_idempotent, split_by_bases, try_split, IndecVerdict, Splitting, Status, Witness};
pub use tworows::{decompose_two_rows, find_separator};
