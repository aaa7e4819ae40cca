//! Checks of the candy properties: one-dimensional corners and a local
//! endomorphism ring.

use serde::Serialize;

use crate::constructions::{corners, CandyModule};
use crate::error::Result;
use crate::linalg::Field;

use super::endo::EndAlgebra;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CandyReport {
    pub passed: bool,
    pub corners_match: bool,
    pub ul_dim: usize,
    pub lr_dim: usize,
    pub end_dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub local_dim: Option<usize>,
    pub local: bool,
}

/// Corners must sit on the support's bounding box and carry one dimension
/// each; the endomorphism ring must be `K`, or local.
pub fn check_candy(c: &CandyModule) -> Result<CandyReport> {
    let m = &c.module;
    let corners_match = corners(m).is_some_and(|(ul, lr)| ul == c.ul && lr == c.lr);
    let dim = |v: &[i64]| if v.len() == m.n() && m.grid().contains(v) { m.dim(v) } else { 0 };
    let (ul_dim, lr_dim) = (dim(&c.ul), dim(&c.lr));
    let alg = EndAlgebra::new(std::sync::Arc::new(m.clone()))?;
    let end_dim = alg.dim();
    let (local_dim, local) = if end_dim == 1 {
        (Some(1), true)
    } else if end_dim == 0 {
        (None, false)
    } else if m.field() == Field::Rationals {
        let l = alg.local_dim()?;
        (Some(l), l == 1)
    } else {
        (None, alg.local_certificate()?)
    };
    Ok(CandyReport { passed: corners_match && ul_dim == 1 && lr_dim == 1 && local, corners_match, ul_dim, lr_dim, end_dim, local_dim, local })
}
