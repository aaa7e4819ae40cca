//! Isomorphism certificates.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{ModMorphism, PersModule};
use crate::rect::interval_iso;
use crate::sample::{rng, small_scalar, trial_seed};

use super::hom::hom_basis_arc;

/// An isomorphism `M -> N` if one is found. In one dimension the answer is
/// decided by barcodes; otherwise `None` only means no certificate was found.
pub fn iso_certificate(m: &PersModule, n: &PersModule, seed: u64, trials: usize) -> Result<Option<ModMorphism>> {
    if m.field() != n.field() {
        return Err(Error::FieldMismatch(format!("{} vs {}", m.field(), n.field())));
    }
    if m.grid() != n.grid() {
        return Err(Error::BoxMismatch("iso between modules on different boxes".into()));
    }
    if m.dims() != n.dims() {
        return Ok(None);
    }
    let (ma, na) = (Arc::new(m.clone()), Arc::new(n.clone()));
    if m == n {
        return Ok(Some(ModMorphism::identity(ma)));
    }
    if m.n() == 1 {
        return interval_iso(&ma, &na);
    }
    let basis = hom_basis_arc(&ma, &na)?;
    if basis.is_empty() {
        return Ok(None);
    }
    let field = m.field();
    for t in 0..trials {
        let mut r = rng(trial_seed(seed, t as u64));
        let mut phi = ModMorphism::zero(ma.clone(), na.clone())?;
        for b in &basis {
            phi = phi.add(&b.scale(&small_scalar(field, &mut r)))?;
        }
        if phi.is_iso() {
            return Ok(Some(phi));
        }
    }
    Ok(None)
}
