//! Indecomposability verdicts and verified splittings.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::grid::{ModMorphism, PersModule};
use crate::linalg::{Field, Matrix, UniPoly};
use crate::sample::{rng, small_scalar, trial_seed};

use super::endo::EndAlgebra;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    IndecomposableCertified,
    DecomposableCertified,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// Dimension functions of two complementary nonzero summands.
    Split { dims: Vec<Vec<usize>> },
    /// `End/rad` is one-dimensional.
    Local { quotient_dim: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndecVerdict {
    pub status: Status,
    pub end_dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub local_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

/// `M` written as a direct sum, with the isomorphism `M -> parts[0] ⊕ parts[1] ⊕ …`.
#[derive(Clone, Debug)]
pub struct Splitting {
    pub parts: Vec<PersModule>,
    pub iso: ModMorphism,
}

impl Splitting {
    pub fn dims(&self) -> Vec<Vec<usize>> {
        self.parts.iter().map(|p| p.dims().to_vec()).collect()
    }

    pub fn nonzero_parts(&self) -> usize {
        self.parts.iter().filter(|p| !p.is_zero()).count()
    }
}

/// Change basis at every vertex to the columns of `bases[v]`, grouped by
/// `sizes[v]`. Returns `None` unless every step becomes block diagonal.
pub fn split_by_bases(m: &Arc<PersModule>, bases: &[Matrix], sizes: &[Vec<usize>]) -> Result<Option<Splitting>> {
    let bx = m.grid();
    let field = m.field();
    let groups = sizes.first().map_or(0, Vec::len);
    let mut inv = Vec::with_capacity(bx.len());
    for (v, b) in bases.iter().enumerate() {
        if b.rows() != m.dim_at(v) || sizes[v].iter().sum::<usize>() != b.cols() || sizes[v].len() != groups {
            return Ok(None);
        }
        match b.inverse() {
            Ok(i) => inv.push(i),
            Err(_) => return Ok(None),
        }
    }
    let offsets: Vec<Vec<usize>> = sizes
        .iter()
        .map(|s| s.iter().scan(0, |acc, &x| { let o = *acc; *acc += x; Some(o) }).collect())
        .collect();
    let n = bx.n();
    // blocks[g][v * n + k]
    let mut blocks: Vec<Vec<Option<Matrix>>> = vec![vec![None; bx.len() * n]; groups];
    for v in 0..bx.len() {
        for k in 0..n {
            let Some(w) = bx.up(v, k) else { continue };
            let t = &(&inv[w] * m.step_at(v, k).unwrap()) * &bases[v];
            for gr in 0..groups {
                for gc in 0..groups {
                    let rows: Vec<usize> = (offsets[w][gr]..offsets[w][gr] + sizes[w][gr]).collect();
                    let cols: Vec<usize> = (offsets[v][gc]..offsets[v][gc] + sizes[v][gc]).collect();
                    let blk = t.select_rows(&rows).select_cols(&cols);
                    if gr == gc {
                        blocks[gr][v * n + k] = Some(blk);
                    } else if !blk.is_zero() {
                        return Ok(None);
                    }
                }
            }
        }
    }
    let mut parts = Vec::with_capacity(groups);
    for (g, mut blk) in blocks.into_iter().enumerate() {
        let dims = sizes.iter().map(|s| s[g]).collect();
        parts.push(PersModule::from_fn(field, bx.clone(), dims, |v, k, _| Ok(blk[v * n + k].take().unwrap()))?);
    }
    let sum = match parts.split_first() {
        None => PersModule::zero(field, bx.clone()),
        Some((first, rest)) => rest.iter().try_fold(first.clone(), |acc, p| acc.direct_sum(p))?,
    };
    let iso = ModMorphism::new(m.clone(), Arc::new(sum), inv)?;
    Ok(Some(Splitting { parts, iso }))
}

fn kernel_split(m: &Arc<PersModule>, a: &ModMorphism, g: &UniPoly, h: &UniPoly) -> Result<Option<Splitting>> {
    let mut bases = Vec::new();
    let mut sizes = Vec::new();
    for c in a.comps() {
        let kg = c.eval_poly(g)?.nullspace();
        let kh = c.eval_poly(h)?.nullspace();
        sizes.push(vec![kg.cols(), kh.cols()]);
        bases.push(kg.hstack(&kh)?);
    }
    split_by_bases(m, &bases, &sizes)
}

fn fitting_split(m: &Arc<PersModule>, a: &ModMorphism) -> Result<Option<Splitting>> {
    let big_n = m.total_dim() as u64;
    let mut bases = Vec::new();
    let mut sizes = Vec::new();
    for c in a.comps() {
        let p = c.pow(big_n)?;
        let ker = p.nullspace();
        let (_, piv) = p.rref();
        let im = p.select_cols(&piv);
        sizes.push(vec![ker.cols(), im.cols()]);
        bases.push(ker.hstack(&im)?);
    }
    split_by_bases(m, &bases, &sizes)
}

/// Certify `M` indecomposable through its endomorphism algebra, or split it
/// with a random endomorphism whose minimal polynomial has coprime factors.
pub fn try_split(m: &PersModule, seed: u64, trials: usize) -> Result<IndecVerdict> {
    let m = Arc::new(m.clone());
    let alg = EndAlgebra::new(m.clone())?;
    let e = alg.dim();
    let local_dim = match m.field() {
        Field::Rationals if e > 0 => Some(alg.local_dim()?),
        _ => None,
    };
    let verdict = |status, witness| IndecVerdict { status, end_dim: e, local_dim, witness };
    if m.is_zero() {
        return Ok(verdict(Status::Inconclusive, None));
    }
    let local = Some(Witness::Local { quotient_dim: 1 });
    if e == 1 || local_dim == Some(1) {
        return Ok(verdict(Status::IndecomposableCertified, local));
    }
    if local_dim.is_none() && alg.local_certificate()? {
        return Ok(verdict(Status::IndecomposableCertified, local));
    }
    let field = m.field();
    for t in 0..trials {
        let mut r = rng(trial_seed(seed, t as u64));
        let x: Vec<_> = (0..e).map(|_| small_scalar(field, &mut r)).collect();
        let f = alg.left_mult(&x).minimal_polynomial()?;
        let a = alg.element(&x);
        let split = match f.coprime_split()? {
            Some((g, h)) => kernel_split(&m, &a, &g, &h)?,
            None => {
                let nilpotent = f.coeffs().iter().rev().skip(1).all(|c| c.is_zero());
                let invertible = !f.coeffs()[0].is_zero();
                if nilpotent || invertible { None } else { fitting_split(&m, &a)? }
            }
        };
        if let Some(s) = split {
            if s.nonzero_parts() == 2 {
                return Ok(verdict(Status::DecomposableCertified, Some(Witness::Split { dims: s.dims() })));
            }
        }
    }
    Ok(verdict(Status::Inconclusive, None))
}

/// Whether `End(M)` has an idempotent other than 0 and 1, by enumerating all
/// `p^e` elements. `None` over the rationals or when `p^e` overflows.
pub fn has_nontrivial_idempotent(alg: &EndAlgebra) -> Option<bool> {
    let Field::Prime(p) = alg.field() else { return None };
    let e = alg.dim() as u32;
    let total = p.checked_pow(e)?;
    let field = alg.field();
    let id = alg.identity_coords();
    let zero = vec![field.zero(); e as usize];
    for code in 0..total {
        let mut c = code;
        let x: Vec<_> = (0..e)
            .map(|_| {
                let d = c % p;
                c /= p;
                field.from_i64(d as i64)
            })
            .collect();
        if x == zero || x == id {
            continue;
        }
        if alg.product(&x, &x) == x {
            return Some(true);
        }
    }
    Some(false)
}
