//! Projective covers and injective envelopes over a finite box.

use std::sync::Arc;

use crate::error::Result;
use crate::grid::{ModMorphism, PersModule};
use crate::linalg::Matrix;
use crate::rect::{RectDecomp, Rectangle};

/// A rectangle-decomposable module with a surjection onto (or injection from) a module.
#[derive(Clone, Debug)]
pub struct CoverResult {
    pub rects: RectDecomp,
    /// `p: R -> V` for a cover, `j: V -> T` for an envelope.
    pub map: ModMorphism,
}

/// `R = ⊕ I[x, hi]` with one summand per basis vector of the top of `V` at `x`.
pub fn projective_cover(v: &PersModule) -> Result<CoverResult> {
    let bx = v.grid();
    let field = v.field();
    let n = bx.n();
    // generators: (vertex, lift)
    let mut gens: Vec<(usize, Vec<crate::linalg::Scalar>)> = Vec::new();
    for x in 0..bx.len() {
        let d = v.dim_at(x);
        if d == 0 {
            continue;
        }
        let incoming: Vec<&Matrix> = (0..n).filter_map(|k| bx.down(x, k).map(|p| v.step_at(p, k).unwrap())).collect();
        let u = Matrix::hcat(field, d, &incoming)?;
        let (_, units) = u.basis_extension();
        for i in units {
            let mut g = vec![field.zero(); d];
            g[i] = field.one();
            gens.push((x, g));
        }
    }
    let hi = bx.hi().to_vec();
    let summands = gens.iter().map(|(x, _)| Rectangle::new(bx.vertex(*x), hi.clone())).collect::<Result<Vec<_>>>()?;
    let rects = RectDecomp::new(field, bx.clone(), summands)?;
    let r_mod = Arc::new(rects.to_module());
    let mut comps = Vec::with_capacity(bx.len());
    for y in 0..bx.len() {
        let yv = bx.vertex(y);
        let members = rects.at(&yv);
        let mut c = Matrix::zeros(field, v.dim_at(y), members.len());
        for (col, &s) in members.iter().enumerate() {
            let (x, g) = &gens[s];
            let img = v.map(&bx.vertex(*x), &yv)?.apply(g);
            for (row, e) in img.into_iter().enumerate() {
                c[(row, col)] = e;
            }
        }
        comps.push(c);
    }
    let map = ModMorphism::new(r_mod, Arc::new(v.clone()), comps)?;
    debug_assert!(map.is_surjective());
    Ok(CoverResult { rects, map })
}

/// `T = ⊕ I[lo, x]` with one summand per basis vector of the socle of `V` at `x`.
pub fn injective_envelope(v: &PersModule) -> Result<CoverResult> {
    let bx = v.grid();
    let field = v.field();
    let n = bx.n();
    // cogenerators: (vertex, functional on V(x))
    let mut cogens: Vec<(usize, Vec<crate::linalg::Scalar>)> = Vec::new();
    for x in 0..bx.len() {
        let d = v.dim_at(x);
        if d == 0 {
            continue;
        }
        let outgoing: Vec<&Matrix> = (0..n).filter_map(|k| bx.up(x, k).map(|_| v.step_at(x, k).unwrap())).collect();
        let soc = Matrix::vcat(field, d, &outgoing)?.nullspace();
        if soc.cols() == 0 {
            continue;
        }
        let (_, units) = soc.basis_extension();
        let full = soc.hstack(&Matrix::identity(field, d).select_cols(&units))?;
        let dual = full.inverse()?;
        for s in 0..soc.cols() {
            cogens.push((x, dual.row(s).to_vec()));
        }
    }
    let lo = bx.lo().to_vec();
    let summands = cogens.iter().map(|(x, _)| Rectangle::new(lo.clone(), bx.vertex(*x))).collect::<Result<Vec<_>>>()?;
    let rects = RectDecomp::new(field, bx.clone(), summands)?;
    let t_mod = Arc::new(rects.to_module());
    let mut comps = Vec::with_capacity(bx.len());
    for y in 0..bx.len() {
        let yv = bx.vertex(y);
        let members = rects.at(&yv);
        let mut c = Matrix::zeros(field, members.len(), v.dim_at(y));
        for (row, &s) in members.iter().enumerate() {
            let (x, phi) = &cogens[s];
            let fwd = v.map(&yv, &bx.vertex(*x))?;
            let functional = Matrix::from_vec(field, 1, phi.len(), phi.clone())?;
            let r = &functional * &fwd;
            for col in 0..r.cols() {
                c[(row, col)] = r[(0, col)].clone();
            }
        }
        comps.push(c);
    }
    let map = ModMorphism::new(Arc::new(v.clone()), t_mod, comps)?;
    debug_assert!(map.is_injective());
    Ok(CoverResult { rects, map })
}
