//! The endomorphism algebra of a module with structure constants.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{ModMorphism, PersModule};
use crate::linalg::{Field, Matrix, Scalar};

use super::hom::hom_basis_arc;

/// `End(M)` with a basis and `mult[a][b] = coords(basis[a] ∘ basis[b])`.
#[derive(Clone, Debug)]
pub struct EndAlgebra {
    module: Arc<PersModule>,
    basis: Vec<ModMorphism>,
    // entry positions (vertex, row, col) on which the basis is independent
    pivots: Vec<(usize, usize, usize)>,
    eval_inv: Matrix,
    mult: Vec<Vec<Vec<Scalar>>>,
}

pub fn end_algebra(m: &PersModule) -> Result<EndAlgebra> {
    EndAlgebra::new(Arc::new(m.clone()))
}

pub fn end_dim(m: &PersModule) -> Result<usize> {
    super::hom_dim(m, m)
}

/// Dimension of `End(M)` modulo its radical. Rationals only.
pub fn local_dim(m: &PersModule) -> Result<usize> {
    end_algebra(m)?.local_dim()
}

impl EndAlgebra {
    pub fn new(module: Arc<PersModule>) -> Result<Self> {
        let basis = hom_basis_arc(&module, &module)?;
        let field = module.field();
        let e = basis.len();
        // every entry where some basis element is nonzero
        let mut positions = Vec::new();
        for w in 0..module.grid().len() {
            let d = module.dim_at(w);
            for i in 0..d {
                for j in 0..d {
                    if basis.iter().any(|f| !f.comp(w)[(i, j)].is_zero()) {
                        positions.push((w, i, j));
                    }
                }
            }
        }
        let mut data = Vec::with_capacity(e * positions.len());
        for f in &basis {
            for &(w, i, j) in &positions {
                data.push(f.comp(w)[(i, j)].clone());
            }
        }
        let big = Matrix::from_vec(field, e, positions.len(), data)?;
        let (_, piv) = big.rref();
        if piv.len() != e {
            return Err(Error::Internal("endomorphism basis is dependent".into()));
        }
        let pivots: Vec<_> = piv.iter().map(|&c| positions[c]).collect();
        let eval = big.select_cols(&piv);
        let eval_inv = eval.inverse()?;
        let mut alg = EndAlgebra { module, basis, pivots, eval_inv, mult: Vec::new() };
        let mut mult = Vec::with_capacity(e);
        for a in 0..e {
            let row = (0..e)
                .map(|b| {
                    let vals = alg.pivots.iter().map(|&(w, i, j)| {
                        let (fa, fb) = (alg.basis[a].comp(w), alg.basis[b].comp(w));
                        let mut acc = field.zero();
                        for k in 0..fa.cols() {
                            acc.add_mul_assign(&fa[(i, k)], &fb[(k, j)]);
                        }
                        acc
                    });
                    alg.solve(vals.collect())
                })
                .collect();
            mult.push(row);
        }
        alg.mult = mult;
        Ok(alg)
    }

    fn solve(&self, vals: Vec<Scalar>) -> Vec<Scalar> {
        let e = self.dim();
        let field = self.field();
        (0..e)
            .map(|b| {
                let mut acc = field.zero();
                for (a, v) in vals.iter().enumerate() {
                    acc.add_mul_assign(v, &self.eval_inv[(a, b)]);
                }
                acc
            })
            .collect()
    }

    pub fn field(&self) -> Field {
        self.module.field()
    }

    pub fn module(&self) -> &Arc<PersModule> {
        &self.module
    }

    pub fn basis(&self) -> &[ModMorphism] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn mult_table(&self) -> &[Vec<Vec<Scalar>>] {
        &self.mult
    }

    /// Coordinates of an endomorphism in the basis (which it must lie in the span of).
    pub fn coords(&self, f: &ModMorphism) -> Vec<Scalar> {
        self.solve(self.pivots.iter().map(|&(w, i, j)| f.comp(w)[(i, j)].clone()).collect())
    }

    pub fn identity_coords(&self) -> Vec<Scalar> {
        let one = self.field().one();
        let zero = self.field().zero();
        self.solve(self.pivots.iter().map(|&(_, i, j)| if i == j { one.clone() } else { zero.clone() }).collect())
    }

    pub fn element(&self, x: &[Scalar]) -> ModMorphism {
        let m = &self.module;
        let comps = (0..m.grid().len())
            .map(|w| {
                let mut c = Matrix::zeros(self.field(), m.dim_at(w), m.dim_at(w));
                for (a, xa) in x.iter().enumerate() {
                    if !xa.is_zero() {
                        c = &c + &self.basis[a].comp(w).scale(xa);
                    }
                }
                c
            })
            .collect();
        ModMorphism::new_unchecked(m.clone(), m.clone(), comps).expect("shapes from the basis")
    }

    pub fn product(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        let mut out = vec![self.field().zero(); self.dim()];
        for (a, xa) in x.iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            for (b, yb) in y.iter().enumerate() {
                if yb.is_zero() {
                    continue;
                }
                let c = xa * yb;
                for (o, m) in out.iter_mut().zip(&self.mult[a][b]) {
                    o.add_mul_assign(&c, m);
                }
            }
        }
        out
    }

    /// Matrix of `y -> x y` in the basis.
    pub fn left_mult(&self, x: &[Scalar]) -> Matrix {
        let e = self.dim();
        let mut l = Matrix::zeros(self.field(), e, e);
        for (a, xa) in x.iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            for b in 0..e {
                for c in 0..e {
                    let v = &l[(c, b)] + &(xa * &self.mult[a][b][c]);
                    l[(c, b)] = v;
                }
            }
        }
        l
    }

    /// `T[i][j] = trace(L_i L_j)` on the regular representation.
    pub fn trace_form(&self) -> Matrix {
        let e = self.dim();
        let mut t = Matrix::zeros(self.field(), e, e);
        for i in 0..e {
            for j in i..e {
                let mut acc = self.field().zero();
                for b in 0..e {
                    for c in 0..e {
                        acc.add_mul_assign(&self.mult[i][b][c], &self.mult[j][c][b]);
                    }
                }
                t[(i, j)] = acc.clone();
                t[(j, i)] = acc;
            }
        }
        t
    }

    /// `dim End/rad` through the trace form; needs characteristic zero.
    pub fn local_dim(&self) -> Result<usize> {
        match self.field() {
            Field::Rationals => Ok(self.trace_form().rank()),
            Field::Prime(p) => Err(Error::Unsupported(format!("trace-form radical over F_{p}"))),
        }
    }

    /// Looks for a nilpotent two-sided ideal of codimension one. Finding one
    /// proves `End/rad = K`, so the algebra is local; works over any field.
    pub fn local_certificate(&self) -> Result<bool> {
        let e = self.dim();
        if e == 0 {
            return Ok(false);
        }
        let field = self.field();
        let id = self.identity_coords();
        let mut gens = Vec::with_capacity(e);
        for a in 0..e {
            let mut x = vec![field.zero(); e];
            x[a] = field.one();
            let r = self.left_mult(&x).minimal_polynomial()?.radical()?;
            if r.degree() != Some(1) {
                return Ok(false);
            }
            let lambda = -&r.coeffs()[0];
            gens.push(x.iter().zip(&id).map(|(xa, ia)| xa - &(&lambda * ia)).collect::<Vec<_>>());
        }
        let j = row_basis(field, &gens);
        if j.len() + 1 != e {
            return Ok(false);
        }
        let jm = rows_matrix(field, e, &j);
        let units: Vec<Vec<Scalar>> = (0..e)
            .map(|a| (0..e).map(|b| if a == b { field.one() } else { field.zero() }).collect())
            .collect();
        for g in &j {
            for u in &units {
                for p in [self.product(g, u), self.product(u, g)] {
                    if jm.vstack(&rows_matrix(field, e, &[p]))?.rank() != j.len() {
                        return Ok(false);
                    }
                }
            }
        }
        // powers J^k shrink to zero
        let mut pw = j.clone();
        while !pw.is_empty() {
            let prods: Vec<Vec<Scalar>> = pw.iter().flat_map(|p| j.iter().map(move |g| (p, g))).map(|(p, g)| self.product(p, g)).collect();
            let next = row_basis(field, &prods);
            if next.len() == pw.len() {
                return Ok(false);
            }
            pw = next;
        }
        Ok(true)
    }
}

fn rows_matrix(field: Field, e: usize, rows: &[Vec<Scalar>]) -> Matrix {
    Matrix::from_vec(field, rows.len(), e, rows.iter().flatten().cloned().collect()).expect("rows of length e")
}

fn row_basis(field: Field, rows: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
    let Some(first) = rows.first() else { return Vec::new() };
    let e = first.len();
    let (r, piv) = rows_matrix(field, e, rows).rref();
    (0..piv.len()).map(|i| r.row(i).to_vec()).collect()
}
