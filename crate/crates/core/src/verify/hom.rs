//! Bases of Hom(M, N) by a sweep over the box in lexicographic order.
//!
//! Every entry of every component is kept as a sparse linear form in a set
//! of free parameters. At a vertex `w` with incoming arrows `M_k`, `N_k`,
//! naturality reads `Φ_w [M_1 | … | M_K] = [N_1 Φ_1 | … | N_K Φ_K] =: R`. It is
//! solvable iff `R` vanishes on `ker U` (constraints on the parameters), and
//! then `Φ_w` is fixed on the column space of `U` and free on a complement
//! (fresh parameters). Constraints eliminate one parameter each; eliminated
//! parameters are substituted lazily when a stored form is read again.
//!
//! The final map from surviving parameters to morphisms is injective, so the
//! surviving parameters index a basis.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{ModMorphism, PersModule};
use crate::linalg::{Field, Matrix, Scalar};

type Form = Vec<(usize, Scalar)>;

struct Params {
    field: Field,
    subst: Vec<Option<Form>>,
}

fn finish(mut terms: Vec<(usize, Scalar)>) -> Form {
    terms.sort_by_key(|t| t.0);
    let mut out: Form = Vec::with_capacity(terms.len());
    for (i, c) in terms {
        match out.last_mut() {
            Some((j, acc)) if *j == i => *acc = &*acc + &c,
            _ => out.push((i, c)),
        }
    }
    out.retain(|t| !t.1.is_zero());
    out
}

fn axpy(acc: &mut Vec<(usize, Scalar)>, c: &Scalar, f: &Form) {
    if c.is_zero() {
        return;
    }
    for (i, x) in f {
        acc.push((*i, c * x));
    }
}

impl Params {
    fn fresh(&mut self) -> usize {
        self.subst.push(None);
        self.subst.len() - 1
    }

    fn resolve(&mut self, id: usize) -> Form {
        match self.subst[id].take() {
            None => vec![(id, self.field.one())],
            Some(e) => {
                let r = self.normalize(&e);
                self.subst[id] = Some(r.clone());
                r
            }
        }
    }

    /// Rewrite in surviving parameters only.
    fn normalize(&mut self, f: &Form) -> Form {
        if f.iter().all(|(i, _)| self.subst[*i].is_none()) {
            return f.clone();
        }
        let mut acc = Vec::new();
        for (i, c) in f {
            if self.subst[*i].is_none() {
                acc.push((*i, c.clone()));
            } else {
                let r = self.resolve(*i);
                axpy(&mut acc, c, &r);
            }
        }
        finish(acc)
    }

    /// Impose `f = 0` by eliminating its newest parameter.
    fn impose(&mut self, f: &Form) {
        let f = self.normalize(f);
        let Some((p, a)) = f.last().cloned() else { return };
        let inv = -&a.inv().expect("nonzero coefficient");
        let expr: Form = f[..f.len() - 1].iter().map(|(i, c)| (*i, c * &inv)).collect();
        self.subst[p] = Some(expr);
    }

    fn alive(&self) -> Vec<usize> {
        (0..self.subst.len()).filter(|&i| self.subst[i].is_none()).collect()
    }
}

/// A basis of `Hom(M, N)`.
pub fn hom_basis(m: &PersModule, n: &PersModule) -> Result<Vec<ModMorphism>> {
    hom_basis_arc(&Arc::new(m.clone()), &Arc::new(n.clone()))
}

pub fn hom_basis_arc(m: &Arc<PersModule>, n: &Arc<PersModule>) -> Result<Vec<ModMorphism>> {
    if m.field() != n.field() {
        return Err(Error::FieldMismatch(format!("{} vs {}", m.field(), n.field())));
    }
    if m.grid() != n.grid() {
        return Err(Error::BoxMismatch("hom between modules on different boxes".into()));
    }
    let field = m.field();
    let bx = m.grid();
    let axes = bx.n();
    let mut params = Params { field, subst: Vec::new() };
    // phi[w][i * dM + j] for the (i, j) entry of the component at w
    let mut phi: Vec<Vec<Form>> = Vec::with_capacity(bx.len());
    for w in 0..bx.len() {
        let (dm, dn) = (m.dim_at(w), n.dim_at(w));
        let preds: Vec<(usize, usize)> = (0..axes).filter_map(|k| bx.down(w, k).map(|v| (v, k))).collect();
        // R = [N_k Φ_v], one block of columns per predecessor
        let mut r_cols: Vec<Vec<Form>> = Vec::new(); // r_cols[c][i]
        let mut u_blocks: Vec<&Matrix> = Vec::new();
        for &(v, k) in &preds {
            let dmv = m.dim_at(v);
            if dmv == 0 {
                continue;
            }
            let stored = std::mem::take(&mut phi[v]);
            let fresh: Vec<Form> = stored.iter().map(|f| params.normalize(f)).collect();
            phi[v] = fresh;
            let nk = n.step_at(v, k).unwrap();
            let dnv = n.dim_at(v);
            for j in 0..dmv {
                let col: Vec<Form> = (0..dn)
                    .map(|i| {
                        let mut acc = Vec::new();
                        for l in 0..dnv {
                            axpy(&mut acc, &nk[(i, l)], &phi[v][l * dmv + j]);
                        }
                        finish(acc)
                    })
                    .collect();
                r_cols.push(col);
            }
            u_blocks.push(m.step_at(v, k).unwrap());
        }
        let u = Matrix::hcat(field, dm, &u_blocks)?;
        let c = u.cols();
        if dn > 0 && c > 0 {
            let ker = u.nullspace();
            for col in 0..ker.cols() {
                for i in 0..dn {
                    let mut acc = Vec::new();
                    for (cc, rc) in r_cols.iter().enumerate() {
                        axpy(&mut acc, &ker[(cc, col)], &rc[i]);
                    }
                    params.impose(&finish(acc));
                }
            }
        }
        if dm == 0 || dn == 0 {
            phi.push(Vec::new());
            continue;
        }
        let (piv, units) = u.basis_extension();
        let r = piv.len();
        let b = u.select_cols(&piv).hstack(&Matrix::identity(field, dm).select_cols(&units))?;
        let binv = b.inverse()?;
        let fresh: Vec<Vec<usize>> = (0..dn).map(|_| (0..dm - r).map(|_| params.fresh()).collect()).collect();
        let mut comp = Vec::with_capacity(dn * dm);
        for i in 0..dn {
            for j in 0..dm {
                let mut acc = Vec::new();
                for (a, &pc) in piv.iter().enumerate() {
                    axpy(&mut acc, &binv[(a, j)], &r_cols[pc][i]);
                }
                for (bb, &p) in fresh[i].iter().enumerate() {
                    let x = &binv[(r + bb, j)];
                    if !x.is_zero() {
                        acc.push((p, x.clone()));
                    }
                }
                comp.push(finish(acc));
            }
        }
        phi.push(comp);
    }
    let alive = params.alive();
    let pos: std::collections::HashMap<usize, usize> = alive.iter().enumerate().map(|(a, &p)| (p, a)).collect();
    let mut comps: Vec<Vec<Matrix>> = vec![Vec::with_capacity(bx.len()); alive.len()];
    for (w, forms) in phi.iter().enumerate() {
        let (dm, dn) = (m.dim_at(w), n.dim_at(w));
        let mut mats = vec![Matrix::zeros(field, dn, dm); alive.len()];
        for (e, f) in forms.iter().enumerate() {
            for (p, c) in params.normalize(f) {
                mats[pos[&p]][(e / dm, e % dm)] = c;
            }
        }
        for (a, mat) in mats.into_iter().enumerate() {
            comps[a].push(mat);
        }
    }
    comps
        .into_iter()
        .map(|c| {
            let f = ModMorphism::new_unchecked(m.clone(), n.clone(), c)?;
            debug_assert!(f.check_natural().is_ok());
            Ok(f)
        })
        .collect()
}

/// Dimension of `Hom(M, N)`.
pub fn hom_dim(m: &PersModule, n: &PersModule) -> Result<usize> {
    Ok(hom_basis(m, n)?.len())
}
