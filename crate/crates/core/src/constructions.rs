//! Indecomposable modules one dimension up having a given module as a
//! hyperplane restriction.
//!
//! Every construction stacks nD layers along a new last axis and places the
//! input at height 0.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::covers::{injective_envelope, projective_cover};
use crate::error::{Error, Result};
use crate::grid::{AxisEmbedding, AxisMap, GridBox, ModMorphism, PersModule};
use crate::linalg::Matrix;
use crate::rect::{FormalMatrix, RectDecomp, Rectangle};

/// A stacked module, the embedding of the input's box, and the number of layers.
#[derive(Clone, Debug)]
pub struct BuildResult {
    pub module: PersModule,
    pub line: AxisEmbedding,
    pub domain: GridBox,
    pub layer_count: usize,
}

impl BuildResult {
    pub fn restriction(&self) -> Result<PersModule> {
        self.module.restrict(&self.line, &self.domain)
    }
}

/// Distinct deaths `d'_j >= d_j`: `C + 2j` plus one where needed so that
/// `b_j + d'_j` is even, with `C` the largest coordinate plus twice the count.
pub fn separate_and_shift(v: &RectDecomp) -> Result<Vec<Vec<i64>>> {
    let rs = v.summands();
    let max = rs
        .iter()
        .flat_map(|r| r.b.iter().chain(&r.d))
        .copied()
        .max()
        .ok_or_else(|| Error::Empty("no summands to shift".into()))?;
    let c = max + 2 * rs.len() as i64;
    Ok(rs
        .iter()
        .enumerate()
        .map(|(j, r)| {
            let base = c + 2 * (j as i64 + 1);
            r.b.iter().map(|&b| base + (b + base).rem_euclid(2)).collect()
        })
        .collect())
}

/// `mu = max_i (b_i + d'_i) / 2` and `b'_i = 2 mu - d'_i`.
pub fn verticalize(v: &RectDecomp, dprime: &[Vec<i64>]) -> Result<(Vec<i64>, Vec<Vec<i64>>)> {
    let rs = v.summands();
    if rs.is_empty() || rs.len() != dprime.len() {
        return Err(Error::Shape(format!("{} summands, {} shifted deaths", rs.len(), dprime.len())));
    }
    let n = v.grid().n();
    let mut mu = vec![i64::MIN; n];
    for (r, d) in rs.iter().zip(dprime) {
        for k in 0..n {
            let s = r.b[k] + d[k];
            if s.rem_euclid(2) != 0 {
                return Err(Error::Parity(format!("b + d' = {s} on axis {k}")));
            }
            mu[k] = mu[k].max(s / 2);
        }
    }
    let bprime = dprime.iter().map(|d| (0..n).map(|k| 2 * mu[k] - d[k]).collect()).collect();
    Ok((mu, bprime))
}

/// `I[max_i b'_i, max_j d'_j]`, maxima per coordinate.
pub fn cone(bprime: &[Vec<i64>], dprime: &[Vec<i64>]) -> Result<Rectangle> {
    let cmax = |xs: &[Vec<i64>]| -> Result<Vec<i64>> {
        let first = xs.first().ok_or_else(|| Error::Empty("cone of nothing".into()))?;
        Ok((0..first.len()).map(|k| xs.iter().map(|x| x[k]).max().unwrap()).collect())
    };
    Rectangle::new(cmax(bprime)?, cmax(dprime)?)
}

type Layers = (Vec<RectDecomp>, Vec<FormalMatrix>);

fn hull_of(bx: &GridBox, rects: &[&Rectangle]) -> Result<GridBox> {
    rects.iter().try_fold(bx.clone(), |acc, r| acc.hull(&r.as_box()?))
}

/// `[I_V, V̄, V', V]` joined by a column of ones and two diagonals.
fn s_layers(v: &RectDecomp) -> Result<Layers> {
    let dp = separate_and_shift(v)?;
    let (_, bp) = verticalize(v, &dp)?;
    let top = cone(&bp, &dp)?;
    let shifted: Vec<Rectangle> =
        v.summands().iter().zip(&dp).map(|(r, d)| Rectangle::new(r.b.clone(), d.clone())).collect::<Result<_>>()?;
    let vertical: Vec<Rectangle> =
        bp.iter().zip(&dp).map(|(b, d)| Rectangle::new(b.clone(), d.clone())).collect::<Result<_>>()?;
    let all: Vec<&Rectangle> = shifted.iter().chain(&vertical).chain(std::iter::once(&top)).collect();
    let bx = hull_of(v.grid(), &all)?;
    let f = v.field();
    let l3 = v.with_box(bx.clone())?;
    let l2 = RectDecomp::new(f, bx.clone(), shifted)?;
    let l1 = RectDecomp::new(f, bx.clone(), vertical)?;
    let l0 = RectDecomp::new(f, bx, vec![top])?;
    let links = vec![FormalMatrix::ones(&l0, &l1)?, FormalMatrix::diagonal(&l1, &l2)?, FormalMatrix::diagonal(&l2, &l3)?];
    Ok((vec![l0, l1, l2, l3], links))
}

/// `[T, T', T̄, I_T]`: the layers of `-T`, negated and reversed.
fn dual_layers(t: &RectDecomp) -> Result<Layers> {
    let (layers, links) = s_layers(&t.negate()?)?;
    let layers = layers.iter().rev().map(RectDecomp::negate).collect::<Result<_>>()?;
    let links = links
        .iter()
        .rev()
        .map(|f| FormalMatrix::new(f.target().negate()?, f.source().negate()?, f.entries().transpose()))
        .collect::<Result<_>>()?;
    Ok((layers, links))
}

fn rebox_layers((layers, links): Layers, bx: &GridBox) -> Result<Layers> {
    let layers: Vec<RectDecomp> = layers.iter().map(|l| l.with_box(bx.clone())).collect::<Result<_>>()?;
    let links = links
        .iter()
        .enumerate()
        .map(|(i, f)| FormalMatrix::new(layers[i].clone(), layers[i + 1].clone(), f.entries().clone()))
        .collect::<Result<_>>()?;
    Ok((layers, links))
}

fn realize((layers, links): &Layers) -> Result<(Vec<PersModule>, Vec<ModMorphism>)> {
    let mods: Vec<Arc<PersModule>> = layers.iter().map(|l| Arc::new(l.to_module())).collect();
    let maps = links
        .iter()
        .enumerate()
        .map(|(i, f)| f.realize_between(mods[i].clone(), mods[i + 1].clone()))
        .collect::<Result<_>>()?;
    Ok((mods.iter().map(|m| (**m).clone()).collect(), maps))
}

/// `f` extended by zero to the (larger) box of `s` and `t`.
fn rebox(f: &ModMorphism, s: &PersModule, t: &PersModule) -> Result<ModMorphism> {
    let inner = f.source().grid();
    let comps = s
        .grid()
        .vertices()
        .map(|v| match inner.index(&v) {
            Some(i) => f.comp(i).clone(),
            None => Matrix::zeros(s.field(), t.dim(&v), s.dim(&v)),
        })
        .collect();
    ModMorphism::new(Arc::new(s.clone()), Arc::new(t.clone()), comps)
}

fn stacked(mods: Vec<PersModule>, maps: Vec<ModMorphism>, base: i64, line: AxisEmbedding, domain: &GridBox) -> Result<BuildResult> {
    let module = PersModule::stack_at(&mods, &maps, base)?;
    Ok(BuildResult { module, line, domain: domain.clone(), layer_count: mods.len() })
}

/// `I_V -> V̄ -> V' -> V` at heights -3..0.
pub fn build_s(v: &RectDecomp) -> Result<BuildResult> {
    let (mods, maps) = realize(&s_layers(v)?)?;
    stacked(mods, maps, -3, AxisEmbedding::layer(v.grid().n(), 0), v.grid())
}

/// `I_R -> R̄ -> R' -> R ->> V` at heights -4..0, with `R ->> V` a projective cover.
pub fn build_s_prime(v: &PersModule) -> Result<BuildResult> {
    let cover = projective_cover(v)?;
    if cover.rects.is_empty() {
        return Err(Error::Empty("zero module".into()));
    }
    let layers = s_layers(&cover.rects)?;
    let bx = layers.0[0].grid().clone();
    let (mut mods, mut maps) = realize(&layers)?;
    let vp = v.pad(&bx)?;
    maps.push(rebox(&cover.map, mods.last().unwrap(), &vp)?);
    mods.push(vp);
    stacked(mods, maps, -4, AxisEmbedding::layer(v.n(), 0), v.grid())
}

/// `V >-> T -> T' -> T̄ -> I_T` at heights 0..4, with `V >-> T` an injective envelope.
pub fn build_s_dprime(v: &PersModule) -> Result<BuildResult> {
    let env = injective_envelope(v)?;
    if env.rects.is_empty() {
        return Err(Error::Empty("zero module".into()));
    }
    let layers = dual_layers(&env.rects)?;
    let bx = layers.0[0].grid().clone();
    let (mut mods, mut maps) = realize(&layers)?;
    let vp = v.pad(&bx)?;
    maps.insert(0, rebox(&env.map, &vp, &mods[0])?);
    mods.insert(0, vp);
    stacked(mods, maps, 0, AxisEmbedding::layer(v.n(), 0), v.grid())
}

/// Both constructions glued at `V`: nine layers at heights -4..4.
pub fn candy_wrap(v: &PersModule) -> Result<BuildResult> {
    let cover = projective_cover(v)?;
    let env = injective_envelope(v)?;
    if cover.rects.is_empty() {
        return Err(Error::Empty("zero module".into()));
    }
    let lower = s_layers(&cover.rects)?;
    let upper = dual_layers(&env.rects)?;
    let bx = lower.0[0].grid().hull(upper.0[0].grid())?;
    let (lmods, lmaps) = realize(&rebox_layers(lower, &bx)?)?;
    let (umods, umaps) = realize(&rebox_layers(upper, &bx)?)?;
    let vp = v.pad(&bx)?;
    let p = rebox(&cover.map, lmods.last().unwrap(), &vp)?;
    let j = rebox(&env.map, &vp, &umods[0])?;
    let mut mods = lmods;
    mods.push(vp);
    mods.extend(umods);
    let mut maps = lmaps;
    maps.push(p);
    maps.push(j);
    maps.extend(umaps);
    stacked(mods, maps, -4, AxisEmbedding::layer(v.n(), 0), v.grid())
}

/// A module with marked corners of its support's bounding box: `ul` takes
/// the least coordinates except the last (greatest), `lr` the opposite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandyModule {
    pub module: PersModule,
    pub ul: Vec<i64>,
    pub lr: Vec<i64>,
}

impl CandyModule {
    /// Corners read off the support.
    pub fn new(module: PersModule) -> Result<Self> {
        let (ul, lr) = corners(&module).ok_or_else(|| Error::Empty("zero module has no corners".into()))?;
        Ok(CandyModule { module, ul, lr })
    }
}

/// `(ul, lr)` of the support's bounding box.
pub fn corners(m: &PersModule) -> Option<(Vec<i64>, Vec<i64>)> {
    let sb = m.support_bounds()?;
    let q = m.n() - 1;
    let mut ul = sb.lo().to_vec();
    ul[q] = sb.hi()[q];
    let mut lr = sb.hi().to_vec();
    lr[q] = sb.lo()[q];
    Some((ul, lr))
}

/// `A ∘ B`; also returns the translation applied to `B`.
///
/// `B` is moved so its upper left corner sits one step past the lower right
/// corner of `A` along the second-to-last axis and one step below it along
/// the last. A new vertex `x` just below `lr(A)` maps by the identity to
/// `lr(A)` and to `ul(B)`. With more than two axes the vertex is widened
/// along the remaining axes to the part of `B`'s top facet generated by
/// `ul(B)`, since a single vertex would break the squares at `ul(B)`.
pub fn concat_with_shift(a: &CandyModule, b: &CandyModule) -> Result<(CandyModule, Vec<i64>)> {
    let (ma, mb) = (&a.module, &b.module);
    if ma.field() != mb.field() {
        return Err(Error::FieldMismatch(format!("{} vs {}", ma.field(), mb.field())));
    }
    if ma.n() != mb.n() || ma.n() < 2 {
        return Err(Error::Dimension { expected: ma.n().max(2), found: mb.n() });
    }
    let dd = ma.n();
    let (p, q) = (dd - 2, dd - 1);
    let field = ma.field();
    let mut t: Vec<i64> = (0..dd).map(|k| a.lr[k] - b.ul[k]).collect();
    t[p] += 1;
    t[q] -= 1;
    let bm = mb.translate(&t)?;
    let ulb: Vec<i64> = b.ul.iter().zip(&t).map(|(u, s)| u + s).collect();
    let lra = &a.lr;
    if ma.dim(lra) != 1 || bm.dim(&ulb) != 1 {
        return Err(Error::Precondition("candy corners must be one-dimensional".into()));
    }
    let mut x = ulb.clone();
    x[p] -= 1;
    let mut xhi = bm.grid().hi().to_vec();
    xhi[p] = x[p];
    xhi[q] = x[q];
    for k in 0..p {
        xhi[k] = xhi[k].max(x[k]);
    }
    let xbox = GridBox::new(x.clone(), xhi)?;
    let hull = ma.grid().hull(bm.grid())?.hull(&xbox)?;
    // generator images g_y = B(ul -> y) on the face through ul(B)
    let gen = |u: &[i64]| -> Result<Option<Matrix>> {
        if !xbox.contains(u) {
            return Ok(None);
        }
        let mut y = u.to_vec();
        y[p] += 1;
        if !bm.grid().contains(&y) {
            return Ok(None);
        }
        let g = bm.map(&ulb, &y)?;
        Ok((!g.is_zero()).then_some(g))
    };
    let pa = ma.pad(&hull)?;
    let pb = bm.pad(&hull)?;
    let mut xg: Vec<Option<Matrix>> = Vec::with_capacity(hull.len());
    for u in hull.vertices() {
        xg.push(gen(&u)?);
    }
    let dims: Vec<usize> = (0..hull.len()).map(|i| pa.dim_at(i) + pb.dim_at(i) + usize::from(xg[i].is_some())).collect();
    let lra_idx = hull.index(lra).unwrap();
    let module = PersModule::from_fn(field, hull.clone(), dims.clone(), |v, k, w| {
        let mut s = Matrix::zeros(field, dims[w], dims[v]);
        let (av, bv) = (pa.dim_at(v), pb.dim_at(v));
        let (aw, bw) = (pa.dim_at(w), pb.dim_at(w));
        let sa = pa.step_at(v, k).unwrap();
        let sb = pb.step_at(v, k).unwrap();
        for i in 0..aw {
            for j in 0..av {
                s[(i, j)] = sa[(i, j)].clone();
            }
        }
        for i in 0..bw {
            for j in 0..bv {
                s[(aw + i, av + j)] = sb[(i, j)].clone();
            }
        }
        if xg[v].is_some() {
            let col = av + bv;
            if xg[w].is_some() {
                s[(aw + bw, col)] = field.one();
            }
            if k == q && w == lra_idx {
                s[(0, col)] = field.one();
            }
            if k == p {
                let g = xg[v].as_ref().unwrap();
                for i in 0..bw {
                    s[(aw + i, col)] = g[(i, 0)].clone();
                }
            }
        }
        Ok(s)
    })?;
    Ok((CandyModule::new(module)?, t))
}

pub fn concat(a: &CandyModule, b: &CandyModule) -> Result<CandyModule> {
    Ok(concat_with_shift(a, b)?.0)
}

/// Candies of several modules strung together, with an embedding recovering each input.
#[derive(Clone, Debug)]
pub struct CandyString {
    pub candy: CandyModule,
    pub embeddings: Vec<(AxisEmbedding, GridBox)>,
}

pub fn string_candies(list: &[PersModule]) -> Result<CandyString> {
    let (first, rest) = list.split_first().ok_or_else(|| Error::Empty("no modules to string".into()))?;
    let w = candy_wrap(first)?;
    let mut candy = CandyModule::new(w.module)?;
    let mut embeddings = vec![(w.line, w.domain)];
    for v in rest {
        let w = candy_wrap(v)?;
        let (c, t) = concat_with_shift(&candy, &CandyModule::new(w.module)?)?;
        candy = c;
        embeddings.push((w.line.translated(&t), w.domain));
    }
    Ok(CandyString { candy, embeddings })
}

/// The data of the three-layer construction: the input with its first axis
/// scaled (and points inflated), the refined summands `V''`, and the cone.
#[derive(Clone, Debug)]
pub struct Min3Plan {
    pub scale: i64,
    pub scaled: RectDecomp,
    pub refined: RectDecomp,
    pub cone: Rectangle,
}

/// Refinement with `s = 2(l + 1)` and points inflated by `l` on the first axis.
pub fn min3_plan(v: &RectDecomp) -> Result<Min3Plan> {
    let l = v.len() as i64;
    plan_with(v, 2 * (l + 1), l)
}

fn plan_with(v: &RectDecomp, scale: i64, half: i64) -> Result<Min3Plan> {
    let l = v.len();
    if l == 0 {
        return Err(Error::Empty("no summands".into()));
    }
    let g = v.grid();
    let mut lo = g.lo().to_vec();
    let mut hi = g.hi().to_vec();
    lo[0] = lo[0] * scale - half;
    hi[0] = hi[0] * scale + half;
    let scaled: Vec<Rectangle> = v
        .summands()
        .iter()
        .map(|r| {
            let (mut b, mut d) = (r.b.clone(), r.d.clone());
            if r.b[0] == r.d[0] {
                b[0] = r.b[0] * scale - half;
                d[0] = r.b[0] * scale + half;
            } else {
                b[0] = r.b[0] * scale;
                d[0] = r.d[0] * scale;
            }
            Rectangle::new(b, d)
        })
        .collect::<Result<_>>()?;
    // earliest deadline first: distinct first coordinates inside each window
    let mut order: Vec<usize> = (0..l).collect();
    order.sort_by_key(|&i| (scaled[i].d[0], scaled[i].b[0], i));
    let mut used = BTreeSet::new();
    let mut first = vec![0i64; l];
    for &i in &order {
        let mut c = scaled[i].b[0];
        while used.contains(&c) {
            c += 1;
        }
        if c > scaled[i].d[0] {
            return Err(Error::Internal("refinement window too small".into()));
        }
        used.insert(c);
        first[i] = c;
    }
    let mut by_birth: Vec<usize> = (0..l).collect();
    by_birth.sort_by_key(|&i| first[i]);
    let mut rank = vec![0usize; l];
    for (r, &i) in by_birth.iter().enumerate() {
        rank[i] = r + 1;
    }
    let n = g.n();
    let top: Vec<i64> = (0..n).map(|k| scaled.iter().map(|r| r.d[k]).max().unwrap()).collect();
    let refined: Vec<Rectangle> = (0..l)
        .map(|i| {
            let mut b = scaled[i].b.clone();
            b[0] = first[i];
            let mut d = top.clone();
            d[0] += (l - rank[i]) as i64;
            Rectangle::new(b, d)
        })
        .collect::<Result<_>>()?;
    let bs: Vec<Vec<i64>> = refined.iter().map(|r| r.b.clone()).collect();
    let ds: Vec<Vec<i64>> = refined.iter().map(|r| r.d.clone()).collect();
    let top_cone = cone(&bs, &ds)?;
    let all: Vec<&Rectangle> = scaled.iter().chain(&refined).chain(std::iter::once(&top_cone)).collect();
    let bx = hull_of(&GridBox::new(lo, hi)?, &all)?;
    Ok(Min3Plan {
        scale,
        scaled: RectDecomp::new(v.field(), bx.clone(), scaled)?,
        refined: RectDecomp::new(v.field(), bx, refined)?,
        cone: top_cone,
    })
}

fn plan_layers(plan: &Min3Plan) -> Result<Layers> {
    let top = RectDecomp::new(plan.scaled.field(), plan.scaled.grid().clone(), vec![plan.cone.clone()])?;
    let links = vec![FormalMatrix::ones(&top, &plan.refined)?, FormalMatrix::diagonal(&plan.refined, &plan.scaled)?];
    Ok((vec![top, plan.refined.clone(), plan.scaled.clone()], links))
}

fn scaled_line(n: usize, scale: i64) -> AxisEmbedding {
    let mut maps = vec![AxisMap::identity(); n];
    maps[0] = AxisMap::Affine { scale, offset: 0 };
    AxisEmbedding::new(maps, n, 0).expect("affine maps with positive scale")
}

/// Three layers `I'_V -> V'' -> V` at heights -2..0 for a 1D module.
pub fn min3(v: &RectDecomp) -> Result<BuildResult> {
    if v.grid().n() != 1 {
        return Err(Error::Precondition(format!("min3 takes a 1D module, got {}D", v.grid().n())));
    }
    min3_rect(v)
}

/// Three layers for any rectangle-decomposable module, refining the first axis.
pub fn min3_rect(v: &RectDecomp) -> Result<BuildResult> {
    let plan = min3_plan(v)?;
    let (mods, maps) = realize(&plan_layers(&plan)?)?;
    stacked(mods, maps, -2, scaled_line(v.grid().n(), plan.scale), v.grid())
}

/// `x -> (floor(x_0 / s), x_1, …)` pulled back: every vertex repeated `s` times along axis 0.
pub fn stretch(m: &PersModule, s: i64) -> Result<PersModule> {
    let g = m.grid();
    let bx = stretched_box(g, s)?;
    let src: Vec<usize> = bx.vertices().map(|y| g.index(&squash(&y, s)).unwrap()).collect();
    let dims = src.iter().map(|&i| m.dim_at(i)).collect();
    PersModule::from_fn(m.field(), bx, dims, |a, k, b| {
        Ok(if src[a] == src[b] { Matrix::identity(m.field(), m.dim_at(src[a])) } else { m.step_at(src[a], k).unwrap().clone() })
    })
}

fn squash(y: &[i64], s: i64) -> Vec<i64> {
    let mut x = y.to_vec();
    x[0] = y[0].div_euclid(s);
    x
}

fn stretched_box(g: &GridBox, s: i64) -> Result<GridBox> {
    let mut lo = g.lo().to_vec();
    let mut hi = g.hi().to_vec();
    lo[0] *= s;
    hi[0] = hi[0] * s + s - 1;
    GridBox::new(lo, hi)
}

/// Four layers `I'_R -> R'' -> R ->> V` at heights -3..0 for any module.
///
/// The cover and `V` are first stretched along axis 0 so that every
/// summand of `R` spans enough points to receive a distinct refined birth;
/// the line samples one point per block.
pub fn gen4(v: &PersModule) -> Result<BuildResult> {
    let cover = projective_cover(v)?;
    let l = cover.rects.len() as i64;
    if l == 0 {
        return Err(Error::Empty("zero module".into()));
    }
    let s = 2 * (l + 1);
    let rs_rects = cover
        .rects
        .summands()
        .iter()
        .map(|r| {
            let (mut b, mut d) = (r.b.clone(), r.d.clone());
            b[0] *= s;
            d[0] = d[0] * s + s - 1;
            Rectangle::new(b, d)
        })
        .collect::<Result<Vec<_>>>()?;
    let rs = RectDecomp::new(v.field(), stretched_box(v.grid(), s)?, rs_rects)?;
    let vs = stretch(v, s)?;
    let r_mod = Arc::new(rs.to_module());
    let g = v.grid();
    let comps = vs.grid().vertices().map(|y| cover.map.comp(g.index(&squash(&y, s)).unwrap()).clone()).collect();
    let ps = ModMorphism::new(r_mod, Arc::new(vs.clone()), comps)?;
    let plan = plan_with(&rs, 1, 0)?;
    let bx = plan.scaled.grid().clone();
    let (mut mods, mut maps) = realize(&plan_layers(&plan)?)?;
    let vp = vs.pad(&bx)?;
    maps.push(rebox(&ps, mods.last().unwrap(), &vp)?);
    mods.push(vp);
    stacked(mods, maps, -3, scaled_line(v.n(), s), v.grid())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Field;
    use crate::rect::{barcode_1d, barcode_of, canonical_hom_dim};
    use crate::verify::{end_algebra, end_dim, hom_dim, iso_certificate};

    const Q: Field = Field::Rationals;

    fn ivs(rs: &[(i64, i64)]) -> RectDecomp {
        RectDecomp::tight(Q, rs.iter().map(|&(b, d)| Rectangle::interval(b, d).unwrap()).collect()).unwrap()
    }

    #[test]
    fn shift_and_verticalize_example() {
        let v = ivs(&[(0, 2), (1, 3)]);
        let dp = separate_and_shift(&v).unwrap();
        assert_eq!(dp, vec![vec![10], vec![11]]);
        let (mu, bp) = verticalize(&v, &dp).unwrap();
        assert_eq!(mu, vec![6]);
        assert_eq!(bp, vec![vec![2], vec![1]]);
        assert_eq!(cone(&bp, &dp).unwrap(), Rectangle::interval(2, 11).unwrap());
    }

    #[test]
    fn shift_inequalities_hold() {
        let mut r = crate::sample::rng(3);
        for _ in 0..50 {
            let v = crate::sample::random_rects(Q, 2, 4, 5, &mut r);
            let dp = separate_and_shift(&v).unwrap();
            let rs = v.summands();
            for (i, di) in dp.iter().enumerate() {
                assert!(rs[i].d.iter().zip(di).all(|(a, b)| a <= b));
                for (j, dj) in dp.iter().enumerate() {
                    if i != j {
                        assert_ne!(di, dj);
                    }
                    for k in 0..2 {
                        assert_eq!((rs[j].b[k] + dj[k]).rem_euclid(2), 0);
                        assert!((rs[j].b[k] + dj[k]) / 2 <= di[k]);
                    }
                }
            }
            let (mu, bp) = verticalize(&v, &dp).unwrap();
            for i in 0..rs.len() {
                for j in 0..rs.len() {
                    for k in 0..2 {
                        assert!(rs[i].b[k] <= bp[i][k] && bp[i][k] <= mu[k] && mu[k] <= dp[j][k]);
                    }
                    if i != j {
                        let a = Rectangle::new(bp[i].clone(), dp[i].clone()).unwrap();
                        let b = Rectangle::new(bp[j].clone(), dp[j].clone()).unwrap();
                        assert_eq!(canonical_hom_dim(&a, &b).unwrap(), 0);
                    }
                }
            }
        }
    }

    #[test]
    fn parity_is_checked() {
        let v = ivs(&[(0, 1)]);
        assert!(matches!(verticalize(&v, &[vec![3]]), Err(Error::Parity(_))));
    }

    #[test]
    fn s_example() {
        let v = ivs(&[(0, 2), (1, 3)]);
        let b = build_s(&v).unwrap();
        assert_eq!(b.layer_count, 4);
        b.module.check().unwrap();
        assert_eq!(end_dim(&b.module).unwrap(), 1);
        assert_eq!(barcode_1d(&b.restriction().unwrap()).unwrap(), barcode_of(&v).unwrap());
    }

    fn point(n: usize) -> PersModule {
        RectDecomp::tight(Q, vec![Rectangle::new(vec![0; n], vec![0; n]).unwrap()]).unwrap().to_module()
    }

    #[test]
    fn point_module_constructions() {
        for build in [build_s_prime, build_s_dprime] {
            let b = build(&point(1)).unwrap();
            assert_eq!(b.layer_count, 5);
            b.module.check().unwrap();
            assert_eq!(end_dim(&b.module).unwrap(), 1);
            assert!(b.module.dims().iter().all(|&d| d <= 1));
            assert_eq!(b.restriction().unwrap(), point(1));
        }
    }

    #[test]
    fn rectangle_modules_through_covers() {
        let v = ivs(&[(0, 2), (1, 3), (1, 1)]);
        for build in [build_s_prime, build_s_dprime, candy_wrap] {
            let b = build(&v.to_module()).unwrap();
            b.module.check().unwrap();
            assert_eq!(end_dim(&b.module).unwrap(), 1);
            assert_eq!(b.restriction().unwrap(), v.to_module());
        }
    }

    #[test]
    fn zero_module_is_rejected() {
        let bx = GridBox::new(vec![0], vec![2]).unwrap();
        assert!(matches!(build_s_prime(&PersModule::zero(Q, bx)), Err(Error::Empty(_))));
    }

    #[test]
    fn candy_corners() {
        let v = ivs(&[(0, 1), (1, 2)]).to_module();
        let b = candy_wrap(&v).unwrap();
        assert_eq!(b.layer_count, 9);
        let c = CandyModule::new(b.module).unwrap();
        assert_eq!(c.module.dim(&c.ul), 1);
        assert_eq!(c.module.dim(&c.lr), 1);
        assert_eq!(c.ul[1], 4);
        assert_eq!(c.lr[1], -4);
    }

    #[test]
    fn concat_of_points() {
        let bx = GridBox::new(vec![0, 0], vec![0, 0]).unwrap();
        let k = RectDecomp::new(Q, bx, vec![Rectangle::new(vec![0, 0], vec![0, 0]).unwrap()]).unwrap().to_module();
        let a = CandyModule::new(k).unwrap();
        let c = concat(&a, &a).unwrap();
        c.module.check().unwrap();
        let support: Vec<Vec<i64>> =
            c.module.grid().vertices().filter(|v| c.module.dim(v) > 0).collect();
        assert_eq!(support, vec![vec![0, -1], vec![0, 0], vec![1, -1]]);
        assert!(c.module.map(&[0, -1], &[0, 0]).unwrap().is_identity());
        assert!(c.module.map(&[0, -1], &[1, -1]).unwrap().is_identity());
        assert_eq!(end_dim(&c.module).unwrap(), 1);
        assert_eq!(c.ul, vec![0, 0]);
        assert_eq!(c.lr, vec![1, -1]);
    }

    #[test]
    fn concat_in_three_dimensions() {
        let bx = GridBox::new(vec![0, 0], vec![1, 1]).unwrap();
        let v = crate::sample::module_with_dims(Q, bx, vec![1, 1, 0, 1], &mut crate::sample::rng(5));
        let a = CandyModule::new(candy_wrap(&v).unwrap().module).unwrap();
        let c = concat(&a, &a).unwrap();
        c.module.check().unwrap();
        assert_eq!(end_dim(&c.module).unwrap(), 1);
        assert_eq!(c.ul, a.ul);
    }

    #[test]
    fn strings_recover_inputs() {
        let mods = vec![ivs(&[(0, 1)]).to_module(), ivs(&[(0, 0), (2, 2)]).to_module()];
        let s = string_candies(&mods).unwrap();
        s.candy.module.check().unwrap();
        for (m, (line, dom)) in mods.iter().zip(&s.embeddings) {
            assert_eq!(&s.candy.module.restrict(line, dom).unwrap(), m);
        }
        assert_eq!(end_dim(&s.candy.module).unwrap(), 1);
    }

    #[test]
    fn min3_example() {
        let v = ivs(&[(0, 1), (1, 1)]);
        let plan = min3_plan(&v).unwrap();
        assert_eq!(plan.scale, 6);
        let sc: Vec<_> = plan.scaled.summands().iter().map(|r| (r.b[0], r.d[0])).collect();
        assert_eq!(sc, vec![(0, 6), (4, 8)]);
        let rf: Vec<_> = plan.refined.summands().iter().map(|r| (r.b[0], r.d[0])).collect();
        assert_eq!(rf, vec![(0, 9), (4, 8)]);
        assert_eq!(plan.cone, Rectangle::interval(4, 9).unwrap());
        let b = min3(&v).unwrap();
        assert_eq!(b.layer_count, 3);
        b.module.check().unwrap();
        assert_eq!(barcode_1d(&b.restriction().unwrap()).unwrap(), barcode_of(&v).unwrap());
        let alg = end_algebra(&b.module).unwrap();
        assert_eq!(alg.local_dim().unwrap(), 1);
        assert_eq!(alg.dim(), 1);
    }

    #[test]
    fn min3_end_can_exceed_one() {
        let v = ivs(&[(0, 1), (1, 2), (1, 2)]);
        let b = min3(&v).unwrap();
        let alg = end_algebra(&b.module).unwrap();
        assert_eq!(alg.dim(), 2);
        assert_eq!(alg.local_dim().unwrap(), 1);
    }

    #[test]
    fn min3_rect_refined_summands_are_orthogonal() {
        let v = RectDecomp::tight(
            Q,
            vec![Rectangle::new(vec![0, 0], vec![1, 1]).unwrap(), Rectangle::new(vec![1, 0], vec![2, 1]).unwrap()],
        )
        .unwrap();
        let plan = min3_plan(&v).unwrap();
        let rf = plan.refined.summands();
        assert_eq!(canonical_hom_dim(&rf[0], &rf[1]).unwrap(), 0);
        assert_eq!(canonical_hom_dim(&rf[1], &rf[0]).unwrap(), 0);
        let b = min3_rect(&v).unwrap();
        b.module.check().unwrap();
        assert_eq!(b.restriction().unwrap(), v.to_module());
        assert_eq!(end_algebra(&b.module).unwrap().local_dim().unwrap(), 1);
        let m = Arc::new(plan.refined.to_module());
        assert_eq!(hom_dim(&m, &m).unwrap(), 2);
    }

    #[test]
    fn gen4_point_and_general() {
        let b = gen4(&point(1)).unwrap();
        assert_eq!(b.layer_count, 4);
        b.module.check().unwrap();
        assert_eq!(end_algebra(&b.module).unwrap().local_dim().unwrap(), 1);
        let bx = GridBox::new(vec![0, 0], vec![1, 1]).unwrap();
        let v = crate::sample::module_with_dims(Q, bx, vec![1, 1, 1, 1], &mut crate::sample::rng(2));
        let b = gen4(&v).unwrap();
        b.module.check().unwrap();
        assert_eq!(end_algebra(&b.module).unwrap().local_dim().unwrap(), 1);
        assert!(iso_certificate(&b.restriction().unwrap(), &v, 0, 20).unwrap().is_some());
    }

    #[test]
    fn stretch_restricts_back() {
        let v = crate::sample::random_module(Q, &[3, 2], 2, 11);
        let s = stretch(&v, 3).unwrap();
        s.check().unwrap();
        let dom = v.grid().clone();
        for a in dom.vertices() {
            for b in dom.vertices() {
                if a.iter().zip(&b).all(|(x, y)| x <= y) {
                    let m = s.map(&[a[0] * 3 + 2, a[1]], &[b[0] * 3, b[1]]);
                    if a[0] < b[0] {
                        assert_eq!(m.unwrap(), v.map(&a, &b).unwrap());
                    }
                }
            }
        }
    }
}
