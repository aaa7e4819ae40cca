//! Rectangle modules, canonical homomorphisms between them, morphisms in
//! matrix form, and barcodes of 1D modules.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{GridBox, ModMorphism, PersModule};
use crate::linalg::{Field, Matrix};

/// `I[b, d]`: the field on the box `[b, d]` with identity maps inside.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rectangle {
    pub b: Vec<i64>,
    pub d: Vec<i64>,
}

impl Rectangle {
    pub fn new(b: Vec<i64>, d: Vec<i64>) -> Result<Self> {
        if b.len() != d.len() {
            return Err(Error::InvalidRectangle(format!("{b:?} and {d:?} differ in length")));
        }
        if b.iter().zip(&d).any(|(x, y)| x > y) {
            return Err(Error::InvalidRectangle(format!("{b:?} is not below {d:?}")));
        }
        Ok(Rectangle { b, d })
    }

    pub fn interval(b: i64, d: i64) -> Result<Self> {
        Rectangle::new(vec![b], vec![d])
    }

    pub fn n(&self) -> usize {
        self.b.len()
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        v.iter().zip(&self.b).zip(&self.d).all(|((x, b), d)| b <= x && x <= d)
    }

    /// `I[-d, -b]`, the image under the order-reversing symmetry of Z^n.
    pub fn negate(&self) -> Rectangle {
        Rectangle { b: self.d.iter().map(|x| -x).collect(), d: self.b.iter().map(|x| -x).collect() }
    }

    pub fn translate(&self, t: &[i64]) -> Rectangle {
        Rectangle {
            b: self.b.iter().zip(t).map(|(x, y)| x + y).collect(),
            d: self.d.iter().zip(t).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn as_box(&self) -> Result<GridBox> {
        GridBox::new(self.b.clone(), self.d.clone())
    }

    /// Whether the three rectangles share a point.
    fn meets(&self, o: &Rectangle, p: &Rectangle) -> bool {
        (0..self.n()).all(|k| self.b[k].max(o.b[k]).max(p.b[k]) <= self.d[k].min(o.d[k]).min(p.d[k]))
    }
}

/// Dimension (0 or 1) of `Hom(I[a], I[b])`: nonzero iff `b.b <= a.b <= b.d <= a.d`.
pub fn canonical_hom_dim(a: &Rectangle, b: &Rectangle) -> Result<usize> {
    if a.n() != b.n() {
        return Err(Error::Dimension { expected: a.n(), found: b.n() });
    }
    let ok = (0..a.n()).all(|k| b.b[k] <= a.b[k] && b.d[k] <= a.d[k] && a.b[k] <= b.d[k]);
    Ok(usize::from(ok))
}

fn has_hom(a: &Rectangle, b: &Rectangle) -> bool {
    canonical_hom_dim(a, b).unwrap_or(0) == 1
}

/// An ordered list of rectangle summands on a box.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RectDecomp {
    field: Field,
    bx: GridBox,
    summands: Vec<Rectangle>,
}

impl RectDecomp {
    pub fn new(field: Field, bx: GridBox, summands: Vec<Rectangle>) -> Result<Self> {
        for r in &summands {
            if r.n() != bx.n() || !bx.contains(&r.b) || !bx.contains(&r.d) {
                return Err(Error::InvalidRectangle(format!("{r:?} does not lie in the box")));
            }
        }
        Ok(RectDecomp { field, bx, summands })
    }

    /// Summands on their bounding box.
    pub fn tight(field: Field, summands: Vec<Rectangle>) -> Result<Self> {
        let first = summands.first().ok_or_else(|| Error::Empty("no rectangles".into()))?;
        let n = first.n();
        let mut lo = first.b.clone();
        let mut hi = first.d.clone();
        for r in &summands {
            if r.n() != n {
                return Err(Error::Dimension { expected: n, found: r.n() });
            }
            for k in 0..n {
                lo[k] = lo[k].min(r.b[k]);
                hi[k] = hi[k].max(r.d[k]);
            }
        }
        RectDecomp::new(field, GridBox::new(lo, hi)?, summands)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn grid(&self) -> &GridBox {
        &self.bx
    }

    pub fn summands(&self) -> &[Rectangle] {
        &self.summands
    }

    pub fn len(&self) -> usize {
        self.summands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.summands.is_empty()
    }

    pub fn with_box(&self, bx: GridBox) -> Result<Self> {
        RectDecomp::new(self.field, bx, self.summands.clone())
    }

    /// Summand indices containing `v`, in summand order; this is the basis order at `v`.
    pub fn at(&self, v: &[i64]) -> Vec<usize> {
        (0..self.summands.len()).filter(|&i| self.summands[i].contains(v)).collect()
    }

    pub fn to_module(&self) -> PersModule {
        let f = self.field;
        let members: Vec<Vec<usize>> = self.bx.vertices().map(|v| self.at(&v)).collect();
        let dims = members.iter().map(Vec::len).collect();
        PersModule::from_fn(f, self.bx.clone(), dims, |a, _, b| {
            let mut m = Matrix::zeros(f, members[b].len(), members[a].len());
            for (col, s) in members[a].iter().enumerate() {
                if let Some(row) = members[b].iter().position(|t| t == s) {
                    m[(row, col)] = f.one();
                }
            }
            Ok(m)
        })
        .expect("rectangle steps have matching shapes")
    }

    /// Reorder summands: the new summand `i` is the old summand `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<RectDecomp> {
        let mut seen = vec![false; self.len()];
        if perm.len() != self.len() || perm.iter().any(|&p| p >= self.len() || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::Precondition("not a permutation".into()));
        }
        RectDecomp::new(self.field, self.bx.clone(), perm.iter().map(|&p| self.summands[p].clone()).collect())
    }

    pub fn negate(&self) -> Result<RectDecomp> {
        let bx = GridBox::new(self.bx.hi().iter().map(|x| -x).collect(), self.bx.lo().iter().map(|x| -x).collect())?;
        RectDecomp::new(self.field, bx, self.summands.iter().map(Rectangle::negate).collect())
    }
}

/// A morphism between rectangle-decomposable modules: entry `(j, i)` scales
/// the canonical homomorphism from source summand `i` to target summand `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalMatrix {
    source: RectDecomp,
    target: RectDecomp,
    entries: Matrix,
}

impl FormalMatrix {
    pub fn new(source: RectDecomp, target: RectDecomp, entries: Matrix) -> Result<Self> {
        if source.bx != target.bx {
            return Err(Error::BoxMismatch("formal matrix between different boxes".into()));
        }
        if entries.shape() != (target.len(), source.len()) {
            return Err(Error::Shape(format!(
                "formal matrix is {}x{}, expected {}x{}",
                entries.rows(),
                entries.cols(),
                target.len(),
                source.len()
            )));
        }
        for j in 0..target.len() {
            for i in 0..source.len() {
                if !entries[(j, i)].is_zero() && !has_hom(&source.summands[i], &target.summands[j]) {
                    return Err(Error::NoCanonicalHom { row: j, col: i });
                }
            }
        }
        Ok(FormalMatrix { source, target, entries })
    }

    /// The identity on a decomposition.
    pub fn identity(r: &RectDecomp) -> Self {
        FormalMatrix { source: r.clone(), target: r.clone(), entries: Matrix::identity(r.field, r.len()) }
    }

    /// Ones on the diagonal (summand `i` to summand `i`).
    pub fn diagonal(source: &RectDecomp, target: &RectDecomp) -> Result<Self> {
        let f = source.field;
        let mut e = Matrix::zeros(f, target.len(), source.len());
        for i in 0..source.len().min(target.len()) {
            e[(i, i)] = f.one();
        }
        FormalMatrix::new(source.clone(), target.clone(), e)
    }

    /// All entries one.
    pub fn ones(source: &RectDecomp, target: &RectDecomp) -> Result<Self> {
        let f = source.field;
        let mut e = Matrix::zeros(f, target.len(), source.len());
        for j in 0..target.len() {
            for i in 0..source.len() {
                e[(j, i)] = f.one();
            }
        }
        FormalMatrix::new(source.clone(), target.clone(), e)
    }

    pub fn entries(&self) -> &Matrix {
        &self.entries
    }

    pub fn source(&self) -> &RectDecomp {
        &self.source
    }

    pub fn target(&self) -> &RectDecomp {
        &self.target
    }

    /// The natural transformation: at each vertex, entry `(j, i)` times the
    /// identity wherever both summands are nonzero.
    pub fn realize(&self) -> Result<ModMorphism> {
        self.realize_between(Arc::new(self.source.to_module()), Arc::new(self.target.to_module()))
    }

    /// As [`realize`](Self::realize), reusing already built end modules.
    pub fn realize_between(&self, s: Arc<PersModule>, t: Arc<PersModule>) -> Result<ModMorphism> {
        let f = self.source.field;
        let bx = &self.source.bx;
        let comps = bx
            .vertices()
            .map(|v| {
                let a = self.source.at(&v);
                let b = self.target.at(&v);
                let mut m = Matrix::zeros(f, b.len(), a.len());
                for (c, &i) in a.iter().enumerate() {
                    for (r, &j) in b.iter().enumerate() {
                        m[(r, c)] = self.entries[(j, i)].clone();
                    }
                }
                m
            })
            .collect();
        ModMorphism::new(s, t, comps)
    }

    /// `other ∘ self`, dropping composites of canonical homs that vanish.
    pub fn then(&self, other: &FormalMatrix) -> Result<FormalMatrix> {
        if other.source != self.target {
            return Err(Error::Shape("formal matrices do not compose".into()));
        }
        let f = self.source.field;
        let (a, b, c) = (&self.source.summands, &self.target.summands, &other.target.summands);
        let mut e = Matrix::zeros(f, c.len(), a.len());
        for k in 0..c.len() {
            for i in 0..a.len() {
                let mut acc = f.zero();
                for j in 0..b.len() {
                    if a[i].meets(&b[j], &c[k]) {
                        acc.add_mul_assign(&other.entries[(k, j)], &self.entries[(j, i)]);
                    }
                }
                e[(k, i)] = acc;
            }
        }
        FormalMatrix::new(self.source.clone(), other.target.clone(), e)
    }
}

/// Interval multiplicities `[b, d] -> count`.
pub type Barcode = BTreeMap<(i64, i64), usize>;

/// Prefix products `P[x][t] = M(x -> x + t)` for a 1D module.
fn line_maps(m: &PersModule) -> Vec<Vec<Matrix>> {
    let len = m.grid().len();
    (0..len)
        .map(|x| {
            let mut out = vec![Matrix::identity(m.field(), m.dim_at(x))];
            for y in x..len - 1 {
                let next = m.step_at(y, 0).unwrap() * out.last().unwrap();
                out.push(next);
            }
            out
        })
        .collect()
}

/// Barcode of a 1D module by rank inclusion–exclusion.
pub fn barcode_1d(m: &PersModule) -> Result<Barcode> {
    if m.n() != 1 {
        return Err(Error::Dimension { expected: 1, found: m.n() });
    }
    let lo = m.grid().lo()[0];
    let len = m.grid().len();
    let maps = line_maps(m);
    let ranks: Vec<Vec<usize>> = maps.iter().map(|row| row.iter().map(Matrix::rank).collect()).collect();
    let r = |x: i64, y: i64| -> i64 {
        if x < 0 || y >= len as i64 || x > y {
            0
        } else {
            ranks[x as usize][(y - x) as usize] as i64
        }
    };
    let mut out = Barcode::new();
    for b in 0..len as i64 {
        for d in b..len as i64 {
            let mult = r(b, d) - r(b - 1, d) - r(b, d + 1) + r(b - 1, d + 1);
            debug_assert!(mult >= 0);
            if mult > 0 {
                out.insert((b + lo, d + lo), mult as usize);
            }
        }
    }
    Ok(out)
}

/// Multiset of rectangles as a barcode (1D only).
pub fn barcode_of(r: &RectDecomp) -> Result<Barcode> {
    let mut out = Barcode::new();
    for s in &r.summands {
        if s.n() != 1 {
            return Err(Error::Dimension { expected: 1, found: s.n() });
        }
        *out.entry((s.b[0], s.d[0])).or_default() += 1;
    }
    Ok(out)
}

/// A basis of every space of a 1D module in which each basis vector maps to
/// the next vertex's vector of the same interval, or to zero at its death.
#[derive(Clone, Debug)]
pub struct IntervalBasis {
    /// Interval of each basis vector, in the order the vectors were created.
    pub intervals: Vec<(i64, i64)>,
    /// Per vertex index: basis matrix (columns) and the interval id of each column.
    pub bases: Vec<(Matrix, Vec<usize>)>,
}

/// Compute an interval basis left to right: at each vertex, push forward the
/// surviving vectors, then extend by new vectors adapted to the kernel flag
/// `ker M(x -> x+1) ⊆ ker M(x -> x+2) ⊆ …`.
pub fn interval_basis(m: &PersModule) -> Result<IntervalBasis> {
    if m.n() != 1 {
        return Err(Error::Dimension { expected: 1, found: m.n() });
    }
    let f = m.field();
    let lo = m.grid().lo()[0];
    let len = m.grid().len();
    let maps = line_maps(m);
    let mut intervals: Vec<(i64, i64)> = Vec::new();
    let mut bases: Vec<(Matrix, Vec<usize>)> = Vec::with_capacity(len);
    for x in 0..len {
        let d = m.dim_at(x);
        // vectors carried from x - 1
        let (mut basis, mut ids) = match x.checked_sub(1) {
            Some(p) => {
                let (pb, pids) = &bases[p];
                let img = m.step_at(p, 0).unwrap() * pb;
                let keep: Vec<usize> = (0..pids.len()).filter(|&c| intervals[pids[c]].1 >= x as i64 + lo).collect();
                (img.select_cols(&keep), keep.iter().map(|&c| pids[c]).collect::<Vec<_>>())
            }
            None => (Matrix::zeros(f, d, 0), Vec::new()),
        };
        // kernel flag: ker_t = ker M(x -> x + t), with everything dying past the box
        for t in 1..=len - x {
            if basis.cols() == d {
                break;
            }
            let ker = if x + t < len { maps[x][t].nullspace() } else { Matrix::identity(f, d) };
            let (own, _) = basis.hstack(&ker)?.basis_extension();
            let w = basis.cols();
            for c in own.into_iter().filter(|&c| c >= w) {
                let v = Matrix::column(f, ker.col(c - w));
                let death = lo + (x + t - 1) as i64;
                intervals.push((lo + x as i64, death));
                ids.push(intervals.len() - 1);
                basis = basis.hstack(&v)?;
            }
        }
        if basis.cols() != d {
            return Err(Error::Internal("interval basis does not span".into()));
        }
        bases.push((basis, ids));
    }
    Ok(IntervalBasis { intervals, bases })
}

impl IntervalBasis {
    pub fn barcode(&self) -> Barcode {
        let mut out = Barcode::new();
        for &iv in &self.intervals {
            *out.entry(iv).or_default() += 1;
        }
        out
    }
}

/// Isomorphism between 1D modules with equal barcodes, built from interval bases.
pub fn interval_iso(m: &Arc<PersModule>, n: &Arc<PersModule>) -> Result<Option<ModMorphism>> {
    if m.grid() != n.grid() || m.field() != n.field() {
        return Err(Error::BoxMismatch("iso between modules on different boxes".into()));
    }
    let bm = interval_basis(m)?;
    let bn = interval_basis(n)?;
    if bm.barcode() != bn.barcode() {
        return Ok(None);
    }
    // pair intervals of equal type in creation order
    let mut pool: BTreeMap<(i64, i64), Vec<usize>> = BTreeMap::new();
    for (id, iv) in bn.intervals.iter().enumerate() {
        pool.entry(*iv).or_default().push(id);
    }
    let mut partner = vec![0usize; bm.intervals.len()];
    for (id, iv) in bm.intervals.iter().enumerate() {
        let list = pool.get_mut(iv).expect("same barcode");
        partner[id] = list.remove(0);
    }
    let mut comps = Vec::with_capacity(m.grid().len());
    for x in 0..m.grid().len() {
        let (mb, mids) = &bm.bases[x];
        let (nb, nids) = &bn.bases[x];
        let order: Vec<usize> =
            mids.iter().map(|id| nids.iter().position(|t| *t == partner[*id]).expect("partner present")).collect();
        comps.push(&nb.select_cols(&order) * &mb.inverse()?);
    }
    ModMorphism::new(m.clone(), n.clone(), comps).map(Some)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::hom_basis;
    use proptest::prelude::*;

    const Q: Field = Field::Rationals;

    fn r(b: &[i64], d: &[i64]) -> Rectangle {
        Rectangle::new(b.to_vec(), d.to_vec()).unwrap()
    }

    fn decomp(lo: i64, hi: i64, ivs: &[(i64, i64)]) -> RectDecomp {
        let bx = GridBox::new(vec![lo], vec![hi]).unwrap();
        RectDecomp::new(Q, bx, ivs.iter().map(|&(b, d)| r(&[b], &[d])).collect()).unwrap()
    }

    #[test]
    fn rectangle_modules() {
        let m = decomp(0, 2, &[(0, 2)]).to_module();
        assert_eq!(m.dims(), &[1, 1, 1]);
        assert!(m.step(&[0], 0).unwrap().is_identity() && m.step(&[1], 0).unwrap().is_identity());
        let m = decomp(0, 1, &[(0, 0), (1, 1)]).to_module();
        assert_eq!(m.dims(), &[1, 1]);
        assert!(m.step(&[0], 0).unwrap().is_zero());
        let bx = GridBox::new(vec![0, 0], vec![1, 1]).unwrap();
        let sq = RectDecomp::new(Q, bx, vec![r(&[0, 0], &[1, 1])]).unwrap().to_module();
        assert_eq!(sq.dims(), &[1, 1, 1, 1]);
        assert!(sq.validate().is_ok());
    }

    #[test]
    fn hom_dims() {
        assert_eq!(canonical_hom_dim(&r(&[1], &[3]), &r(&[0], &[2])).unwrap(), 1);
        assert_eq!(canonical_hom_dim(&r(&[0], &[2]), &r(&[1], &[3])).unwrap(), 0);
        assert_eq!(canonical_hom_dim(&r(&[0, 0], &[2, 2]), &r(&[0, 0], &[1, 1])).unwrap(), 1);
        assert!(canonical_hom_dim(&r(&[0], &[1]), &r(&[0, 0], &[1, 1])).is_err());
    }

    #[test]
    fn realize_single_entry() {
        let s = decomp(0, 3, &[(1, 3)]);
        let t = decomp(0, 3, &[(0, 2)]);
        let f = FormalMatrix::new(s.clone(), t.clone(), Matrix::identity(Q, 1)).unwrap().realize().unwrap();
        let nonzero: Vec<bool> = f.comps().iter().map(|c| !c.is_zero()).collect();
        assert_eq!(nonzero, vec![false, true, true, false]);
        assert!(FormalMatrix::new(t, s, Matrix::identity(Q, 1)).is_err());
    }

    #[test]
    fn realize_identity() {
        let d = decomp(0, 4, &[(0, 2), (1, 4), (1, 4)]);
        let id = FormalMatrix::identity(&d).realize().unwrap();
        assert_eq!(id, ModMorphism::identity(Arc::new(d.to_module())));
    }

    #[test]
    fn barcode_examples() {
        let m = decomp(0, 1, &[(0, 1)]).to_module();
        assert_eq!(barcode_1d(&m).unwrap(), Barcode::from([((0, 1), 1)]));
        let m = decomp(0, 1, &[(0, 0), (1, 1)]).to_module();
        assert_eq!(barcode_1d(&m).unwrap(), Barcode::from([((0, 0), 1), ((1, 1), 1)]));
        let bx = GridBox::new(vec![0], vec![2]).unwrap();
        let m = PersModule::new(
            Q,
            bx,
            vec![1, 2, 1],
            vec![
                (vec![0], 0, Matrix::from_i64(Q, &[vec![1], vec![0]])),
                (vec![1], 0, Matrix::from_i64(Q, &[vec![0, 1]])),
            ],
        )
        .unwrap();
        assert_eq!(barcode_1d(&m).unwrap(), Barcode::from([((0, 1), 1), ((1, 2), 1)]));
        assert_eq!(interval_basis(&m).unwrap().barcode(), barcode_1d(&m).unwrap());
    }

    #[test]
    fn square_hom_matches_naturality_solver() {
        let bx = GridBox::new(vec![0, 0], vec![2, 2]).unwrap();
        let a = RectDecomp::new(Q, bx.clone(), vec![r(&[0, 0], &[2, 2])]).unwrap().to_module();
        let b = RectDecomp::new(Q, bx, vec![r(&[0, 0], &[1, 1])]).unwrap().to_module();
        assert_eq!(hom_basis(&a, &b).unwrap().len(), 1);
        assert_eq!(hom_basis(&b, &a).unwrap().len(), 0);
    }

    fn arb_rect(n: usize) -> impl Strategy<Value = Rectangle> {
        proptest::collection::vec((0i64..4, 0i64..3), n)
            .prop_map(|v| Rectangle::new(v.iter().map(|p| p.0).collect(), v.iter().map(|p| p.0 + p.1).collect()).unwrap())
    }

    fn arb_decomp(n: usize) -> impl Strategy<Value = RectDecomp> {
        proptest::collection::vec(arb_rect(n), 1..5).prop_map(move |rs| {
            let bx = GridBox::new(vec![0; n], vec![6; n]).unwrap();
            RectDecomp::new(Q, bx, rs).unwrap()
        })
    }

    proptest! {
        #[test]
        fn barcode_recovers_intervals(d in arb_decomp(1)) {
            let m = d.to_module();
            prop_assert_eq!(barcode_1d(&m).unwrap(), barcode_of(&d).unwrap());
            prop_assert_eq!(interval_basis(&m).unwrap().barcode(), barcode_of(&d).unwrap());
        }

        #[test]
        fn hom_relation_is_a_partial_order_on_rectangles(a in arb_rect(2), b in arb_rect(2), c in arb_rect(2)) {
            prop_assert_eq!(canonical_hom_dim(&a, &a).unwrap(), 1);
            if a != b {
                prop_assert!(!(has_hom(&a, &b) && has_hom(&b, &a)));
            }
            if a != b && b != c && a != c && has_hom(&a, &b) && has_hom(&b, &c) {
                prop_assert!(!has_hom(&c, &a));
            }
        }

        #[test]
        fn canonical_hom_dim_matches_hom_basis(a in arb_rect(2), b in arb_rect(2)) {
            let bx = GridBox::new(vec![0, 0], vec![6, 6]).unwrap();
            let ma = RectDecomp::new(Q, bx.clone(), vec![a.clone()]).unwrap().to_module();
            let mb = RectDecomp::new(Q, bx, vec![b.clone()]).unwrap().to_module();
            prop_assert_eq!(hom_basis(&ma, &mb).unwrap().len(), canonical_hom_dim(&a, &b).unwrap());
        }

        #[test]
        fn formal_product_realizes_composition(d in arb_decomp(1), seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let random_formal = |s: &RectDecomp, t: &RectDecomp, rng: &mut rand_chacha::ChaCha8Rng| {
                let mut e = Matrix::zeros(Q, t.len(), s.len());
                for j in 0..t.len() {
                    for i in 0..s.len() {
                        if has_hom(&s.summands[i], &t.summands[j]) {
                            e[(j, i)] = Q.from_i64(rng.gen_range(-2..3));
                        }
                    }
                }
                FormalMatrix::new(s.clone(), t.clone(), e).unwrap()
            };
            let perm: Vec<usize> = (0..d.len()).rev().collect();
            let mid = d.permuted(&perm).unwrap();
            let f = random_formal(&d, &mid, &mut rng);
            let g = random_formal(&mid, &d, &mut rng);
            let fg = f.then(&g).unwrap().realize().unwrap();
            let composed = f.realize().unwrap().then(&g.realize().unwrap()).unwrap();
            prop_assert_eq!(fg, composed);
        }
    }
}
