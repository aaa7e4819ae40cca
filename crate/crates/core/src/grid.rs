//! Persistence modules on finite boxes of Z^n, their morphisms, restriction
//! along hyperplanes, zero padding and stacking.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{Field, Matrix};

/// Vertex cap used when `PMOD_MAX_VERTICES` is unset or unparsable.
pub const DEFAULT_MAX_VERTICES: usize = 100_000;

pub fn max_vertices() -> usize {
    std::env::var("PMOD_MAX_VERTICES")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_VERTICES)
}

/// A box `[lo, hi]` of Z^n. Vertices are ordered lexicographically with the
/// last axis varying fastest.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GridBox {
    lo: Vec<i64>,
    hi: Vec<i64>,
    strides: Vec<usize>,
    len: usize,
}

impl GridBox {
    pub fn new(lo: Vec<i64>, hi: Vec<i64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::InvalidBox(format!("lo has {} coordinates, hi has {}", lo.len(), hi.len())));
        }
        if let Some(k) = (0..lo.len()).find(|&k| lo[k] > hi[k]) {
            return Err(Error::InvalidBox(format!("lo > hi on axis {k}")));
        }
        let cap = max_vertices();
        let mut count: u128 = 1;
        for k in 0..lo.len() {
            count = count.saturating_mul((hi[k] as i128 - lo[k] as i128 + 1) as u128);
        }
        if count > cap as u128 {
            return Err(Error::TooManyVertices { count, cap });
        }
        let n = lo.len();
        let mut strides = vec![1usize; n];
        for k in (0..n.saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * (hi[k + 1] - lo[k + 1] + 1) as usize;
        }
        Ok(GridBox { lo, hi, strides, len: count as usize })
    }

    pub fn n(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[i64] {
        &self.lo
    }

    pub fn hi(&self) -> &[i64] {
        &self.hi
    }

    /// Number of vertices.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn extent(&self, k: usize) -> usize {
        (self.hi[k] - self.lo[k] + 1) as usize
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        v.len() == self.n() && (0..self.n()).all(|k| self.lo[k] <= v[k] && v[k] <= self.hi[k])
    }

    pub fn contains_box(&self, o: &GridBox) -> bool {
        o.n() == self.n() && self.contains(&o.lo) && self.contains(&o.hi)
    }

    pub fn index(&self, v: &[i64]) -> Option<usize> {
        if !self.contains(v) {
            return None;
        }
        Some((0..self.n()).map(|k| (v[k] - self.lo[k]) as usize * self.strides[k]).sum())
    }

    pub fn vertex(&self, mut idx: usize) -> Vec<i64> {
        let mut v = vec![0; self.n()];
        for k in 0..self.n() {
            v[k] = self.lo[k] + (idx / self.strides[k]) as i64;
            idx %= self.strides[k];
        }
        v
    }

    /// Index of `v + e_k`, if inside the box.
    pub fn up(&self, idx: usize, k: usize) -> Option<usize> {
        let c = (idx / self.strides[k]) % self.extent(k);
        (c + 1 < self.extent(k)).then(|| idx + self.strides[k])
    }

    /// Index of `v - e_k`, if inside the box.
    pub fn down(&self, idx: usize, k: usize) -> Option<usize> {
        let c = (idx / self.strides[k]) % self.extent(k);
        (c > 0).then(|| idx - self.strides[k])
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        (0..self.len).map(|i| self.vertex(i))
    }

    /// Smallest box containing both.
    pub fn hull(&self, o: &GridBox) -> Result<GridBox> {
        if self.n() != o.n() {
            return Err(Error::BoxMismatch(format!("{}D vs {}D", self.n(), o.n())));
        }
        let lo = (0..self.n()).map(|k| self.lo[k].min(o.lo[k])).collect();
        let hi = (0..self.n()).map(|k| self.hi[k].max(o.hi[k])).collect();
        GridBox::new(lo, hi)
    }

    pub fn translate(&self, t: &[i64]) -> Result<GridBox> {
        GridBox::new(
            self.lo.iter().zip(t).map(|(a, b)| a + b).collect(),
            self.hi.iter().zip(t).map(|(a, b)| a + b).collect(),
        )
    }

    /// The box with one more axis, spanning `[lo, hi]` there, inserted at `pos`.
    pub fn insert_axis(&self, pos: usize, lo: i64, hi: i64) -> Result<GridBox> {
        let mut l = self.lo.clone();
        let mut h = self.hi.clone();
        l.insert(pos, lo);
        h.insert(pos, hi);
        GridBox::new(l, h)
    }
}

/// A persistence module confined to a box: a vector space dimension at each
/// vertex and a matrix for each unit step `v -> v + e_k` inside the box.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PersModule {
    field: Field,
    bx: GridBox,
    dims: Vec<usize>,
    // steps[idx * n + k], None when v + e_k leaves the box
    steps: Vec<Option<Matrix>>,
}

/// The first commutativity square that fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub vertex: Vec<i64>,
    pub axes: (usize, usize),
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "square at {:?} on axes {} and {} does not commute", self.vertex, self.axes.0, self.axes.1)
    }
}

impl PersModule {
    pub fn zero(field: Field, bx: GridBox) -> Self {
        let n = bx.n();
        let len = bx.len();
        let mut steps = Vec::with_capacity(len * n);
        for idx in 0..len {
            for k in 0..n {
                steps.push(bx.up(idx, k).map(|_| Matrix::zeros(field, 0, 0)));
            }
        }
        PersModule { field, bx, dims: vec![0; len], steps }
    }

    /// Build from dims and a closure giving each unit step; shapes are checked,
    /// commutativity is not (see [`PersModule::validate`]).
    pub fn from_fn(
        field: Field,
        bx: GridBox,
        dims: Vec<usize>,
        mut step: impl FnMut(usize, usize, usize) -> Result<Matrix>,
    ) -> Result<Self> {
        if dims.len() != bx.len() {
            return Err(Error::Dimension { expected: bx.len(), found: dims.len() });
        }
        let n = bx.n();
        let mut steps = Vec::with_capacity(bx.len() * n);
        for idx in 0..bx.len() {
            for k in 0..n {
                match bx.up(idx, k) {
                    None => steps.push(None),
                    Some(j) => {
                        let m = if dims[idx] == 0 || dims[j] == 0 {
                            Matrix::zeros(field, dims[j], dims[idx])
                        } else {
                            step(idx, k, j)?
                        };
                        check_shape(&m, field, dims[j], dims[idx], &bx.vertex(idx), k)?;
                        steps.push(Some(m));
                    }
                }
            }
        }
        Ok(PersModule { field, bx, dims, steps })
    }

    /// Build from explicit steps keyed by `(vertex, axis)`. Steps touching a
    /// zero-dimensional vertex may be omitted; any other omission is an error.
    pub fn new(field: Field, bx: GridBox, dims: Vec<usize>, given: Vec<(Vec<i64>, usize, Matrix)>) -> Result<Self> {
        let n = bx.n();
        let mut table: Vec<Option<Matrix>> = vec![None; bx.len() * n];
        for (v, k, m) in given {
            if k >= n {
                return Err(Error::Shape(format!("axis {k} out of range for a {n}D box")));
            }
            let idx = bx.index(&v).ok_or_else(|| Error::Shape(format!("step source {v:?} outside box")))?;
            if bx.up(idx, k).is_none() {
                return Err(Error::Shape(format!("step from {v:?} along axis {k} leaves the box")));
            }
            if table[idx * n + k].replace(m).is_some() {
                return Err(Error::Shape(format!("duplicate step at {v:?} axis {k}")));
            }
        }
        PersModule::from_fn(field, bx.clone(), dims, |idx, k, _| {
            table[idx * n + k]
                .take()
                .ok_or_else(|| Error::Shape(format!("missing step at {:?} axis {k}", bx.vertex(idx))))
        })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn grid(&self) -> &GridBox {
        &self.bx
    }

    pub fn n(&self) -> usize {
        self.bx.n()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim_at(&self, idx: usize) -> usize {
        self.dims[idx]
    }

    /// Dimension at a vertex; zero outside the box.
    pub fn dim(&self, v: &[i64]) -> usize {
        self.bx.index(v).map_or(0, |i| self.dims[i])
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.dims.iter().all(|&d| d == 0)
    }

    pub fn step_at(&self, idx: usize, k: usize) -> Option<&Matrix> {
        self.steps[idx * self.n() + k].as_ref()
    }

    pub fn step(&self, v: &[i64], k: usize) -> Option<&Matrix> {
        self.bx.index(v).and_then(|i| self.step_at(i, k))
    }

    /// All steps as `(vertex, axis, matrix)` in vertex order.
    pub fn steps(&self) -> impl Iterator<Item = (Vec<i64>, usize, &Matrix)> + '_ {
        let n = self.n();
        self.steps
            .iter()
            .enumerate()
            .filter_map(move |(i, m)| m.as_ref().map(|m| (self.bx.vertex(i / n), i % n, m)))
    }

    /// The internal map `M(x <= y)`, composed along the lexicographically
    /// smallest monotone path (last axis first). Zero if either end lies outside the box.
    pub fn map(&self, x: &[i64], y: &[i64]) -> Result<Matrix> {
        if x.len() != self.n() || y.len() != self.n() || (0..self.n()).any(|k| x[k] > y[k]) {
            return Err(Error::Precondition(format!("{x:?} is not below {y:?}")));
        }
        let (Some(mut idx), Some(_)) = (self.bx.index(x), self.bx.index(y)) else {
            return Ok(Matrix::zeros(self.field, self.dim(y), self.dim(x)));
        };
        let mut acc = Matrix::identity(self.field, self.dims[idx]);
        for k in (0..self.n()).rev() {
            for _ in x[k]..y[k] {
                let next = self.bx.up(idx, k).expect("inside box");
                acc = self.step_at(idx, k).expect("inside box") * &acc;
                idx = next;
            }
        }
        Ok(acc)
    }

    /// Check every commutativity square; returns the first failure in vertex order.
    pub fn validate(&self) -> std::result::Result<(), Violation> {
        let n = self.n();
        for idx in 0..self.bx.len() {
            for j in 0..n {
                let Some(a) = self.bx.up(idx, j) else { continue };
                for k in j + 1..n {
                    let Some(b) = self.bx.up(idx, k) else { continue };
                    let top = self.bx.up(a, k).expect("box is convex");
                    if self.dims[idx] == 0 || self.dims[top] == 0 {
                        continue;
                    }
                    let left = self.step_at(a, k).unwrap() * self.step_at(idx, j).unwrap();
                    let right = self.step_at(b, j).unwrap() * self.step_at(idx, k).unwrap();
                    if left != right {
                        return Err(Violation { vertex: self.bx.vertex(idx), axes: (j, k) });
                    }
                }
            }
        }
        Ok(())
    }

    /// `validate` reported as an error.
    pub fn check(&self) -> Result<()> {
        self.validate().map_err(|v| Error::NotCommutative(v.to_string()))
    }

    /// Pull back along a hyperplane embedding over `domain`.
    ///
    /// Only one target coordinate moves along each source axis, so every
    /// restricted step is a straight run of unit steps.
    pub fn restrict(&self, line: &AxisEmbedding, domain: &GridBox) -> Result<PersModule> {
        if line.n() + 1 != self.n() || domain.n() != line.n() {
            return Err(Error::InvalidEmbedding(format!(
                "embedding {}D -> {}D over a {}D domain into a {}D module",
                line.n(),
                line.n() + 1,
                domain.n(),
                self.n()
            )));
        }
        let mut images = Vec::with_capacity(domain.len());
        for x in domain.vertices() {
            let y = line.apply(&x).ok_or_else(|| Error::ImageEscapesBox(format!("{x:?} outside the embedding table")))?;
            let idx = self.bx.index(&y).ok_or_else(|| Error::ImageEscapesBox(format!("{x:?} maps to {y:?}")))?;
            images.push((y, idx));
        }
        let dims = images.iter().map(|(_, i)| self.dims[*i]).collect();
        PersModule::from_fn(self.field, domain.clone(), dims, |a, _, b| self.map(&images[a].0, &images[b].0))
    }

    /// The layer at height `c` of the last axis, as an nD module.
    pub fn layer(&self, c: i64) -> Result<PersModule> {
        let n = self.n();
        if n == 0 {
            return Err(Error::InvalidEmbedding("a 0D module has no layers".into()));
        }
        let line = AxisEmbedding::layer(n - 1, c);
        let domain = GridBox::new(self.bx.lo[..n - 1].to_vec(), self.bx.hi[..n - 1].to_vec())?;
        self.restrict(&line, &domain)
    }

    /// Extend by zero spaces and zero maps to a larger box.
    pub fn pad(&self, target: &GridBox) -> Result<PersModule> {
        if !target.contains_box(&self.bx) {
            return Err(Error::BoxMismatch("target box does not contain the module's box".into()));
        }
        let idx_of: Vec<Option<usize>> = target.vertices().map(|v| self.bx.index(&v)).collect();
        let dims = idx_of.iter().map(|i| i.map_or(0, |i| self.dims[i])).collect();
        PersModule::from_fn(self.field, target.clone(), dims, |a, k, _| {
            let i = idx_of[a].expect("nonzero dims lie in the old box");
            self.step_at(i, k)
                .cloned()
                .ok_or_else(|| Error::Internal("padding step crosses the old box".into()))
        })
    }

    /// Restrict to a sub-box of the same dimension.
    pub fn crop(&self, sub: &GridBox) -> Result<PersModule> {
        if !self.bx.contains_box(sub) {
            return Err(Error::BoxMismatch("crop box is not inside the module's box".into()));
        }
        let idx_of: Vec<usize> = sub.vertices().map(|v| self.bx.index(&v).unwrap()).collect();
        let dims = idx_of.iter().map(|&i| self.dims[i]).collect();
        PersModule::from_fn(self.field, sub.clone(), dims, |a, k, _| Ok(self.step_at(idx_of[a], k).unwrap().clone()))
    }

    pub fn translate(&self, t: &[i64]) -> Result<PersModule> {
        let bx = self.bx.translate(t)?;
        Ok(PersModule { field: self.field, bx, dims: self.dims.clone(), steps: self.steps.clone() })
    }

    /// Smallest box holding every nonzero vertex, or `None` for the zero module.
    pub fn support_bounds(&self) -> Option<GridBox> {
        let n = self.n();
        let mut lo: Option<Vec<i64>> = None;
        let mut hi: Vec<i64> = Vec::new();
        for (idx, &d) in self.dims.iter().enumerate() {
            if d == 0 {
                continue;
            }
            let v = self.bx.vertex(idx);
            match &mut lo {
                None => {
                    lo = Some(v.clone());
                    hi = v;
                }
                Some(l) => {
                    for k in 0..n {
                        l[k] = l[k].min(v[k]);
                        hi[k] = hi[k].max(v[k]);
                    }
                }
            }
        }
        lo.map(|l| GridBox::new(l, hi).expect("sub-box of a valid box"))
    }

    pub fn direct_sum(&self, o: &PersModule) -> Result<PersModule> {
        if self.field != o.field {
            return Err(Error::FieldMismatch(format!("{} vs {}", self.field, o.field)));
        }
        if self.bx != o.bx {
            return Err(Error::BoxMismatch("direct sum of modules on different boxes".into()));
        }
        let dims = self.dims.iter().zip(&o.dims).map(|(a, b)| a + b).collect();
        PersModule::from_fn(self.field, self.bx.clone(), dims, |a, k, _| {
            Ok(self.step_at(a, k).unwrap().block_diag(o.step_at(a, k).unwrap()))
        })
    }

    /// Stack `layers[i]` at height `base + i` of a new last axis, joined by `links[i]: layers[i] -> layers[i+1]`.
    pub fn stack_at(layers: &[PersModule], links: &[ModMorphism], base: i64) -> Result<PersModule> {
        let first = layers.first().ok_or_else(|| Error::Empty("no layers to stack".into()))?;
        if links.len() + 1 != layers.len() {
            return Err(Error::Shape(format!("{} layers need {} links, got {}", layers.len(), layers.len() - 1, links.len())));
        }
        for l in layers {
            if l.field != first.field {
                return Err(Error::FieldMismatch("layers over different fields".into()));
            }
            if l.bx != first.bx {
                return Err(Error::BoxMismatch("layers on different boxes".into()));
            }
        }
        for (i, f) in links.iter().enumerate() {
            if **f.source() != layers[i] || **f.target() != layers[i + 1] {
                return Err(Error::Shape(format!("link {i} does not join layers {i} and {}", i + 1)));
            }
        }
        let n = first.n();
        let bx = first.bx.insert_axis(n, base, base + layers.len() as i64 - 1)?;
        let h = layers.len();
        let dims = (0..bx.len()).map(|idx| layers[idx % h].dims[idx / h]).collect();
        PersModule::from_fn(first.field, bx, dims, |idx, k, _| {
            let (v, layer) = (idx / h, idx % h);
            Ok(if k == n { links[layer].comp(v).clone() } else { layers[layer].step_at(v, k).unwrap().clone() })
        })
    }

    pub fn stack(layers: &[PersModule], links: &[ModMorphism]) -> Result<PersModule> {
        PersModule::stack_at(layers, links, 0)
    }
}

fn check_shape(m: &Matrix, field: Field, rows: usize, cols: usize, v: &[i64], k: usize) -> Result<()> {
    if m.field() != field {
        return Err(Error::FieldMismatch(format!("step at {v:?} axis {k} is over {}", m.field())));
    }
    if m.shape() != (rows, cols) {
        return Err(Error::Shape(format!(
            "step at {v:?} axis {k} is {}x{}, expected {rows}x{cols}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

/// A natural transformation between two modules on the same box.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModMorphism {
    source: Arc<PersModule>,
    target: Arc<PersModule>,
    comps: Vec<Matrix>,
}

impl ModMorphism {
    /// Checks shapes and naturality.
    pub fn new(source: Arc<PersModule>, target: Arc<PersModule>, comps: Vec<Matrix>) -> Result<Self> {
        let f = ModMorphism::new_unchecked(source, target, comps)?;
        f.check_natural()?;
        Ok(f)
    }

    /// Checks shapes only.
    pub fn new_unchecked(source: Arc<PersModule>, target: Arc<PersModule>, comps: Vec<Matrix>) -> Result<Self> {
        if source.field != target.field {
            return Err(Error::FieldMismatch("morphism between modules over different fields".into()));
        }
        if source.bx != target.bx {
            return Err(Error::BoxMismatch("morphism between modules on different boxes".into()));
        }
        if comps.len() != source.bx.len() {
            return Err(Error::Dimension { expected: source.bx.len(), found: comps.len() });
        }
        for (idx, c) in comps.iter().enumerate() {
            if c.shape() != (target.dims[idx], source.dims[idx]) || c.field() != source.field {
                return Err(Error::Shape(format!(
                    "component at {:?} is {}x{}, expected {}x{}",
                    source.bx.vertex(idx),
                    c.rows(),
                    c.cols(),
                    target.dims[idx],
                    source.dims[idx]
                )));
            }
        }
        Ok(ModMorphism { source, target, comps })
    }

    pub fn identity(m: Arc<PersModule>) -> Self {
        let comps = m.dims.iter().map(|&d| Matrix::identity(m.field, d)).collect();
        ModMorphism { source: m.clone(), target: m, comps }
    }

    pub fn zero(source: Arc<PersModule>, target: Arc<PersModule>) -> Result<Self> {
        let comps = (0..source.bx.len())
            .map(|i| Matrix::zeros(source.field, target.dims.get(i).copied().unwrap_or(0), source.dims[i]))
            .collect();
        ModMorphism::new_unchecked(source, target, comps)
    }

    pub fn source(&self) -> &Arc<PersModule> {
        &self.source
    }

    pub fn target(&self) -> &Arc<PersModule> {
        &self.target
    }

    pub fn comps(&self) -> &[Matrix] {
        &self.comps
    }

    pub fn comp(&self, idx: usize) -> &Matrix {
        &self.comps[idx]
    }

    /// Naturality on every unit step.
    pub fn check_natural(&self) -> Result<()> {
        let bx = &self.source.bx;
        for idx in 0..bx.len() {
            for k in 0..bx.n() {
                let Some(j) = bx.up(idx, k) else { continue };
                let lhs = self.target.step_at(idx, k).unwrap() * &self.comps[idx];
                let rhs = &self.comps[j] * self.source.step_at(idx, k).unwrap();
                if lhs != rhs {
                    return Err(Error::NotNatural(format!("square at {:?} along axis {k}", bx.vertex(idx))));
                }
            }
        }
        Ok(())
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &ModMorphism) -> Result<ModMorphism> {
        if *g.source != *self.target {
            return Err(Error::Shape("composable morphisms must share the middle module".into()));
        }
        let comps = self.comps.iter().zip(&g.comps).map(|(f, g)| g * f).collect();
        Ok(ModMorphism { source: self.source.clone(), target: g.target.clone(), comps })
    }

    pub fn add(&self, o: &ModMorphism) -> Result<ModMorphism> {
        if *self.source != *o.source || *self.target != *o.target {
            return Err(Error::Shape("sum of morphisms with different ends".into()));
        }
        let comps = self.comps.iter().zip(&o.comps).map(|(a, b)| a + b).collect();
        Ok(ModMorphism { source: self.source.clone(), target: self.target.clone(), comps })
    }

    pub fn scale(&self, c: &crate::linalg::Scalar) -> ModMorphism {
        ModMorphism { source: self.source.clone(), target: self.target.clone(), comps: self.comps.iter().map(|m| m.scale(c)).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Matrix::is_zero)
    }

    pub fn is_injective(&self) -> bool {
        self.comps.iter().all(|c| c.rank() == c.cols())
    }

    pub fn is_surjective(&self) -> bool {
        self.comps.iter().all(|c| c.rank() == c.rows())
    }

    pub fn is_iso(&self) -> bool {
        self.comps.iter().all(|c| c.rows() == c.cols() && c.rank() == c.rows())
    }

    /// Extend by zero to a larger box (both ends padded).
    pub fn pad(&self, target_box: &GridBox) -> Result<ModMorphism> {
        let s = Arc::new(self.source.pad(target_box)?);
        let t = Arc::new(self.target.pad(target_box)?);
        let comps = target_box
            .vertices()
            .map(|v| match self.source.bx.index(&v) {
                Some(i) => self.comps[i].clone(),
                None => Matrix::zeros(self.source.field, 0, 0),
            })
            .collect();
        ModMorphism::new_unchecked(s, t, comps)
    }
}

/// A strictly increasing map Z -> Z.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AxisMap {
    Affine { scale: i64, offset: i64 },
    /// `x -> values[x - start]` for `x` in `start..start + values.len()`.
    Table { start: i64, values: Vec<i64> },
}

impl AxisMap {
    pub fn identity() -> Self {
        AxisMap::Affine { scale: 1, offset: 0 }
    }

    pub fn apply(&self, x: i64) -> Option<i64> {
        match self {
            AxisMap::Affine { scale, offset } => Some(scale * x + offset),
            AxisMap::Table { start, values } => {
                let i = x.checked_sub(*start)?;
                usize::try_from(i).ok().and_then(|i| values.get(i).copied())
            }
        }
    }

    /// Source range whose image lies in `[lo, hi]`.
    fn preimage(&self, lo: i64, hi: i64) -> Option<(i64, i64)> {
        match self {
            AxisMap::Affine { scale, offset } => {
                let a = (lo - offset).div_euclid(*scale) + i64::from((lo - offset).rem_euclid(*scale) != 0);
                let b = (hi - offset).div_euclid(*scale);
                (a <= b).then_some((a, b))
            }
            AxisMap::Table { start, values } => {
                let xs: Vec<i64> = (0..values.len())
                    .filter(|&i| lo <= values[i] && values[i] <= hi)
                    .map(|i| start + i as i64)
                    .collect();
                Some((*xs.first()?, *xs.last()?))
            }
        }
    }

    fn check(&self) -> Result<()> {
        match self {
            AxisMap::Affine { scale, .. } if *scale < 1 => {
                Err(Error::InvalidEmbedding(format!("scale {scale} is not positive")))
            }
            AxisMap::Table { values, .. } if values.windows(2).any(|w| w[0] >= w[1]) => {
                Err(Error::InvalidEmbedding("table is not strictly increasing".into()))
            }
            _ => Ok(()),
        }
    }
}

/// `L: Z^n -> Z^{n+1}`, `L(x) = (f_1(x_1), …, f_n(x_n))` with a constant inserted at `insert_pos`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxisEmbedding {
    maps: Vec<AxisMap>,
    insert_pos: usize,
    insert_value: i64,
}

impl AxisEmbedding {
    pub fn new(maps: Vec<AxisMap>, insert_pos: usize, insert_value: i64) -> Result<Self> {
        if insert_pos > maps.len() {
            return Err(Error::InvalidEmbedding(format!("insert position {insert_pos} beyond {} axes", maps.len())));
        }
        for m in &maps {
            m.check()?;
        }
        Ok(AxisEmbedding { maps, insert_pos, insert_value })
    }

    /// Identity on `n` axes, constant `c` appended last.
    pub fn layer(n: usize, c: i64) -> Self {
        AxisEmbedding { maps: vec![AxisMap::identity(); n], insert_pos: n, insert_value: c }
    }

    pub fn n(&self) -> usize {
        self.maps.len()
    }

    pub fn maps(&self) -> &[AxisMap] {
        &self.maps
    }

    pub fn insert_pos(&self) -> usize {
        self.insert_pos
    }

    pub fn insert_value(&self) -> i64 {
        self.insert_value
    }

    pub fn apply(&self, x: &[i64]) -> Option<Vec<i64>> {
        let mut y = Vec::with_capacity(x.len() + 1);
        for (m, &xi) in self.maps.iter().zip(x) {
            y.push(m.apply(xi)?);
        }
        y.insert(self.insert_pos, self.insert_value);
        Some(y)
    }

    /// Follow with a translation of the target.
    pub fn translated(&self, t: &[i64]) -> AxisEmbedding {
        let mut maps = self.maps.clone();
        let target_axis = |k: usize| if k < self.insert_pos { k } else { k + 1 };
        for (k, m) in maps.iter_mut().enumerate() {
            let s = t[target_axis(k)];
            *m = match m {
                AxisMap::Affine { scale, offset } => AxisMap::Affine { scale: *scale, offset: *offset + s },
                AxisMap::Table { start, values } => {
                    AxisMap::Table { start: *start, values: values.iter().map(|v| v + s).collect() }
                }
            };
        }
        AxisEmbedding { maps, insert_pos: self.insert_pos, insert_value: self.insert_value + t[self.insert_pos] }
    }

    /// The largest source box mapped into `target`.
    pub fn max_domain(&self, target: &GridBox) -> Option<GridBox> {
        if target.n() != self.n() + 1 {
            return None;
        }
        let p = self.insert_pos;
        if self.insert_value < target.lo()[p] || self.insert_value > target.hi()[p] {
            return None;
        }
        let mut lo = Vec::new();
        let mut hi = Vec::new();
        for (k, m) in self.maps.iter().enumerate() {
            let t = if k < p { k } else { k + 1 };
            let (a, b) = m.preimage(target.lo()[t], target.hi()[t])?;
            lo.push(a);
            hi.push(b);
        }
        GridBox::new(lo, hi).ok()
    }
}
