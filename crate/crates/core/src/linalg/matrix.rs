//! Dense exact matrices.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use super::poly::UniPoly;
use super::scalar::{Field, Scalar};
use crate::error::{Error, Result};

/// A dense row-major matrix over a single [`Field`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        Matrix { field, rows, cols, data: vec![field.zero(); rows * cols] }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m[(i, i)] = field.one();
        }
        m
    }

    pub fn from_vec(field: Field, rows: usize, cols: usize, data: Vec<Scalar>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        if let Some(x) = data.iter().find(|x| !field.contains(x)) {
            return Err(Error::FieldMismatch(format!("entry {x} is not in {field}")));
        }
        Ok(Matrix { field, rows, cols, data })
    }

    /// Build from integer rows; all rows must have equal length.
    pub fn from_i64(field: Field, rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        let data = rows.iter().flatten().map(|&v| field.from_i64(v)).collect();
        Matrix { field, rows: rows.len(), cols, data }
    }

    /// A single column.
    pub fn column(field: Field, entries: Vec<Scalar>) -> Self {
        let n = entries.len();
        Matrix { field, rows: n, cols: 1, data: entries }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| if i == j { self[(i, j)].is_one() } else { self[(i, j)].is_zero() })
            })
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        Matrix { field: self.field, rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * c).collect() }
    }

    pub fn try_mul(&self, o: &Matrix) -> Result<Matrix> {
        if self.cols != o.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        if self.field != o.field {
            return Err(Error::FieldMismatch(format!("{} vs {}", self.field, o.field)));
        }
        let mut out = Matrix::zeros(self.field, self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = &o.data[k * o.cols + j];
                    out.data[i * o.cols + j].add_mul_assign(a, b);
                }
            }
        }
        Ok(out)
    }

    /// Matrix times column vector.
    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols, "vector length");
        (0..self.rows)
            .map(|i| {
                let mut acc = self.field.zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    acc.add_mul_assign(a, b);
                }
                acc
            })
            .collect()
    }

    pub fn hstack(&self, o: &Matrix) -> Result<Matrix> {
        if self.rows != o.rows {
            return Err(Error::Shape(format!("hstack of {} and {} rows", self.rows, o.rows)));
        }
        let mut out = Matrix::zeros(self.field, self.rows, self.cols + o.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..o.cols {
                out[(i, self.cols + j)] = o[(i, j)].clone();
            }
        }
        Ok(out)
    }

    pub fn vstack(&self, o: &Matrix) -> Result<Matrix> {
        if self.cols != o.cols {
            return Err(Error::Shape(format!("vstack of {} and {} columns", self.cols, o.cols)));
        }
        let mut data = self.data.clone();
        data.extend(o.data.iter().cloned());
        Ok(Matrix { field: self.field, rows: self.rows + o.rows, cols: self.cols, data })
    }

    /// Horizontal concatenation of many blocks sharing a row count.
    pub fn hcat(field: Field, rows: usize, blocks: &[&Matrix]) -> Result<Matrix> {
        let mut out = Matrix::zeros(field, rows, 0);
        for b in blocks {
            out = out.hstack(b)?;
        }
        Ok(out)
    }

    pub fn vcat(field: Field, cols: usize, blocks: &[&Matrix]) -> Result<Matrix> {
        let mut out = Matrix::zeros(field, 0, cols);
        for b in blocks {
            out = out.vstack(b)?;
        }
        Ok(out)
    }

    pub fn select_cols(&self, idx: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.field, self.rows, idx.len());
        for i in 0..self.rows {
            for (jj, &j) in idx.iter().enumerate() {
                out[(i, jj)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend(self.row(i).iter().cloned());
        }
        Matrix { field: self.field, rows: idx.len(), cols: self.cols, data }
    }

    /// Block-diagonal sum.
    pub fn block_diag(&self, o: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(self.field, self.rows + o.rows, self.cols + o.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)].clone();
            }
        }
        for i in 0..o.rows {
            for j in 0..o.cols {
                out[(self.rows + i, self.cols + j)] = o[(i, j)].clone();
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else { continue };
            m.swap_rows(r, p);
            let inv = m[(r, c)].inv().expect("nonzero pivot");
            for j in c..m.cols {
                let v = &m.data[r * m.cols + j] * &inv;
                m.data[r * m.cols + j] = v;
            }
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let f = -&m[(i, c)];
                for j in c..m.cols {
                    if m.data[r * m.cols + j].is_zero() {
                        continue;
                    }
                    let (src, dst) = (r * m.cols + j, i * m.cols + j);
                    let s = m.data[src].clone();
                    m.data[dst].add_mul_assign(&f, &s);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Columns spanning the right kernel.
    pub fn nullspace(&self) -> Matrix {
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let free: Vec<usize> = (0..self.cols).filter(|&c| !is_pivot[c]).collect();
        let mut out = Matrix::zeros(self.field, self.cols, free.len());
        for (k, &f) in free.iter().enumerate() {
            out[(f, k)] = self.field.one();
            for (i, &p) in pivots.iter().enumerate() {
                out[(p, k)] = -&r[(i, f)];
            }
        }
        out
    }

    pub fn inverse(&self) -> Result<Matrix> {
        if self.rows != self.cols {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(self.clone());
        }
        let aug = self.hstack(&Matrix::identity(self.field, n))?;
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(Error::DivisionByZero);
        }
        let idx: Vec<usize> = (n..2 * n).collect();
        Ok(r.select_cols(&idx))
    }

    /// Pivot columns of `self` plus the unit vectors completing them to a basis.
    ///
    /// Returns `(pivots, units)`: the columns of `self` forming a basis of its
    /// column space, and the coordinate indices whose unit vectors extend it.
    pub fn basis_extension(&self) -> (Vec<usize>, Vec<usize>) {
        let aug = self.hstack(&Matrix::identity(self.field, self.rows)).expect("same rows");
        let (_, pivots) = aug.rref();
        let own = pivots.iter().copied().filter(|&p| p < self.cols).collect();
        let units = pivots.iter().filter(|&&p| p >= self.cols).map(|&p| p - self.cols).collect();
        (own, units)
    }

    /// Indices of rows forming a basis of the row space, lexicographically first.
    pub fn independent_rows(&self) -> Vec<usize> {
        self.transpose().rref().1
    }

    pub fn pow(&self, mut e: u64) -> Result<Matrix> {
        if self.rows != self.cols {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        let mut base = self.clone();
        let mut acc = Matrix::identity(self.field, self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Ok(acc)
    }

    /// Evaluate a polynomial at a square matrix by Horner's rule.
    pub fn eval_poly(&self, f: &UniPoly) -> Result<Matrix> {
        if self.rows != self.cols {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        let mut acc = Matrix::zeros(self.field, n, n);
        for c in f.coeffs().iter().rev() {
            acc = &acc * self;
            for i in 0..n {
                let v = &acc[(i, i)] + c;
                acc[(i, i)] = v;
            }
        }
        Ok(acc)
    }

    /// The monic polynomial of least degree annihilating a square matrix.
    ///
    /// Powers `A^k` are flattened and reduced incrementally until the first
    /// linear dependency; the dependency's coefficients give the polynomial.
    pub fn minimal_polynomial(&self) -> Result<UniPoly> {
        if self.rows != self.cols {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        let f = self.field;
        let n = self.rows;
        // Each stored row: reduced vector, pivot position, and the combination
        // of powers it represents.
        let mut basis: Vec<(Vec<Scalar>, usize, Vec<Scalar>)> = Vec::new();
        let mut power = Matrix::identity(f, n);
        for k in 0..=n {
            let mut v = power.data.clone();
            let mut comb = vec![f.zero(); k + 1];
            comb[k] = f.one();
            for (bv, piv, bc) in &basis {
                if v[*piv].is_zero() {
                    continue;
                }
                let c = -&v[*piv];
                for (x, y) in v.iter_mut().zip(bv) {
                    x.add_mul_assign(&c, y);
                }
                for (x, y) in comb.iter_mut().zip(bc) {
                    x.add_mul_assign(&c, y);
                }
            }
            match v.iter().position(|x| !x.is_zero()) {
                None => {
                    let p = UniPoly::new(f, comb);
                    debug_assert!(self.eval_poly(&p)?.is_zero());
                    return Ok(p);
                }
                Some(piv) => {
                    let inv = v[piv].inv().expect("nonzero");
                    let v: Vec<Scalar> = v.iter().map(|x| x * &inv).collect();
                    let comb: Vec<Scalar> = comb.iter().map(|x| x * &inv).collect();
                    basis.push((v, piv, comb));
                }
            }
            power = &power * self;
        }
        Err(Error::Internal("no annihilating polynomial up to degree n".into()))
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Scalar;
    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Scalar {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, o: &Matrix) -> Matrix {
        self.try_mul(o).expect("matrix product")
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, o: &Matrix) -> Matrix {
        assert_eq!(self.shape(), o.shape(), "matrix sum shape");
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect();
        Matrix { field: self.field, rows: self.rows, cols: self.cols, data }
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, o: &Matrix) -> Matrix {
        assert_eq!(self.shape(), o.shape(), "matrix difference shape");
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect();
        Matrix { field: self.field, rows: self.rows, cols: self.cols, data }
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        Matrix { field: self.field, rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| -x).collect() }
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "] ({}x{} over {})", self.rows, self.cols, self.field)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const Q: Field = Field::Rationals;

    #[test]
    fn rank_examples() {
        assert_eq!(Matrix::identity(Q, 2).rank(), 2);
        assert_eq!(Matrix::zeros(Q, 3, 4).rank(), 0);
        assert_eq!(Matrix::from_i64(Q, &[vec![1, 2], vec![2, 4]]).rank(), 1);
    }

    #[test]
    fn nullspace_examples() {
        assert_eq!(Matrix::identity(Q, 3).nullspace().cols(), 0);
        assert_eq!(Matrix::zeros(Q, 2, 3).nullspace().cols(), 3);
        let f2 = Field::Prime(2);
        let k = Matrix::from_i64(f2, &[vec![1, 1]]).nullspace();
        assert_eq!(k, Matrix::from_i64(f2, &[vec![1], vec![1]]));
    }

    #[test]
    fn minimal_polynomial_examples() {
        let x = |c: &[i64]| UniPoly::from_i64(Q, c);
        assert_eq!(Matrix::identity(Q, 3).minimal_polynomial().unwrap(), x(&[-1, 1]));
        let nil = Matrix::from_i64(Q, &[vec![0, 1], vec![0, 0]]);
        assert_eq!(nil.minimal_polynomial().unwrap(), x(&[0, 0, 1]));
        let d = Matrix::from_i64(Q, &[vec![1, 0], vec![0, 2]]);
        assert_eq!(d.minimal_polynomial().unwrap(), x(&[2, -3, 1]));
        assert!(Matrix::zeros(Q, 2, 3).minimal_polynomial().is_err());
        assert_eq!(Matrix::zeros(Q, 0, 0).minimal_polynomial().unwrap(), x(&[1]));
    }

    #[test]
    fn inverse_and_extension() {
        let a = Matrix::from_i64(Q, &[vec![2, 1], vec![1, 1]]);
        let inv = a.inverse().unwrap();
        assert!((&a * &inv).is_identity());
        assert!(Matrix::from_i64(Q, &[vec![1, 2], vec![2, 4]]).inverse().is_err());
        let u = Matrix::from_i64(Q, &[vec![0], vec![1], vec![1]]);
        let (own, units) = u.basis_extension();
        assert_eq!(own, vec![0]);
        assert_eq!(units, vec![0, 1]);
    }

    fn small_matrix(field: Field) -> impl Strategy<Value = Matrix> {
        (0usize..5, 0usize..5).prop_flat_map(move |(r, c)| {
            proptest::collection::vec(-3i64..4, r * c).prop_map(move |v| {
                let rows: Vec<Vec<i64>> = v.chunks(c.max(1)).map(|ch| ch.to_vec()).take(r).collect();
                if c == 0 {
                    Matrix::zeros(field, r, 0)
                } else {
                    Matrix::from_i64(field, &rows)
                }
            })
        })
    }

    proptest! {
        #[test]
        fn rank_nullity(m in small_matrix(Q)) {
            let k = m.nullspace();
            prop_assert_eq!(m.rank() + k.cols(), m.cols());
            prop_assert!((&m * &k).is_zero());
        }

        #[test]
        fn rank_nullity_mod_p(m in small_matrix(Field::Prime(3))) {
            let k = m.nullspace();
            prop_assert_eq!(m.rank() + k.cols(), m.cols());
            prop_assert!((&m * &k).is_zero());
        }

        #[test]
        fn minimal_polynomial_annihilates(v in proptest::collection::vec(-2i64..3, 9), p in prop::sample::select(vec![0u64, 2, 5])) {
            let field = if p == 0 { Q } else { Field::Prime(p) };
            let rows: Vec<Vec<i64>> = v.chunks(3).map(|c| c.to_vec()).collect();
            let a = Matrix::from_i64(field, &rows);
            let mu = a.minimal_polynomial().unwrap();
            prop_assert!(a.eval_poly(&mu).unwrap().is_zero());
            prop_assert!(mu.is_monic());
            // no proper divisor of lower degree annihilates: check degree minimality
            for d in 0..mu.degree().unwrap() {
                let mut powers = Vec::new();
                let mut pw = Matrix::identity(field, 3);
                for _ in 0..=d { powers.push(pw.clone()); pw = &pw * &a; }
                let flat: Vec<Matrix> = powers.iter().map(|m| Matrix::column(field, m.entries().to_vec())).collect();
                let refs: Vec<&Matrix> = flat.iter().collect();
                let stacked = Matrix::hcat(field, 9, &refs).unwrap();
                prop_assert_eq!(stacked.rank(), d + 1);
            }
        }
    }
}
