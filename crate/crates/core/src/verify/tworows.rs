//! Splitting a module on an `m x 2` grid at a zero vertex.
//!
//! Both rows are decomposed into intervals. With the zero vertex `y` on the
//! lower row, lower intervals lie entirely left or right of `y`, and upper
//! intervals are grouped by death before, at or after `y`; on the upper row,
//! upper intervals lie left or right and lower ones are grouped by birth. No
//! vertical map joins intervals of different groups, so the three groups
//! are summands.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{AxisEmbedding, AxisMap, GridBox, PersModule};
use crate::linalg::Matrix;
use crate::rect::interval_basis;

use super::split::{split_by_bases, Splitting};

fn check_shape(m: &PersModule) -> Result<()> {
    if m.n() != 2 || m.grid().extent(1) != 2 {
        return Err(Error::Precondition("two-row splitting needs a box with two rows along axis 1".into()));
    }
    Ok(())
}

/// A zero vertex `y` with nonzero `x <= y <= z`, if any.
pub fn find_separator(m: &PersModule) -> Option<Vec<i64>> {
    let bx = m.grid();
    let nonzero: Vec<Vec<i64>> = (0..bx.len()).filter(|&i| m.dim_at(i) > 0).map(|i| bx.vertex(i)).collect();
    let le = |a: &[i64], b: &[i64]| a.iter().zip(b).all(|(x, y)| x <= y);
    (0..bx.len()).filter(|&i| m.dim_at(i) == 0).map(|i| bx.vertex(i)).find(|y| {
        nonzero.iter().any(|x| le(x, y)) && nonzero.iter().any(|z| le(y, z))
    })
}

fn row(m: &PersModule, level: i64) -> Result<PersModule> {
    let bx = m.grid();
    let line = AxisEmbedding::new(vec![AxisMap::identity()], 1, level)?;
    let dom = GridBox::new(vec![bx.lo()[0]], vec![bx.hi()[0]])?;
    m.restrict(&line, &dom)
}

/// Split `M` into the three summands of the row grouping at `y`. At least
/// two of them are nonzero.
pub fn decompose_two_rows(m: &PersModule, y: &[i64]) -> Result<Splitting> {
    check_shape(m)?;
    let bx = m.grid();
    let yi = bx.index(y).ok_or_else(|| Error::Precondition(format!("{y:?} is outside the box")))?;
    if m.dim_at(yi) != 0 {
        return Err(Error::Precondition(format!("module is nonzero at {y:?}")));
    }
    let lower_level = bx.lo()[1];
    let on_lower = y[1] == lower_level;
    let lower = interval_basis(&row(m, lower_level)?)?;
    let upper = interval_basis(&row(m, lower_level + 1)?)?;
    let y0 = y[0];
    let group_lower = |(b, d): (i64, i64)| -> usize {
        if on_lower {
            if d < y0 { 0 } else { 2 }
        } else if b < y0 {
            0
        } else if b == y0 {
            1
        } else {
            2
        }
    };
    let group_upper = |(_, d): (i64, i64)| -> usize {
        if on_lower {
            if d < y0 {
                0
            } else if d == y0 {
                1
            } else {
                2
            }
        } else if d < y0 {
            0
        } else {
            2
        }
    };
    let field = m.field();
    let mut bases = Vec::with_capacity(bx.len());
    let mut sizes = Vec::with_capacity(bx.len());
    for idx in 0..bx.len() {
        let v = bx.vertex(idx);
        let col = (v[0] - bx.lo()[0]) as usize;
        let (ib, group): (_, &dyn Fn((i64, i64)) -> usize) =
            if v[1] == lower_level { (&lower, &group_lower) } else { (&upper, &group_upper) };
        let (basis, ids) = &ib.bases[col];
        let mut order: Vec<(usize, usize)> = ids.iter().enumerate().map(|(c, id)| (group(ib.intervals[*id]), c)).collect();
        order.sort();
        let mut sz = vec![0usize; 3];
        for (g, _) in &order {
            sz[*g] += 1;
        }
        let cols: Vec<usize> = order.iter().map(|t| t.1).collect();
        bases.push(if cols.is_empty() { Matrix::zeros(field, 0, 0) } else { basis.select_cols(&cols) });
        sizes.push(sz);
    }
    let s = split_by_bases(&Arc::new(m.clone()), &bases, &sizes)?
        .ok_or_else(|| Error::Internal("row grouping is not compatible with the vertical maps".into()))?;
    if s.nonzero_parts() < 2 {
        return Err(Error::Precondition(format!("{y:?} does not separate nonzero vertices")));
    }
    Ok(s)
}
