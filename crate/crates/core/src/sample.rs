//! Seeded random modules and rectangle decompositions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grid::{GridBox, PersModule};
use crate::linalg::{Field, Matrix, Scalar};
use crate::rect::{RectDecomp, Rectangle};

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed for trial `t` of a run seeded with `seed`.
pub fn trial_seed(seed: u64, t: u64) -> u64 {
    seed ^ t.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// A uniformly random element for prime fields, from `{-2, …, 2}` for the rationals.
pub fn small_scalar(field: Field, rng: &mut impl Rng) -> Scalar {
    match field {
        Field::Rationals => field.from_i64(rng.gen_range(-2..=2)),
        Field::Prime(p) => field.from_i64(rng.gen_range(0..p) as i64),
    }
}

fn random_01(field: Field, rows: usize, cols: usize, rng: &mut impl Rng) -> Matrix {
    let mut m = Matrix::zeros(field, rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            if rng.gen_bool(0.5) {
                m[(i, j)] = field.one();
            }
        }
    }
    m
}

/// A random module with the given dims and 0/1 steps.
///
/// Vertices are filled in lexicographic order; all arrows into a vertex are
/// redrawn until every square ending there commutes, falling back to zero
/// maps (which always commute) after a bounded number of attempts.
pub fn module_with_dims(field: Field, bx: GridBox, dims: Vec<usize>, rng: &mut impl Rng) -> PersModule {
    let n = bx.n();
    let mut steps: Vec<Option<Matrix>> = vec![None; bx.len() * n];
    for w in 0..bx.len() {
        let preds: Vec<(usize, usize)> = (0..n).filter_map(|k| bx.down(w, k).map(|v| (v, k))).collect();
        let mut chosen = None;
        for _ in 0..64 {
            let cand: Vec<Matrix> = preds.iter().map(|&(v, _)| random_01(field, dims[w], dims[v], rng)).collect();
            let ok = (0..preds.len()).all(|a| {
                (a + 1..preds.len()).all(|b| {
                    let (j, k) = (preds[a].1, preds[b].1);
                    let s = bx.down(preds[a].0, k).expect("box is convex");
                    let sj = steps[s * n + j].as_ref().unwrap();
                    let sk = steps[s * n + k].as_ref().unwrap();
                    // arrow from w - e_k (index b) after step(s, j) equals arrow from w - e_j after step(s, k)
                    &cand[b] * sj == &cand[a] * sk
                })
            });
            if ok {
                chosen = Some(cand);
                break;
            }
        }
        let chosen = chosen.unwrap_or_else(|| preds.iter().map(|&(v, _)| Matrix::zeros(field, dims[w], dims[v])).collect());
        for (&(v, k), m) in preds.iter().zip(chosen) {
            steps[v * n + k] = Some(m);
        }
    }
    PersModule::from_fn(field, bx, dims, |idx, k, _| Ok(steps[idx * n + k].take().unwrap()))
        .expect("shapes follow dims")
}

/// Random module on `[0, extents)` with dims in `0..=max_dim`.
pub fn random_module(field: Field, extents: &[usize], max_dim: usize, seed: u64) -> PersModule {
    let mut r = rng(seed);
    random_module_bounded(field, extents, max_dim, usize::MAX, &mut r)
}

/// As [`random_module`] with total dimension at most `max_total` and at least one.
pub fn random_module_bounded(
    field: Field,
    extents: &[usize],
    max_dim: usize,
    max_total: usize,
    rng: &mut impl Rng,
) -> PersModule {
    let bx = GridBox::new(vec![0; extents.len()], extents.iter().map(|&e| e as i64 - 1).collect()).expect("small box");
    let mut dims: Vec<usize> = (0..bx.len()).map(|_| rng.gen_range(0..=max_dim)).collect();
    while dims.iter().sum::<usize>() > max_total {
        let i = rng.gen_range(0..dims.len());
        dims[i] = dims[i].saturating_sub(1);
    }
    if dims.iter().all(|&d| d == 0) && max_total > 0 && max_dim > 0 {
        let i = rng.gen_range(0..dims.len());
        dims[i] = 1;
    }
    module_with_dims(field, bx, dims, rng)
}

/// Random rectangles inside `[0, max]^n`.
pub fn random_rects(field: Field, n: usize, count: usize, max: i64, rng: &mut impl Rng) -> RectDecomp {
    let rects = (0..count)
        .map(|_| {
            let b: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=max)).collect();
            let d: Vec<i64> = b.iter().map(|&x| rng.gen_range(x..=max)).collect();
            Rectangle::new(b, d).expect("b <= d")
        })
        .collect();
    let bx = GridBox::new(vec![0; n], vec![max; n]).expect("small box");
    RectDecomp::new(field, bx, rects).expect("inside the box")
}
