//! Sound lower bounds on the minimal classical and quantum dimensions.

use super::matrix::CommMatrix;
use crate::linalg;
use crate::tol::EPS_NORM;
use crate::{Error, Result};

/// Largest matrix side accepted by the exact rectangle-cover search.
pub const MAX_COVER_SIDE: usize = 6;

const RANK_TOL: f64 = 1e-9;

pub fn linear_rank(c: &CommMatrix) -> usize {
    linalg::singular_values(c.entries()).iter().filter(|&&s| s > RANK_TOL).count()
}

/// Largest row count accepted by the exact distinguishability search;
/// bigger matrices use a greedy (still sound) set.
pub const MAX_EXACT_ROWS: usize = 24;

/// `max(⌈√rank⌉, distinguishable_rows)`.
///
/// Hermitian `d × d` matrices span a real space of dimension `d²`, and
/// `C_xy = tr(E_x F_y)` factors `C` through that space.
pub fn psd_lower_bound(c: &CommMatrix) -> usize {
    rank_root_bound(c).max(distinguishable_rows(c))
}

/// Smallest `d` with `d² ≥ rank(C)`.
pub fn rank_root_bound(c: &CommMatrix) -> usize {
    let r = linear_rank(c);
    (1..).find(|d| d * d >= r).expect("finite rank")
}

/// Size of a set of rows with pairwise disjoint supports. Such rows are
/// perfectly distinguishable, so their states need mutually orthogonal
/// supports and every implementation needs at least this dimension.
/// Exact up to `MAX_EXACT_ROWS` rows, greedy beyond.
pub fn distinguishable_rows(c: &CommMatrix) -> usize {
    let m = c.rows();
    let support: Vec<Vec<bool>> = (0..m).map(|i| (0..c.cols()).map(|j| c.get(i, j) > EPS_NORM).collect()).collect();
    let disjoint = |a: usize, b: usize| support[a].iter().zip(&support[b]).all(|(x, y)| !(x & y));
    if m > MAX_EXACT_ROWS {
        let mut chosen: Vec<usize> = Vec::new();
        for i in 0..m {
            if chosen.iter().all(|&k| disjoint(i, k)) {
                chosen.push(i);
            }
        }
        return chosen.len();
    }
    // compatible[i]: rows disjoint from row i
    let compatible: Vec<u32> = (0..m).map(|i| (0..m).filter(|&k| k != i && disjoint(i, k)).fold(0, |acc, k| acc | 1 << k)).collect();
    fn grow(candidates: u32, size: usize, best: &mut usize, compatible: &[u32]) {
        if candidates == 0 {
            *best = (*best).max(size);
            return;
        }
        if size + candidates.count_ones() as usize <= *best {
            return;
        }
        let i = candidates.trailing_zeros() as usize;
        grow(candidates & compatible[i], size + 1, best, compatible);
        grow(candidates & !(1 << i), size, best, compatible);
    }
    let mut best = 0;
    grow(((1u64 << m) - 1) as u32, 0, &mut best, &compatible);
    best
}

/// `max(rank, rectangle cover number)`; beyond 6×6 the cover is replaced
/// by the (weaker) distinguishable-row count.
pub fn nonneg_lower_bound(c: &CommMatrix) -> usize {
    let rank = linear_rank(c);
    match rectangle_cover_number(c) {
        Ok(cover) => rank.max(cover),
        Err(_) => rank.max(distinguishable_rows(c)),
    }
}

/// Minimum number of all-nonzero combinatorial rectangles covering the
/// support of `C` (its Boolean rank). Each inner index of a nonnegative
/// factorization contributes one such rectangle, so this bounds the
/// nonnegative rank from below.
pub fn rectangle_cover_number(c: &CommMatrix) -> Result<usize> {
    let (m, n) = (c.rows(), c.cols());
    if m > MAX_COVER_SIDE || n > MAX_COVER_SIDE {
        return Err(Error::Unsupported(format!(
            "rectangle cover search is limited to {MAX_COVER_SIDE}x{MAX_COVER_SIDE}, got {m}x{n}"
        )));
    }
    let row_support: Vec<u32> = (0..m)
        .map(|i| (0..n).filter(|&j| c.get(i, j) > EPS_NORM).fold(0, |acc, j| acc | 1 << j))
        .collect();
    let cell = |i: usize, j: usize| 1u64 << (i * n + j);
    let target: u64 = (0..m)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| row_support[i] >> j & 1 == 1)
        .fold(0, |acc, (i, j)| acc | cell(i, j));
    if target == 0 {
        return Ok(0);
    }

    // maximal rectangles: close every column set under rows ⊇ cols
    let mut rects: Vec<u64> = Vec::new();
    for cols in 1u32..(1 << n) {
        let rows: Vec<usize> = (0..m).filter(|&i| row_support[i] & cols == cols).collect();
        if rows.is_empty() {
            continue;
        }
        let closed = rows.iter().fold(u32::MAX, |acc, &i| acc & row_support[i]);
        let rows: Vec<usize> = (0..m).filter(|&i| row_support[i] & closed == closed).collect();
        let mask = rows
            .iter()
            .flat_map(|&i| (0..n).filter(move |&j| closed >> j & 1 == 1).map(move |j| (i, j)))
            .fold(0u64, |acc, (i, j)| acc | cell(i, j));
        if !rects.contains(&mask) {
            rects.push(mask);
        }
    }

    fn search(uncovered: u64, rects: &[u64], budget: usize) -> bool {
        if uncovered == 0 {
            return true;
        }
        if budget == 0 {
            return false;
        }
        let first = uncovered & uncovered.wrapping_neg();
        rects
            .iter()
            .filter(|&&r| r & first != 0)
            .any(|&r| search(uncovered & !r, rects, budget - 1))
    }

    Ok((1..=m.min(n)).find(|&k| search(target, &rects, k)).unwrap_or(m.min(n)))
}
