use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::matrix::CommMatrix;
use super::MAX_ITERATIONS;
use crate::rng::stream;
use crate::tol::EPS_NORM;
use crate::{Error, Result};

/// `C ≈ S T` with `S` (`m × d`) and `T` (`d × n`) both row-stochastic.
///
/// Row `x` of `S` is the distribution over dit values Alice sends for
/// preparation `x`; row `k` of `T` is Bob's outcome distribution on reading `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NonnegRecord", into = "NonnegRecord")]
pub struct NonnegFactorization {
    pub d: usize,
    pub s: DMatrix<f64>,
    pub t: DMatrix<f64>,
    /// Largest entrywise error of `S T` against the target.
    pub residual: f64,
}

#[derive(Clone, Serialize, Deserialize)]
struct NonnegRecord {
    d: usize,
    s: Vec<Vec<f64>>,
    t: Vec<Vec<f64>>,
    residual: f64,
}

fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn stochastic_from_rows(rows: &[Vec<f64>], cols: usize, what: &'static str) -> Result<DMatrix<f64>> {
    for (i, r) in rows.iter().enumerate() {
        if r.len() != cols {
            return Err(Error::invalid(what, format!("row {i} has {} entries, expected {cols}", r.len())));
        }
        if r.iter().any(|v| !v.is_finite() || *v < -EPS_NORM) {
            return Err(Error::invalid(what, format!("row {i} has a negative entry")));
        }
        let sum: f64 = r.iter().sum();
        if (sum - 1.0).abs() > EPS_NORM {
            return Err(Error::invalid(what, format!("row {i} sums to {sum}")));
        }
    }
    Ok(DMatrix::from_row_iterator(rows.len(), cols, rows.iter().flatten().copied()))
}

impl TryFrom<NonnegRecord> for NonnegFactorization {
    type Error = Error;
    fn try_from(r: NonnegRecord) -> Result<Self> {
        if r.d == 0 || r.t.len() != r.d {
            return Err(Error::invalid("nonnegative factorization", "T must have d rows"));
        }
        let n = r.t[0].len();
        let s = stochastic_from_rows(&r.s, r.d, "nonnegative factorization")?;
        let t = stochastic_from_rows(&r.t, n, "nonnegative factorization")?;
        Ok(Self { d: r.d, s, t, residual: r.residual })
    }
}

impl From<NonnegFactorization> for NonnegRecord {
    fn from(f: NonnegFactorization) -> Self {
        NonnegRecord { d: f.d, s: rows_of(&f.s), t: rows_of(&f.t), residual: f.residual }
    }
}

/// Euclidean projection of `v` onto the probability simplex.
pub(crate) fn project_simplex(v: &mut [f64]) {
    let mut sorted: Vec<f64> = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut acc = 0.0;
    let mut theta = 0.0;
    for (k, &u) in sorted.iter().enumerate() {
        acc += u;
        let t = (acc - 1.0) / (k + 1) as f64;
        if u - t > 0.0 {
            theta = t;
        }
    }
    for x in v.iter_mut() {
        *x = (*x - theta).max(0.0);
    }
}

fn project_rows(m: &mut DMatrix<f64>) {
    for i in 0..m.nrows() {
        let mut row: Vec<f64> = m.row(i).iter().copied().collect();
        project_simplex(&mut row);
        for (j, v) in row.into_iter().enumerate() {
            m[(i, j)] = v;
        }
    }
}

fn random_stochastic<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<f64> {
    let mut m = DMatrix::from_fn(rows, cols, |_, _| -rng.random::<f64>().max(1e-300).ln());
    for mut r in m.row_iter_mut() {
        let s: f64 = r.iter().sum();
        r /= s;
    }
    m
}

/// `S = [1 | 0]`, `T = [C; uniform]` when `d ≥ m`, or `S = [C | 0]`,
/// `T = [1; uniform]` when `d ≥ n`.
fn trivial_start(c: &DMatrix<f64>, d: usize) -> Option<(DMatrix<f64>, DMatrix<f64>)> {
    let (m, n) = c.shape();
    if d >= m {
        let s = DMatrix::from_fn(m, d, |i, k| f64::from(u8::from(i == k)));
        let t = DMatrix::from_fn(d, n, |k, j| if k < m { c[(k, j)] } else { 1.0 / n as f64 });
        Some((s, t))
    } else if d >= n {
        let s = DMatrix::from_fn(m, d, |i, k| if k < n { c[(i, k)] } else { 0.0 });
        let t = DMatrix::from_fn(d, n, |k, j| if k < n { f64::from(u8::from(k == j)) } else { 1.0 / n as f64 });
        Some((s, t))
    } else {
        None
    }
}

/// Alternating projected-gradient descent on `‖C − S T‖²` with both
/// factors kept row-stochastic by simplex projection.
fn alternate(c: &DMatrix<f64>, mut s: DMatrix<f64>, mut t: DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let mut prev = f64::INFINITY;
    for it in 0..MAX_ITERATIONS {
        let tt = &t * t.transpose();
        let lip = tt.norm().max(1e-12);
        let grad = (&s * &t - c) * t.transpose();
        s -= grad / lip;
        project_rows(&mut s);

        let ss = s.transpose() * &s;
        let lip = ss.norm().max(1e-12);
        let grad = s.transpose() * (&s * &t - c);
        t -= grad / lip;
        project_rows(&mut t);

        if it % 25 == 0 {
            let loss = (&s * &t - c).norm_squared();
            if loss < 1e-28 || (prev.is_finite() && prev - loss <= 1e-15 * prev) {
                break;
            }
            prev = loss;
        }
    }
    (s, t)
}

/// Best stochastic factorization with inner dimension `d` over `restarts`
/// seeded starts (plus the exact trivial start when `d ≥ min(m, n)`).
/// Success means `residual ≤ EPS_FACT`; failure is a large residual, not an error.
pub fn nonneg_factorize(c: &CommMatrix, d: usize, restarts: usize, seed: u64) -> Result<NonnegFactorization> {
    if d == 0 {
        return Err(Error::OutOfDomain("inner dimension must be at least 1".into()));
    }
    let target = c.entries();
    let (m, n) = target.shape();
    let trivial = trivial_start(target, d);
    let runs: Vec<NonnegFactorization> = (0..=restarts)
        .into_par_iter()
        .filter_map(|r| {
            let (s, t) = if r == 0 {
                trivial.clone()?
            } else {
                let mut rng = stream(seed, r as u64);
                let s = random_stochastic(&mut rng, m, d);
                let t = random_stochastic(&mut rng, d, n);
                alternate(target, s, t)
            };
            let residual = c.max_abs_diff(&(&s * &t));
            Some(NonnegFactorization { d, s, t, residual })
        })
        .collect();
    runs.into_iter()
        .reduce(|best, f| if f.residual < best.residual { f } else { best })
        .ok_or_else(|| Error::OutOfDomain("restarts must be positive when d < min(m, n)".into()))
}
