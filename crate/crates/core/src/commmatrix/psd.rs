use std::collections::VecDeque;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::matrix::CommMatrix;
use super::MAX_ITERATIONS;
use crate::linalg::{self, c, CMat};
use crate::quantum::{matrix_from_json, matrix_to_json, JsonMatrix};
use crate::rng::stream;
use crate::tol::EPS_PSD;
use crate::{Error, Result};

/// `C_xy ≈ tr(E_x F_y)` with positive semidefinite `d × d` factors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PsdRecord", into = "PsdRecord")]
pub struct PsdFactorization {
    pub d: usize,
    pub e: Vec<CMat>,
    pub f: Vec<CMat>,
    /// Largest entrywise error of `tr(E_x F_y)` against the target.
    pub residual: f64,
}

#[derive(Clone, Serialize, Deserialize)]
struct PsdRecord {
    d: usize,
    e: Vec<JsonMatrix>,
    f: Vec<JsonMatrix>,
    residual: f64,
}

fn psd_from_json(d: usize, m: &JsonMatrix) -> Result<CMat> {
    let m = matrix_from_json(d, m)?;
    let (defect, i, j) = linalg::hermiticity_defect(&m);
    if defect > EPS_PSD {
        return Err(Error::invalid("psd factor", format!("not Hermitian at ({i}, {j})")));
    }
    let m = linalg::hermitize(&m);
    let low = linalg::min_eigenvalue(&m);
    if low < -EPS_PSD {
        return Err(Error::invalid("psd factor", format!("eigenvalue {low} is negative")));
    }
    Ok(m)
}

impl TryFrom<PsdRecord> for PsdFactorization {
    type Error = Error;
    fn try_from(r: PsdRecord) -> Result<Self> {
        if r.e.is_empty() || r.f.is_empty() {
            return Err(Error::invalid("psd factorization", "needs at least one factor on each side"));
        }
        let e = r.e.iter().map(|m| psd_from_json(r.d, m)).collect::<Result<_>>()?;
        let f = r.f.iter().map(|m| psd_from_json(r.d, m)).collect::<Result<_>>()?;
        Ok(Self { d: r.d, e, f, residual: r.residual })
    }
}

impl From<PsdFactorization> for PsdRecord {
    fn from(p: PsdFactorization) -> Self {
        PsdRecord {
            d: p.d,
            e: p.e.iter().map(matrix_to_json).collect(),
            f: p.f.iter().map(matrix_to_json).collect(),
            residual: p.residual,
        }
    }
}

impl PsdFactorization {
    /// The matrix `tr(E_x F_y)`.
    pub fn product(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.e.len(), self.f.len(), |x, y| linalg::trace_product(&self.e[x], &self.f[y]))
    }

    /// Diagonal embedding of a stochastic factorization.
    pub fn from_stochastic(s: &DMatrix<f64>, t: &DMatrix<f64>, residual: f64) -> Self {
        let d = s.ncols();
        let e = s.row_iter().map(|r| linalg::diag_real(&r.iter().copied().collect::<Vec<_>>())).collect();
        let f = t.column_iter().map(|col| linalg::diag_real(&col.iter().copied().collect::<Vec<_>>())).collect();
        Self { d, e, f, residual }
    }
}

/// Square-root factors `E_x = A_x A_x†` (first `m` blocks) and
/// `F_y = B_y B_y†` (remaining `n` blocks).
type Blocks = Vec<CMat>;

fn dot(a: &Blocks, b: &Blocks) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.iter().zip(y.iter()).map(|(u, v)| (u.conj() * v).re).sum::<f64>()).sum()
}

fn axpy(a: &Blocks, t: f64, b: &Blocks) -> Blocks {
    a.iter().zip(b).map(|(x, y)| x + y * c(t, 0.0)).collect()
}

fn scale(a: &Blocks, t: f64) -> Blocks {
    a.iter().map(|x| x * c(t, 0.0)).collect()
}

/// Loss `Σ (tr(E_x F_y) − C_xy)²` and its gradient with respect to the
/// square-root blocks.
fn loss_and_grad(target: &DMatrix<f64>, blocks: &Blocks) -> (f64, Blocks) {
    let m = target.nrows();
    let grams: Vec<CMat> = blocks.iter().map(|b| b * b.adjoint()).collect();
    let (e, f) = grams.split_at(m);
    let r = DMatrix::from_fn(m, f.len(), |x, y| linalg::trace_product(&e[x], &f[y]) - target[(x, y)]);
    let d = blocks[0].nrows();
    let mut grad = Vec::with_capacity(blocks.len());
    for x in 0..m {
        let mut w = CMat::zeros(d, d);
        for (y, fy) in f.iter().enumerate() {
            w += fy * c(4.0 * r[(x, y)], 0.0);
        }
        grad.push(w * &blocks[x]);
    }
    for (y, _) in f.iter().enumerate() {
        let mut w = CMat::zeros(d, d);
        for (x, ex) in e.iter().enumerate() {
            w += ex * c(4.0 * r[(x, y)], 0.0);
        }
        grad.push(w * &blocks[m + y]);
    }
    (r.norm_squared(), grad)
}

/// Limited-memory BFGS with Armijo backtracking.
fn minimize(target: &DMatrix<f64>, mut x: Blocks) -> Blocks {
    const MEMORY: usize = 10;
    let (mut value, mut grad) = loss_and_grad(target, &x);
    let mut history: VecDeque<(Blocks, Blocks, f64)> = VecDeque::with_capacity(MEMORY);
    for _ in 0..MAX_ITERATIONS {
        if value < 1e-26 {
            break;
        }
        // two-loop recursion
        let mut q = grad.clone();
        let mut alphas = Vec::with_capacity(history.len());
        for (s, y, rho) in history.iter().rev() {
            let a = rho * dot(s, &q);
            q = axpy(&q, -a, y);
            alphas.push(a);
        }
        if let Some((s, y, _)) = history.back() {
            q = scale(&q, dot(s, y) / dot(y, y));
        }
        for ((s, y, rho), a) in history.iter().zip(alphas.into_iter().rev()) {
            let b = rho * dot(y, &q);
            q = axpy(&q, a - b, s);
        }
        let mut dir = scale(&q, -1.0);
        let mut slope = dot(&grad, &dir);
        if slope >= 0.0 {
            history.clear();
            dir = scale(&grad, -1.0);
            slope = -dot(&grad, &grad);
        }
        if slope.abs() < 1e-32 {
            break;
        }
        let mut step = if history.is_empty() { 1.0 / grad.iter().map(|g| g.norm()).sum::<f64>().max(1.0) } else { 1.0 };
        let mut accepted = None;
        while step > 1e-20 {
            let trial = axpy(&x, step, &dir);
            let (tv, tg) = loss_and_grad(target, &trial);
            if tv <= value + 1e-4 * step * slope {
                accepted = Some((trial, tv, tg));
                break;
            }
            step *= 0.5;
        }
        let Some((trial, tv, tg)) = accepted else { break };
        let s = axpy(&trial, -1.0, &x);
        let y = axpy(&tg, -1.0, &grad);
        let sy = dot(&s, &y);
        if sy > 1e-300 {
            if history.len() == MEMORY {
                history.pop_front();
            }
            history.push_back((s, y, 1.0 / sy));
        }
        let improvement = value - tv;
        x = trial;
        value = tv;
        grad = tg;
        if improvement <= 1e-16 * value && improvement < 1e-30 {
            break;
        }
    }
    x
}

fn assemble(target: &CommMatrix, d: usize, blocks: &Blocks) -> PsdFactorization {
    let m = target.rows();
    let grams: Vec<CMat> = blocks.iter().map(|b| linalg::hermitize(&(b * b.adjoint()))).collect();
    let (e, f) = grams.split_at(m);
    let mut out = PsdFactorization { d, e: e.to_vec(), f: f.to_vec(), residual: 0.0 };
    out.residual = target.max_abs_diff(&out.product());
    out
}

/// Best PSD factorization with `d × d` factors over `restarts` seeded starts
/// (plus the diagonal trivial start when `d ≥ min(m, n)`).
/// Success means `residual ≤ EPS_FACT`; failure is a large residual, not an error.
pub fn psd_factorize(target_matrix: &CommMatrix, d: usize, restarts: usize, seed: u64) -> Result<PsdFactorization> {
    if d == 0 {
        return Err(Error::OutOfDomain("inner dimension must be at least 1".into()));
    }
    let target = target_matrix.entries();
    let (m, n) = target.shape();
    let trivial = (d >= m.min(n)).then(|| {
        let nn = super::nonneg::nonneg_factorize(target_matrix, d, 0, seed).expect("trivial start exists");
        PsdFactorization::from_stochastic(&nn.s, &nn.t, nn.residual)
    });
    let mean = target.sum() / (m * n) as f64;
    let init_scale = (mean / (d * d * d) as f64).powf(0.25);
    let runs: Vec<PsdFactorization> = (0..=restarts)
        .into_par_iter()
        .filter_map(|r| {
            if r == 0 {
                return trivial.clone();
            }
            let mut rng = stream(seed, r as u64);
            let start: Blocks = (0..m + n).map(|_| linalg::ginibre(&mut rng, d, d) * c(init_scale / 2f64.sqrt(), 0.0)).collect();
            Some(assemble(target_matrix, d, &minimize(target, start)))
        })
        .collect();
    runs.into_iter()
        .reduce(|best, f| if f.residual < best.residual { f } else { best })
        .ok_or_else(|| Error::OutOfDomain("restarts must be positive when d < min(m, n)".into()))
}
