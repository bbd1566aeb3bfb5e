use serde::{Deserialize, Serialize};

use super::matrix::{from_implementation, CommMatrix, Implementation};
use super::nonneg::NonnegFactorization;
use super::psd::PsdFactorization;
use crate::linalg::{self, c, CMat};
use crate::quantum::{DensityMatrix, Povm};
use crate::tol::{EPS_FACT, EPS_IMPL};
use crate::{Error, Result};

/// Eigenvalues of `K = Σ F_y` below this fraction of the largest are
/// treated as outside its support.
const SUPPORT_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Factorization {
    Nonneg(NonnegFactorization),
    Psd(PsdFactorization),
}

impl Factorization {
    pub fn d(&self) -> usize {
        match self {
            Factorization::Nonneg(f) => f.d,
            Factorization::Psd(f) => f.d,
        }
    }

    pub fn residual(&self) -> f64 {
        match self {
            Factorization::Nonneg(f) => f.residual,
            Factorization::Psd(f) => f.residual,
        }
    }
}

fn outcome_labels(n: usize) -> Vec<String> {
    (0..n).map(|y| y.to_string()).collect()
}

/// Turns a successful factorization of `target` into states and a decoder
/// whose communication matrix reproduces `target` within `EPS_IMPL`.
///
/// Outcome labels are the column indices `"0"`, `"1"`, …. Stochastic
/// factorizations become diagonal states with a diagonal decoder; PSD
/// factorizations are normalized with `K = Σ_y F_y`, restricted to the
/// support of `K` when it is singular.
pub fn factorization_to_implementation(f: &Factorization, target: &CommMatrix) -> Result<Implementation> {
    if f.residual() > EPS_FACT {
        return Err(Error::OutOfDomain(format!("factorization residual {} exceeds {EPS_FACT}", f.residual())));
    }
    let imp = match f {
        Factorization::Nonneg(nf) => from_stochastic(nf, target)?,
        Factorization::Psd(pf) => from_psd(pf, target)?,
    };
    let realized = from_implementation(&imp)?;
    let mut worst = (0.0, 0);
    for x in 0..target.rows() {
        for y in 0..target.cols() {
            let err = (realized.get(x, y) - target.get(x, y)).abs();
            if err > worst.0 {
                worst = (err, x);
            }
        }
    }
    if worst.0 > EPS_IMPL {
        return Err(Error::Conversion {
            index: worst.1,
            reason: format!("realized row deviates from the target by {}", worst.0),
        });
    }
    Ok(imp)
}

fn check_shape(target: &CommMatrix, m: usize, n: usize) -> Result<()> {
    if m != target.rows() {
        return Err(Error::DimensionMismatch { expected: target.rows(), found: m });
    }
    if n != target.cols() {
        return Err(Error::DimensionMismatch { expected: target.cols(), found: n });
    }
    Ok(())
}

fn from_stochastic(f: &NonnegFactorization, target: &CommMatrix) -> Result<Implementation> {
    check_shape(target, f.s.nrows(), f.t.ncols())?;
    let states = f
        .s
        .row_iter()
        .enumerate()
        .map(|(x, row)| {
            let p: Vec<f64> = row.iter().map(|v| v.max(0.0)).collect();
            let total: f64 = p.iter().sum();
            let p: Vec<f64> = p.iter().map(|v| v / total).collect();
            DensityMatrix::new(linalg::diag_real(&p))
                .map_err(|e| Error::Conversion { index: x, reason: e.to_string() })
        })
        .collect::<Result<Vec<_>>>()?;
    let effects = f.t.column_iter().map(|col| linalg::diag_real(&col.iter().map(|v| v.max(0.0)).collect::<Vec<_>>()));
    let decoder = Povm::from_matrices(outcome_labels(f.t.ncols()).into_iter().zip(effects))?;
    Implementation::new(states, decoder)
}

fn from_psd(f: &PsdFactorization, target: &CommMatrix) -> Result<Implementation> {
    check_shape(target, f.e.len(), f.f.len())?;
    let k: CMat = f.f.iter().sum();
    let (values, vectors) = linalg::hermitian_eigen(&k);
    let top = values.last().copied().unwrap_or(0.0);
    let support: Vec<usize> = (0..values.len()).filter(|&i| values[i] > SUPPORT_TOL * top.max(f64::MIN_POSITIVE)).collect();
    if support.is_empty() {
        return Err(Error::Conversion { index: 0, reason: "decoder factors sum to zero".into() });
    }
    // columns of `v` span the support of K; in that basis K is diagonal
    let v = CMat::from_fn(f.d, support.len(), |i, j| vectors[(i, support[j])]);
    let lambdas: Vec<f64> = support.iter().map(|&i| values[i]).collect();
    let half = linalg::diag_real(&lambdas.iter().map(|l| l.sqrt()).collect::<Vec<_>>());
    let inv_half = linalg::diag_real(&lambdas.iter().map(|l| 1.0 / l.sqrt()).collect::<Vec<_>>());
    let reduce = |m: &CMat| linalg::hermitize(&(v.adjoint() * m * &v));

    let effects: Vec<CMat> = f.f.iter().map(|fy| linalg::hermitize(&(&inv_half * reduce(fy) * &inv_half))).collect();
    let states = f
        .e
        .iter()
        .enumerate()
        .map(|(x, ex)| {
            let raw = linalg::spectral_map(&(&half * reduce(ex) * &half), |l| l.max(0.0));
            let tr = raw.trace().re;
            if tr.is_nan() || tr <= 1e-12 {
                return Err(Error::Conversion { index: x, reason: format!("state factor has trace {tr} on the decoder support") });
            }
            DensityMatrix::new(raw * c(1.0 / tr, 0.0)).map_err(|e| Error::Conversion { index: x, reason: e.to_string() })
        })
        .collect::<Result<Vec<_>>>()?;
    let decoder = Povm::from_matrices(outcome_labels(effects.len()).into_iter().zip(effects))?;
    Implementation::new(states, decoder)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::commmatrix::{antidist_matrix, identity_matrix, nonneg_factorize, psd_factorize};

    #[test]
    fn identity_becomes_classical_projective() {
        let c3 = identity_matrix(3).unwrap();
        let f = nonneg_factorize(&c3, 3, 0, 0).unwrap();
        let imp = factorization_to_implementation(&Factorization::Nonneg(f), &c3).unwrap();
        for (x, s) in imp.states().iter().enumerate() {
            assert_eq!(s, &DensityMatrix::basis(3, x));
        }
        assert_eq!(from_implementation(&imp).unwrap(), c3);
    }

    #[test]
    fn singular_decoder_support_is_restricted() {
        // the third dimension is never read out
        let mut f = PsdFactorization::from_stochastic(
            &nalgebra::DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]),
            &nalgebra::DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]),
            0.0,
        );
        f.f[0][(2, 2)] = c(0.0, 0.0);
        let c2 = identity_matrix(2).unwrap();
        let imp = factorization_to_implementation(&Factorization::Psd(f), &c2).unwrap();
        assert_eq!(imp.dim(), 2);
        assert!(from_implementation(&imp).unwrap().max_abs_diff(c2.entries()) < 1e-12);
    }

    #[test]
    fn qubit_a3_roundtrip() {
        let a3 = antidist_matrix(3).unwrap();
        let f = psd_factorize(&a3, 2, 8, 2).unwrap();
        let imp = factorization_to_implementation(&Factorization::Psd(f), &a3).unwrap();
        assert_eq!(imp.dim(), 2);
        assert!(from_implementation(&imp).unwrap().max_abs_diff(a3.entries()) <= EPS_IMPL);
    }

    #[test]
    fn failed_factorization_is_refused() {
        let a3 = antidist_matrix(3).unwrap();
        let f = PsdFactorization::from_stochastic(
            &nalgebra::DMatrix::from_element(3, 1, 1.0),
            &nalgebra::DMatrix::from_element(1, 3, 1.0 / 3.0),
            1.0 / 3.0,
        );
        assert!(factorization_to_implementation(&Factorization::Psd(f), &a3).is_err());
    }
}
