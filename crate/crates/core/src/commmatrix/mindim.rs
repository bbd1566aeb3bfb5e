use serde::{Deserialize, Serialize};

use super::bounds::{distinguishable_rows, linear_rank, rank_root_bound, rectangle_cover_number};
use super::convert::Factorization;
use super::matrix::CommMatrix;
use super::nonneg::nonneg_factorize;
use super::psd::{psd_factorize, PsdFactorization};
use crate::tol::EPS_FACT;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DimKind {
    Classical,
    Quantum,
}

/// Which argument produced the certified lower bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LowerMethod {
    /// Nonnegative rank is at least the linear rank.
    LinearRank,
    /// Nonnegative rank is at least the rectangle-cover number of the support.
    RectangleCover,
    /// `d × d` complex factors span at most `d²` dimensions.
    PsdRank,
    /// Rows with pairwise disjoint supports need orthogonal states.
    Distinguishability,
}

/// Best residual found at one inner dimension.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Attempt {
    pub d: usize,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimCertificate {
    pub kind: DimKind,
    pub lower: usize,
    /// Smallest dimension with a successful factorization; `None` when no
    /// dimension up to `d_max` succeeded.
    pub upper: Option<usize>,
    pub tight: bool,
    pub lower_method: LowerMethod,
    pub witness: Option<Factorization>,
    pub attempts: Vec<Attempt>,
}

fn lower_bound(c: &CommMatrix, kind: DimKind) -> (usize, LowerMethod) {
    match kind {
        DimKind::Quantum => {
            let root = rank_root_bound(c);
            match distinguishable_rows(c) {
                k if k > root => (k, LowerMethod::Distinguishability),
                _ => (root, LowerMethod::PsdRank),
            }
        }
        DimKind::Classical => {
            let rank = linear_rank(c);
            match rectangle_cover_number(c) {
                Ok(cover) if cover > rank => (cover, LowerMethod::RectangleCover),
                _ => (rank, LowerMethod::LinearRank),
            }
        }
    }
}

/// Searches `d = lower..=d_max` for the first successful factorization.
///
/// For the quantum kind a failed PSD search falls back to a stochastic
/// factorization at the same `d`, embedded diagonally, so the quantum upper
/// bound never exceeds the classical one for the same budget and seed.
pub fn min_dim(c: &CommMatrix, kind: DimKind, d_max: usize, budget: usize, seed: u64) -> Result<DimCertificate> {
    min_dim_with_tol(c, kind, d_max, budget, seed, EPS_FACT)
}

/// [`min_dim`] with a custom success threshold on the factorization residual.
pub fn min_dim_with_tol(c: &CommMatrix, kind: DimKind, d_max: usize, budget: usize, seed: u64, tol: f64) -> Result<DimCertificate> {
    if d_max == 0 {
        return Err(Error::OutOfDomain("d_max must be at least 1".into()));
    }
    let (lower, lower_method) = lower_bound(c, kind);
    let mut attempts = Vec::new();
    let mut witness = None;
    for d in lower..=d_max {
        let found = match kind {
            DimKind::Classical => Factorization::Nonneg(nonneg_factorize(c, d, budget, seed)?),
            DimKind::Quantum => {
                let pf = psd_factorize(c, d, budget, seed)?;
                if pf.residual <= tol {
                    Factorization::Psd(pf)
                } else {
                    let nf = nonneg_factorize(c, d, budget, seed)?;
                    if nf.residual < pf.residual {
                        Factorization::Psd(PsdFactorization::from_stochastic(&nf.s, &nf.t, nf.residual))
                    } else {
                        Factorization::Psd(pf)
                    }
                }
            }
        };
        attempts.push(Attempt { d, residual: found.residual() });
        if found.residual() <= tol {
            witness = Some(found);
            break;
        }
    }
    let upper = witness.as_ref().map(Factorization::d);
    Ok(DimCertificate { kind, lower, upper, tight: upper == Some(lower), lower_method, witness, attempts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::commmatrix::{antidist_matrix, identity_matrix};

    #[test]
    fn identity_is_tight_for_both_kinds() {
        for kind in [DimKind::Classical, DimKind::Quantum] {
            let cert = min_dim(&identity_matrix(3).unwrap(), kind, 4, 4, 0).unwrap();
            assert_eq!((cert.lower, cert.upper, cert.tight), (3, Some(3), true), "{kind:?}");
        }
    }

    #[test]
    fn unresolved_when_d_max_is_too_small() {
        let cert = min_dim(&antidist_matrix(3).unwrap(), DimKind::Classical, 2, 4, 0).unwrap();
        assert_eq!(cert.lower, 3);
        assert_eq!(cert.upper, None);
        assert!(!cert.tight);
        assert!(cert.attempts.is_empty());
        assert!(min_dim(&antidist_matrix(3).unwrap(), DimKind::Classical, 0, 4, 0).is_err());
    }
}
