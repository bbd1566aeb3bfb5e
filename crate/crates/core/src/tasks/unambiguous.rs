use super::game::{default_alphabet, Encoding};
use crate::linalg::{self, c, CMat};
use crate::quantum::{DensityMatrix, Label, Povm};
use crate::tol::EPS_UA;
use crate::{Error, Result};

/// Success `(1/N) Σ_x tr(ρ_x M(x))` of a decoder that never errs.
///
/// The decoder carries the alphabet plus the inconclusive label `?`. Any
/// cross probability `tr(ρ_x M(y))`, `x ≠ y`, above the zero-error threshold
/// is rejected, reporting the worst pair.
pub fn ua_success(enc: &Encoding, dec: &Povm) -> Result<f64> {
    enc.check_decoder(dec, &[Label::inconclusive()])?;
    let mut worst: Option<(usize, usize, f64)> = None;
    let mut total = 0.0;
    for (x, rho) in enc.states().iter().enumerate() {
        for (y, label) in enc.alphabet().iter().enumerate() {
            let p = dec.probability(rho, label.as_str());
            if x == y {
                total += p;
            } else if p > EPS_UA && worst.is_none_or(|(_, _, w)| p > w) {
                worst = Some((x, y, p));
            }
        }
    }
    if let Some((x, y, p)) = worst {
        return Err(Error::Unambiguity {
            sent: enc.alphabet()[x].to_string(),
            decoded: enc.alphabet()[y].to_string(),
            probability: p,
        });
    }
    Ok(total / enc.len() as f64)
}

/// The `(d-1)/N` ceiling on unambiguous success, valid for `N > d`.
pub fn ua_bound(d: usize, n: usize) -> Result<f64> {
    if d == 0 || n <= d {
        return Err(Error::OutOfDomain(format!("unambiguous bound needs N > d ≥ 1, got d = {d}, N = {n}")));
    }
    Ok((d - 1) as f64 / n as f64)
}

/// Dit strategy reaching `(d-1)/N`: symbols `0..d-1` use orthogonal levels,
/// every symbol from `d-1` on shares level `d-1`, and that level is read as `?`.
pub fn classical_ua_strategy(d: usize, n: usize) -> Result<(Encoding, Povm)> {
    ua_bound(d, n)?;
    let alphabet = default_alphabet(n);
    let states = (0..n).map(|x| DensityMatrix::basis(d, x.min(d - 1))).collect();
    let mut effects: Vec<(Label, CMat)> = alphabet
        .iter()
        .enumerate()
        .map(|(x, l)| {
            let m = if x + 1 < d { DensityMatrix::basis(d, x).matrix().clone() } else { CMat::zeros(d, d) };
            (l.clone(), m)
        })
        .collect();
    effects.push((Label::inconclusive(), DensityMatrix::basis(d, d - 1).matrix().clone()));
    Ok((Encoding::new(alphabet, states)?, Povm::from_matrices(effects)?))
}

/// Minimum-error decoder `M'(x) = M(x) + M(?)/N` obtained by guessing
/// uniformly whenever the unambiguous decoder is inconclusive.
pub fn ua_to_me_decoder(enc: &Encoding, dec: &Povm) -> Result<Povm> {
    enc.check_decoder(dec, &[Label::inconclusive()])?;
    let n = enc.len() as f64;
    let share = dec.effect(Label::INCONCLUSIVE).expect("checked").matrix() / c(n, 0.0);
    Povm::from_matrices(enc.alphabet().iter().map(|x| {
        let m = dec.effect(x.as_str()).expect("checked").matrix() + &share;
        (x.clone(), linalg::hermitize(&m))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tasks::me_success;

    #[test]
    fn bounds() {
        assert_eq!(ua_bound(2, 3).unwrap(), 1.0 / 3.0);
        assert_eq!(ua_bound(2, 4).unwrap(), 0.25);
        assert_eq!(ua_bound(3, 4).unwrap(), 0.5);
        assert!(ua_bound(3, 3).is_err());
    }

    #[test]
    fn classical_strategy_reaches_bound() {
        let (enc, dec) = classical_ua_strategy(2, 3).unwrap();
        assert_eq!(ua_success(&enc, &dec).unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn all_inconclusive_scores_zero() {
        let (enc, _) = classical_ua_strategy(2, 3).unwrap();
        let dec = Povm::trivial(2, Label::inconclusive()).padded(["a", "b", "c"]).unwrap();
        assert_eq!(ua_success(&enc, &dec).unwrap(), 0.0);
    }

    #[test]
    fn orthogonal_pair_is_unambiguous() {
        let enc = Encoding::with_default_alphabet(vec![DensityMatrix::basis(2, 0), DensityMatrix::basis(2, 1)]).unwrap();
        let dec = Povm::from_matrices([
            ("a", DensityMatrix::basis(2, 0).matrix().clone()),
            ("b", DensityMatrix::basis(2, 1).matrix().clone()),
            ("?", CMat::zeros(2, 2)),
        ])
        .unwrap();
        assert_eq!(ua_success(&enc, &dec).unwrap(), 1.0);
    }

    #[test]
    fn reports_worst_violation() {
        // minimum-error decoder of the bit strategy mislabels c as a half the time
        let (enc, _) = classical_ua_strategy(2, 3).unwrap();
        let dec = Povm::from_matrices([
            ("a", DensityMatrix::basis(2, 0).matrix().clone()),
            ("b", DensityMatrix::basis(2, 1).matrix() * c(0.5, 0.0)),
            ("c", DensityMatrix::basis(2, 1).matrix() * c(0.5, 0.0)),
            ("?", CMat::zeros(2, 2)),
        ])
        .unwrap();
        match ua_success(&enc, &dec) {
            Err(Error::Unambiguity { sent, decoded, probability }) => {
                assert_eq!((sent.as_str(), decoded.as_str()), ("b", "c"));
                assert_eq!(probability, 0.5);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn derived_decoder_dominates_per_symbol() {
        let (enc, dec) = classical_ua_strategy(3, 5).unwrap();
        let me = ua_to_me_decoder(&enc, &dec).unwrap();
        for (x, rho) in enc.alphabet().iter().zip(enc.states()) {
            assert!(me.probability(rho, x.as_str()) >= dec.probability(rho, x.as_str()) - 1e-15);
        }
        assert!(me_success(&enc, &me).unwrap() >= ua_success(&enc, &dec).unwrap());
    }
}
