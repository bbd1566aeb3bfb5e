use rand::Rng;
use rayon::prelude::*;

use super::game::{default_alphabet, Encoding, RefereePolicy, StrategyReport};
use crate::linalg::{self, c};
use crate::quantum::{bloch_to_state, born_probabilities, DensityMatrix, Povm, PureState};
use crate::rng::{sample_index, stream, StreamRng};
use crate::{Error, Result};

/// Guessing rate `1/(N-1)` that Alice alone achieves knowing one wrong symbol.
pub fn pi_bound(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::OutOfDomain(format!("partial ignorance needs N ≥ 2, got {n}")));
    }
    Ok(1.0 / (n - 1) as f64)
}

/// Qubit states whose Bloch vectors form a regular simplex (triangle for
/// `N = 3`, tetrahedron for `N = 4`) with decoder `M(x) = (2/N)(1 − ρ_x)`.
///
/// Outcome `x` never occurs for state `ρ_x`, and every other outcome occurs
/// with probability `1/(N-1)`.
pub fn antidist_setup(n: usize) -> Result<(Encoding, Povm)> {
    let states: Vec<DensityMatrix> = match n {
        3 => {
            let h = 3f64.sqrt() / 2.0;
            [[c(1.0, 0.0), c(0.0, 0.0)], [c(-0.5, 0.0), c(h, 0.0)], [c(-0.5, 0.0), c(-h, 0.0)]]
                .iter()
                .map(|a| Ok(PureState::from_amplitudes(a)?.density()))
                .collect::<Result<_>>()?
        }
        4 => {
            let s = 1.0 / 3f64.sqrt();
            [[s, s, s], [s, -s, -s], [-s, s, -s], [-s, -s, s]]
                .into_iter()
                .map(bloch_to_state)
                .collect::<Result<_>>()?
        }
        _ => {
            return Err(Error::Unsupported(format!(
                "uniform antidistinguishability on a qubit exists only for N = 3, 4, got {n}"
            )))
        }
    };
    let weight = c(2.0 / n as f64, 0.0);
    let alphabet = default_alphabet(n);
    let dec = Povm::from_matrices(
        alphabet
            .iter()
            .cloned()
            .zip(states.iter().map(|s| (linalg::identity(2) - s.matrix()) * weight)),
    )?;
    Ok((Encoding::new(alphabet, states)?, dec))
}

/// Bit strategy for partial ignorance: Alice sends `0` iff the announced wrong
/// symbol is `a` (index 0). On `1` Bob guesses `a`; on `0` he guesses
/// uniformly among the other `N − 1` symbols.
#[derive(Clone, Copy, Debug)]
pub struct ClassicalBitStrategy {
    pub n: usize,
}

impl ClassicalBitStrategy {
    pub fn encode(&self, announced: usize) -> u8 {
        u8::from(announced != 0)
    }

    pub fn decode(&self, bit: u8, rng: &mut StreamRng) -> usize {
        if bit == 1 {
            0
        } else {
            rng.random_range(1..self.n)
        }
    }
}

pub fn pi_play_classical(n: usize, policy: &RefereePolicy, rounds: u64, seed: u64) -> Result<StrategyReport> {
    if n < 3 {
        return Err(Error::OutOfDomain(format!("classical partial-ignorance play needs N ≥ 3, got {n}")));
    }
    check_policy(n, policy)?;
    let strategy = ClassicalBitStrategy { n };
    simulate(n, policy, rounds, seed, |announced, rng| strategy.decode(strategy.encode(announced), rng))
}

/// Alice sends `ρ_w` for the announced wrong symbol `w`; Bob measures the
/// antidistinguishing decoder and announces the outcome he sees.
pub fn pi_play_quantum(n: usize, policy: &RefereePolicy, rounds: u64, seed: u64) -> Result<StrategyReport> {
    check_policy(n, policy)?;
    let (enc, dec) = antidist_setup(n)?;
    let table: Vec<Vec<f64>> = enc
        .states()
        .iter()
        .map(|s| Ok(born_probabilities(s, &dec)?.entries().to_vec()))
        .collect::<Result<_>>()?;
    simulate(n, policy, rounds, seed, |announced, rng| sample_index(&table[announced], rng.random()))
}

fn check_policy(n: usize, policy: &RefereePolicy) -> Result<()> {
    if policy.n() != n {
        return Err(Error::DimensionMismatch { expected: n, found: policy.n() });
    }
    Ok(())
}

/// Runs `rounds` independent rounds; round `r` draws from stream `r` of `seed`.
fn simulate<F>(n: usize, policy: &RefereePolicy, rounds: u64, seed: u64, guess: F) -> Result<StrategyReport>
where
    F: Fn(usize, &mut StreamRng) -> usize + Sync,
{
    if rounds == 0 {
        return Err(Error::invalid("simulation", "rounds must be positive"));
    }
    let tally = (0..rounds)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream(seed, r);
            let (correct, announced) = policy.sample(rng.random());
            let hit = guess(announced, &mut rng) == correct;
            (correct, hit)
        })
        .fold(
            || (vec![0u64; n], vec![0u64; n]),
            |(mut seen, mut won), (correct, hit)| {
                seen[correct] += 1;
                won[correct] += u64::from(hit);
                (seen, won)
            },
        )
        .reduce(
            || (vec![0u64; n], vec![0u64; n]),
            |(mut a, mut b), (c, d)| {
                a.iter_mut().zip(c).for_each(|(x, y)| *x += y);
                b.iter_mut().zip(d).for_each(|(x, y)| *x += y);
                (a, b)
            },
        );
    let (seen, won) = tally;
    let wins: u64 = won.iter().sum();
    let p = wins as f64 / rounds as f64;
    let bound = pi_bound(n)?;
    let sigma = (bound * (1.0 - bound) / rounds as f64).sqrt();
    Ok(StrategyReport {
        success_probability: p,
        bound,
        saturated: (p - bound).abs() <= 4.0 * sigma,
        stderr: (p * (1.0 - p) / rounds as f64).sqrt(),
        rounds: Some(rounds),
        seed: Some(seed),
        per_symbol: seen
            .iter()
            .zip(&won)
            .map(|(&s, &w)| (s > 0).then(|| w as f64 / s as f64))
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tasks::me_bound;

    #[test]
    fn pi_bounds() {
        assert_eq!(pi_bound(3).unwrap(), 0.5);
        assert_eq!(pi_bound(4).unwrap(), 1.0 / 3.0);
        assert_eq!(pi_bound(2).unwrap(), 1.0);
        assert!(pi_bound(1).is_err());
    }

    #[test]
    fn setups_only_for_three_and_four() {
        assert!(matches!(antidist_setup(5), Err(Error::Unsupported(_))));
        assert!(matches!(antidist_setup(2), Err(Error::Unsupported(_))));
        for n in [3, 4] {
            let (enc, dec) = antidist_setup(n).unwrap();
            let sum: [f64; 3] = enc.states().iter().fold([0.0; 3], |acc, s| {
                let r = crate::quantum::state_to_bloch(s).unwrap();
                [acc[0] + r[0], acc[1] + r[1], acc[2] + r[2]]
            });
            assert!(sum.iter().all(|v| v.abs() < 1e-12), "{sum:?}");
            assert_eq!(dec.len(), n);
            assert!(me_bound(2, n).is_ok());
        }
    }

    #[test]
    fn adversary_defeats_bit_strategy() {
        let policy = RefereePolicy::point_mass(3, 1, 2).unwrap();
        let report = pi_play_classical(3, &policy, 1000, 5).unwrap();
        assert_eq!(report.success_probability, 0.0);
        assert!(!report.saturated);
    }

    #[test]
    fn policy_dimension_is_checked() {
        let policy = RefereePolicy::uniform(4).unwrap();
        assert!(pi_play_quantum(3, &policy, 10, 0).is_err());
        assert!(pi_play_classical(3, &policy, 10, 0).is_err());
    }

    #[test]
    fn policy_validation() {
        assert!(RefereePolicy::new(vec![vec![0.5, 0.0], vec![0.0, 0.5]]).is_err());
        assert!(RefereePolicy::new(vec![vec![0.0, 0.6], vec![0.5, 0.0]]).is_err());
        assert!(RefereePolicy::new(vec![vec![0.0, 1.0]]).is_err());
        let p = RefereePolicy::random(4, 9).unwrap();
        assert_eq!(p, RefereePolicy::random(4, 9).unwrap());
        let text = serde_json::to_string(&RefereePolicy::point_mass(2, 0, 1).unwrap()).unwrap();
        assert_eq!(text, "[[0.0,1.0],[0.0,0.0]]");
    }
}
