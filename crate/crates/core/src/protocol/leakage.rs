use serde::{Deserialize, Serialize};

use super::transcript::{Scheme, Transcript};
use crate::quantum::Label;
use crate::Result;

/// What a receiver's symbol reveals about the sender's symbol.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolLeakage {
    pub sender: Label,
    /// Weight of this sender symbol in the average (its frequency).
    pub weight: f64,
    /// Receiver-symbol distribution given this sender symbol, in alphabet order.
    pub conditional: Vec<f64>,
    /// KL divergence (bits) from uniform over the other symbols; infinite
    /// (serialized as `null`) when the receiver ever repeats the sender.
    pub divergence: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeakageReport {
    pub scheme: Scheme,
    pub alphabet: Vec<Label>,
    pub per_symbol: Vec<SymbolLeakage>,
    /// Frequency-weighted average of the per-symbol divergences.
    pub divergence: f64,
}

/// `D(p‖q)` in bits; `+∞` where `q` has no mass but `p` has.
pub fn kl_divergence_bits(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .filter(|(&pi, _)| pi > 0.0)
        .map(|(&pi, &qi)| if qi > 0.0 { pi * (pi / qi).log2() } else { f64::INFINITY })
        .sum::<f64>()
        .max(0.0)
}

fn report(scheme: Scheme, alphabet: Vec<Label>, rows: Vec<(f64, Vec<f64>)>) -> LeakageReport {
    let n = alphabet.len();
    let per_symbol: Vec<SymbolLeakage> = rows
        .into_iter()
        .enumerate()
        .map(|(x, (weight, conditional))| {
            let ideal: Vec<f64> = (0..n).map(|y| if y == x { 0.0 } else { 1.0 / (n - 1) as f64 }).collect();
            SymbolLeakage { sender: alphabet[x].clone(), weight, divergence: kl_divergence_bits(&conditional, &ideal), conditional }
        })
        .collect();
    let divergence = per_symbol.iter().filter(|s| s.weight > 0.0).map(|s| s.weight * s.divergence).sum();
    LeakageReport { scheme, alphabet, per_symbol, divergence }
}

/// Empirical leakage of `party`'s sequence about the sender's. Sender
/// symbols that never occur get weight 0 and an all-zero conditional.
pub fn leakage_report(t: &Transcript, party: &str) -> Result<LeakageReport> {
    let seq = t.receiver(party)?;
    let n = t.alphabet().len();
    let index = |l: &Label| t.alphabet().iter().position(|a| a == l).expect("validated symbol");
    let mut counts = vec![vec![0u64; n]; n];
    for (a, b) in t.sender().iter().zip(seq) {
        counts[index(a)][index(b)] += 1;
    }
    let total = t.len().max(1) as f64;
    let rows = counts
        .into_iter()
        .map(|row| {
            let k: u64 = row.iter().sum();
            let cond = row.iter().map(|&c| if k > 0 { c as f64 / k as f64 } else { 0.0 }).collect();
            (k as f64 / total, cond)
        })
        .collect();
    Ok(report(t.scheme(), t.alphabet().to_vec(), rows))
}

/// Exact leakage of each scheme from its conditional law.
pub fn leakage_analytic(scheme: Scheme) -> LeakageReport {
    let rows = match scheme {
        Scheme::Quantum => (0..3)
            .map(|x| (1.0 / 3.0, (0..3).map(|y| if y == x { 0.0 } else { 0.5 }).collect()))
            .collect(),
        // sets {a, b} and {c, d}
        Scheme::Classical4 => (0..4)
            .map(|x| {
                let other = if x < 2 { [2, 3] } else { [0, 1] };
                (0.25, (0..4).map(|y| if other.contains(&y) { 0.5 } else { 0.0 }).collect())
            })
            .collect(),
        // sets {a} and {b, c}: a → uniform on {b, c}; b, c → a
        Scheme::Classical3 => vec![(0.5, vec![0.0, 0.5, 0.5]), (0.25, vec![1.0, 0.0, 0.0]), (0.25, vec![1.0, 0.0, 0.0])],
    };
    report(scheme, scheme.alphabet(), rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{run_classical4, run_quantum};

    #[test]
    fn analytic_values() {
        assert_eq!(leakage_analytic(Scheme::Quantum).divergence, 0.0);
        let c4 = leakage_analytic(Scheme::Classical4);
        assert!((c4.divergence - (3f64.log2() - 1.0)).abs() < 1e-15);
        let c3 = leakage_analytic(Scheme::Classical3);
        let per: Vec<f64> = c3.per_symbol.iter().map(|s| s.divergence).collect();
        assert_eq!(per, [0.0, 1.0, 1.0]);
    }

    #[test]
    fn empirical_matches_analytic() {
        let t = run_classical4(20_000, 1).unwrap();
        let r = leakage_report(&t, "bob").unwrap();
        assert!((r.divergence - (3f64.log2() - 1.0)).abs() < 0.01);
        let t = run_quantum(20_000, &["bob"], 1).unwrap();
        assert!(leakage_report(&t, "bob").unwrap().divergence < 0.01);
    }

    #[test]
    fn repeated_symbol_is_infinite() {
        assert_eq!(kl_divergence_bits(&[0.5, 0.5], &[0.0, 1.0]), f64::INFINITY);
        assert_eq!(kl_divergence_bits(&[0.0, 1.0], &[0.0, 1.0]), 0.0);
    }
}
