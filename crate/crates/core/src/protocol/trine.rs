use crate::linalg::c;
use crate::quantum::{Label, Povm, PureState};
use crate::tasks::default_alphabet;

/// `ψ_a = |0⟩`, `ψ_b = −½|0⟩ + (√3/2)|1⟩`, `ψ_c = −½|0⟩ − (√3/2)|1⟩`.
pub fn trine_states() -> [PureState; 3] {
    let h = 3f64.sqrt() / 2.0;
    [(1.0, 0.0), (-0.5, h), (-0.5, -h)]
        .map(|(a0, a1)| PureState::from_amplitudes(&[c(a0, 0.0), c(a1, 0.0)]).expect("unit vector"))
}

/// `M(x) = (2/3)|ψ̄_x⟩⟨ψ̄_x|` with `ψ̄_a = |1⟩`, `ψ̄_b = −(√3/2)|0⟩ − ½|1⟩`,
/// `ψ̄_c = (√3/2)|0⟩ − ½|1⟩`, so that `⟨ψ̄_x|ψ_x⟩ = 0`.
pub fn antitrine_measurement() -> Povm {
    let h = 3f64.sqrt() / 2.0;
    let bars = [(0.0, 1.0), (-h, -0.5), (h, -0.5)]
        .map(|(a0, a1)| PureState::from_amplitudes(&[c(a0, 0.0), c(a1, 0.0)]).expect("unit vector"));
    Povm::from_matrices(trine_alphabet().into_iter().zip(bars.iter().map(|b| b.projector() * c(2.0 / 3.0, 0.0))))
        .expect("anti-trine effects are complete")
}

pub fn trine_alphabet() -> Vec<Label> {
    default_alphabet(3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity, max_abs_diff, CMat};

    #[test]
    fn overlaps_and_exclusion() {
        let states = trine_states();
        for x in 0..3 {
            for y in 0..3 {
                let ip = states[x].inner(&states[y]);
                let expected = if x == y { 1.0 } else { -0.5 };
                assert!((ip.re - expected).abs() < 1e-15 && ip.im.abs() < 1e-15);
            }
        }
        let meas = antitrine_measurement();
        for (x, (label, effect)) in meas.outcomes().iter().enumerate() {
            let p = crate::linalg::trace_product(&states[x].projector(), effect.matrix());
            assert!(p.abs() < 1e-15, "{label:?}");
        }
        let total: CMat = meas.outcomes().iter().map(|(_, e)| e.matrix().clone()).sum();
        assert!(max_abs_diff(&total, &identity(2)) < 1e-12);
    }
}
