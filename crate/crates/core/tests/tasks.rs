mod common;

use commlab::linalg::{self, c, CMat};
use commlab::quantum::{DensityMatrix, Label, PureState};
use commlab::rng::stream;
use commlab::tasks::*;

fn trine_encoding() -> Encoding {
    antidist_setup(3).unwrap().0
}

fn tetrahedron_encoding() -> Encoding {
    antidist_setup(4).unwrap().0
}

/// Grid search over real rank-one 3-outcome qubit POVMs: pick three
/// directions, solve for nonnegative weights making the effects complete.
fn grid_best_trine(steps: usize) -> f64 {
    let enc = trine_encoding();
    let rhos: Vec<[f64; 3]> = enc
        .states()
        .iter()
        .map(|s| {
            let m = s.matrix();
            [m[(0, 0)].re, m[(0, 1)].re, m[(1, 1)].re]
        })
        .collect();
    let dirs: Vec<(f64, f64)> = (0..steps)
        .map(|k| {
            let t = std::f64::consts::PI * k as f64 / steps as f64;
            (t.cos(), t.sin())
        })
        .collect();
    let mut best = 0.0f64;
    for (i, &(c1, s1)) in dirs.iter().enumerate() {
        for &(c2, s2) in &dirs {
            for &(c3, s3) in &dirs[i..] {
                // columns: (cos², cos·sin, sin²) per direction; target (1, 0, 1)
                let a = [[c1 * c1, c2 * c2, c3 * c3], [c1 * s1, c2 * s2, c3 * s3], [s1 * s1, s2 * s2, s3 * s3]];
                let Some(w) = solve3(a, [1.0, 0.0, 1.0]) else { continue };
                if w.iter().any(|&x| x < -1e-12) {
                    continue;
                }
                let value: f64 = [(c1, s1), (c2, s2), (c3, s3)]
                    .iter()
                    .zip(w)
                    .zip(&rhos)
                    .map(|((&(cc, ss), wk), r)| wk * (cc * cc * r[0] + 2.0 * cc * ss * r[1] + ss * ss * r[2]))
                    .sum::<f64>()
                    / 3.0;
                best = best.max(value);
            }
        }
    }
    best
}

fn solve3(a: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let det = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(a);
    if d.abs() < 1e-9 {
        return None;
    }
    let mut out = [0.0; 3];
    for (k, o) in out.iter_mut().enumerate() {
        let mut m = a;
        for r in 0..3 {
            m[r][k] = b[r];
        }
        *o = det(m) / d;
    }
    Some(out)
}

#[test]
fn trine_optimizer_matches_grid_oracle() {
    let grid = grid_best_trine(120);
    assert!(grid <= 2.0 / 3.0 + 1e-12);
    assert!(grid > 2.0 / 3.0 - 1e-3, "{grid}");

    let enc = trine_encoding();
    let (dec, value) = optimize_me_decoder(&enc, 8, 3).unwrap();
    assert!((value - 2.0 / 3.0).abs() < 1e-6, "{value}");
    assert!(value <= me_bound(2, 3).unwrap() + 1e-9);
    assert!(value >= grid - 1e-9);
    assert!((me_success(&enc, &dec).unwrap() - value).abs() < 1e-15);
}

#[test]
fn random_restarts_alone_reach_trine_optimum() {
    let enc = trine_encoding();
    let cfg = OptimizerConfig { restarts: 8, warm_start: false, ..OptimizerConfig::default() };
    let (_, value) = optimize_me_decoder_with(&enc, cfg, 21).unwrap();
    assert!((value - 2.0 / 3.0).abs() < 1e-6, "{value}");
}

#[test]
fn square_root_measurement_is_optimal_for_trine() {
    let enc = trine_encoding();
    let srm = square_root_measurement(&enc).unwrap();
    assert!((me_success(&enc, &srm).unwrap() - 2.0 / 3.0).abs() < 1e-12);
}

#[test]
fn tetrahedron_saturates_half() {
    let enc = tetrahedron_encoding();
    let (_, value) = optimize_me_decoder(&enc, 8, 4).unwrap();
    assert!(value <= 0.5 + 1e-6);
    assert!((value - 0.5).abs() < 1e-6, "{value}");
}

#[test]
fn optimizer_is_deterministic_and_never_beats_bound() {
    let mut rng = stream(77, 0);
    for trial in 0..5 {
        let states: Vec<DensityMatrix> = (0..4)
            .map(|_| {
                let g = linalg::ginibre(&mut rng, 3, 2);
                let m = &g * g.adjoint();
                let t = m.trace();
                DensityMatrix::new(m / t).unwrap()
            })
            .collect();
        let enc = Encoding::with_default_alphabet(states).unwrap();
        let (a, va) = optimize_me_decoder(&enc, 4, trial).unwrap();
        let (b, vb) = optimize_me_decoder(&enc, 4, trial).unwrap();
        assert_eq!(va.to_bits(), vb.to_bits());
        assert_eq!(a, b);
        assert!(va <= 0.75 + 1e-6);
        // the dual check: best encoding for this decoder scores (1/N)Σ m_x ≥ current
        let (_, dual) = optimal_encoding(&a).unwrap();
        assert!(dual >= va - 1e-12);
    }
}

/// Exact success of the classical bit strategy under a referee policy.
fn classical_exact(n: usize, policy: &RefereePolicy) -> f64 {
    let mut total = 0.0;
    for (correct, row) in policy.joint().iter().enumerate() {
        for (announced, &p) in row.iter().enumerate() {
            let hit = if announced != 0 {
                f64::from(u8::from(correct == 0))
            } else if correct != 0 {
                1.0 / (n - 1) as f64
            } else {
                0.0
            };
            total += p * hit;
        }
    }
    total
}

/// Exact success of the antidistinguishing qubit strategy: outcome y is the guess.
fn quantum_exact(n: usize, policy: &RefereePolicy) -> f64 {
    let (enc, dec) = antidist_setup(n).unwrap();
    let mut total = 0.0;
    for (correct, row) in policy.joint().iter().enumerate() {
        for (announced, &p) in row.iter().enumerate() {
            total += p * dec.probability(&enc.states()[announced], enc.alphabet()[correct].as_str());
        }
    }
    total
}

fn within_sigmas(estimate: f64, target: f64, rounds: u64, k: f64) -> bool {
    let sigma = (target * (1.0 - target) / rounds as f64).sqrt();
    (estimate - target).abs() <= k * sigma
}

#[test]
fn classical_play_uniform_and_point_masses() {
    let rounds = 100_000;
    let uniform = RefereePolicy::uniform(3).unwrap();
    assert!((classical_exact(3, &uniform) - 0.5).abs() < 1e-15);
    let r = pi_play_classical(3, &uniform, rounds, 1).unwrap();
    assert!(within_sigmas(r.success_probability, 0.5, rounds, 3.0), "{r:?}");

    let adversary = RefereePolicy::point_mass(3, 1, 2).unwrap();
    assert_eq!(classical_exact(3, &adversary), 0.0);
    assert_eq!(pi_play_classical(3, &adversary, rounds, 1).unwrap().success_probability, 0.0);

    // correct = a, announced = b: Alice sends 1 and Bob announces a, which is right
    let favourable = RefereePolicy::point_mass(3, 0, 1).unwrap();
    assert_eq!(classical_exact(3, &favourable), 1.0);
    assert_eq!(pi_play_classical(3, &favourable, 10_000, 2).unwrap().success_probability, 1.0);

    // correct = b, announced = a: Bob guesses uniformly in {b, c}
    let split = RefereePolicy::point_mass(3, 1, 0).unwrap();
    assert_eq!(classical_exact(3, &split), 0.5);
    let r = pi_play_classical(3, &split, rounds, 3).unwrap();
    assert!(within_sigmas(r.success_probability, 0.5, rounds, 4.0), "{r:?}");
}

#[test]
fn quantum_play_is_policy_independent() {
    let rounds = 100_000;
    for n in [3usize, 4] {
        let target = pi_bound(n).unwrap();
        let policies = [
            RefereePolicy::uniform(n).unwrap(),
            RefereePolicy::point_mass(n, 1, 2).unwrap(),
            RefereePolicy::point_mass(n, 0, 1).unwrap(),
            RefereePolicy::random(n, 10).unwrap(),
            RefereePolicy::random(n, 11).unwrap(),
        ];
        for (i, policy) in policies.iter().enumerate() {
            assert!((quantum_exact(n, policy) - target).abs() < 1e-12);
            let r = pi_play_quantum(n, policy, rounds, 100 + i as u64).unwrap();
            assert!(within_sigmas(r.success_probability, target, rounds, 4.0), "N={n} policy {i}: {r:?}");
            assert!(r.saturated);
        }
    }
}

#[test]
fn antidist_probabilities_are_exact() {
    for n in [3usize, 4] {
        let (enc, dec) = antidist_setup(n).unwrap();
        let total: CMat = dec.outcomes().iter().map(|(_, e)| e.matrix().clone()).sum();
        assert!(linalg::max_abs_diff(&total, &linalg::identity(2)) <= 1e-12);
        for (x, rho) in enc.states().iter().enumerate() {
            for (y, label) in enc.alphabet().iter().enumerate() {
                let p = dec.probability(rho, label.as_str());
                if x == y {
                    assert!(p.abs() <= 1e-12);
                } else {
                    assert!((p - 1.0 / (n - 1) as f64).abs() <= 1e-12, "{p}");
                }
            }
        }
    }
}

#[test]
fn trine_setup_matches_displayed_amplitudes() {
    let enc = trine_encoding();
    let h = 3f64.sqrt() / 2.0;
    let b = PureState::from_amplitudes(&[c(-0.5, 0.0), c(h, 0.0)]).unwrap().density();
    assert!(linalg::max_abs_diff(enc.state("b").unwrap().matrix(), b.matrix()) < 1e-15);
    let r = commlab::quantum::state_to_bloch(&b).unwrap();
    assert!((r[0] + h).abs() < 1e-15 && r[1].abs() < 1e-15 && (r[2] + 0.5).abs() < 1e-15);
}

#[test]
fn game_spec_json() {
    let g = GameSpec::uniform(GameKind::PartialIgnorance, 3).unwrap();
    let text = serde_json::to_string(&g).unwrap();
    assert!(text.starts_with(r#"{"kind":"partial_ignorance","N":3,"prior":["#), "{text}");
    let back: GameSpec = serde_json::from_str(r#"{"kind":"unambiguous","N":2}"#).unwrap();
    assert_eq!(back.prior().entries(), &[0.5, 0.5]);
    assert!(serde_json::from_str::<GameSpec>(r#"{"kind":"unambiguous","N":2,"prior":[1.0]}"#).is_err());
}

#[test]
fn non_uniform_prior_weights_terms() {
    let (enc, dec) = classical_me_strategy(2, 3).unwrap();
    let prior = commlab::quantum::ProbVector::new(vec![0.0, 1.0, 0.0]).unwrap();
    assert_eq!(me_success_with_prior(&enc, &dec, &prior).unwrap(), 1.0);
}

#[test]
fn ua_decoder_must_carry_inconclusive_label() {
    let (enc, dec) = classical_me_strategy(2, 3).unwrap();
    assert!(matches!(
        ua_success(&enc, &dec),
        Err(commlab::Error::LabelMismatch { ref missing, .. }) if missing == &vec![Label::INCONCLUSIVE.to_string()]
    ));
}

#[test]
fn random_instances_respect_the_bounds() {
    for i in 0..1_000u64 {
        let mut rng = stream(404, i);
        let d = 2 + (i % 2) as usize;
        let n = d + (i as usize / 2) % (d + 3);
        let (enc, dec) = common::random_me_instance(&mut rng, d, n);
        let p = me_success(&enc, &dec).unwrap();
        assert!(p <= me_bound(d, n).unwrap() + 1e-9, "me instance {i}: {p}");

        let n = d + 1 + (i as usize / 2) % (d + 2);
        let (enc, dec) = common::random_ua_instance(&mut rng, d, n);
        let ua = ua_success(&enc, &dec).unwrap();
        assert!(ua <= ua_bound(d, n).unwrap() + 1e-9, "ua instance {i}: {ua}");
        // guessing on "?" turns the decoder into a minimum-error one that does at least as well
        let me = me_success(&enc, &ua_to_me_decoder(&enc, &dec).unwrap()).unwrap();
        assert!(ua <= me + 1e-12 && me <= me_bound(d, n).unwrap() + 1e-9);
    }
}
