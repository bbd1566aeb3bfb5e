//! Seeded random instances shared by the integration tests.
#![allow(dead_code)]

use commlab::linalg::{self, c, CMat};
use commlab::quantum::{DensityMatrix, Label, Povm};
use commlab::rng::StreamRng;
use commlab::tasks::{default_alphabet, Encoding};
use rand::Rng;

/// Random density matrix of rank `rank` (Wishart with `rank` columns).
pub fn random_state(rng: &mut StreamRng, d: usize, rank: usize) -> DensityMatrix {
    let g = linalg::ginibre(rng, d, rank);
    let m = &g * g.adjoint();
    let tr = m.trace();
    DensityMatrix::new(m / tr).unwrap()
}

/// Random POVM with `n` outcomes whose effect `j` has rank `ranks[j]`
/// (generically), normalized by `S^{-1/2}` with `S = Σ G_j G_j†`.
pub fn random_povm_with_ranks(rng: &mut StreamRng, d: usize, ranks: &[usize], labels: &[Label]) -> Povm {
    assert!(ranks.iter().sum::<usize>() >= d, "effects must span the space");
    let raw: Vec<CMat> = ranks
        .iter()
        .map(|&k| {
            let g = linalg::ginibre(rng, d, k);
            &g * g.adjoint()
        })
        .collect();
    let total: CMat = raw.iter().sum();
    let k = linalg::psd_inv_sqrt(&total, 1e-12);
    Povm::from_matrices(labels.iter().cloned().zip(raw.iter().map(|e| linalg::hermitize(&(&k * e * &k))))).unwrap()
}

/// Random POVM with `n` outcomes and effect ranks in `1..=d`.
pub fn random_povm(rng: &mut StreamRng, d: usize, n: usize, labels: &[Label]) -> Povm {
    loop {
        let ranks: Vec<usize> = (0..n).map(|_| rng.random_range(1..=d)).collect();
        if ranks.iter().sum::<usize>() >= d {
            return random_povm_with_ranks(rng, d, &ranks, labels);
        }
    }
}

/// Random POVM with `n ≥ 2` outcomes and total effect rank between `d` and `d²`.
pub fn random_dilatable_povm(rng: &mut StreamRng, d: usize, n: usize) -> Povm {
    let labels: Vec<Label> = (0..n).map(|j| Label::new(j.to_string())).collect();
    loop {
        let ranks: Vec<usize> = (0..n).map(|_| rng.random_range(1..=d)).collect();
        let total: usize = ranks.iter().sum();
        if total >= d && total <= d * d {
            return random_povm_with_ranks(rng, d, &ranks, &labels);
        }
    }
}

/// Random minimum-error instance: `n` states of random rank and a random
/// decoder over the default alphabet.
pub fn random_me_instance(rng: &mut StreamRng, d: usize, n: usize) -> (Encoding, Povm) {
    let states = (0..n).map(|_| { let r = rng.random_range(1..=d); random_state(rng, d, r) }).collect();
    let enc = Encoding::with_default_alphabet(states).unwrap();
    let dec = random_povm(rng, d, n, &default_alphabet(n));
    (enc, dec)
}

fn random_unitary(rng: &mut StreamRng, d: usize) -> CMat {
    let g = linalg::ginibre(rng, d, d);
    let qr = g.qr();
    qr.q()
}

/// Random feasible unambiguous instance. In a random basis, state `x` is
/// supported on a random nonempty subset `S_x` of basis vectors; the effect
/// for `x` is a weighted projector onto the basis vectors outside every
/// other support, and `"?"` takes the remainder.
pub fn random_ua_instance(rng: &mut StreamRng, d: usize, n: usize) -> (Encoding, Povm) {
    let u = random_unitary(rng, d);
    let supports: Vec<Vec<bool>> = (0..n)
        .map(|_| loop {
            let s: Vec<bool> = (0..d).map(|_| rng.random_bool(0.5)).collect();
            if s.iter().any(|&b| b) {
                break s;
            }
        })
        .collect();
    let rotate = |diag: &[f64]| linalg::hermitize(&(&u * linalg::diag_real(diag) * u.adjoint()));
    let states = supports
        .iter()
        .map(|s| {
            let w: Vec<f64> = s.iter().map(|&b| if b { rng.random::<f64>() + 1e-3 } else { 0.0 }).collect();
            let t: f64 = w.iter().sum();
            DensityMatrix::new(rotate(&w.iter().map(|v| v / t).collect::<Vec<_>>())).unwrap()
        })
        .collect();
    let alphabet = default_alphabet(n);
    let mut effects: Vec<(Label, CMat)> = Vec::new();
    let mut used = vec![0.0; d];
    for (x, symbol) in alphabet.iter().enumerate() {
        let weight = rng.random::<f64>() / n as f64;
        let diag: Vec<f64> = (0..d)
            .map(|k| if (0..n).all(|y| y == x || !supports[y][k]) { weight } else { 0.0 })
            .collect();
        for k in 0..d {
            used[k] += diag[k];
        }
        effects.push((symbol.clone(), rotate(&diag)));
    }
    effects.push((Label::inconclusive(), rotate(&used.iter().map(|v| 1.0 - v).collect::<Vec<_>>())));
    let enc = Encoding::new(alphabet, states).unwrap();
    (enc, Povm::from_matrices(effects).unwrap())
}

pub fn scaled(m: &CMat, t: f64) -> CMat {
    m * c(t, 0.0)
}
