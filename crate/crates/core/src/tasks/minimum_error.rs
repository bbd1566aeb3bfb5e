use rayon::prelude::*;

use super::game::{default_alphabet, Encoding};
use crate::linalg::{self, c, CMat};
use crate::quantum::{DensityMatrix, Effect, Povm, ProbVector, PureState};
use crate::rng::stream;
use crate::tol::EPS_OPT;
use crate::{Error, Result};

/// Average success `(1/N) Σ_x tr(ρ_x M(x))` of a decoder whose labels are the alphabet.
pub fn me_success(enc: &Encoding, dec: &Povm) -> Result<f64> {
    me_success_with_prior(enc, dec, &ProbVector::uniform(enc.len())?)
}

/// Success `Σ_x p_x tr(ρ_x M(x))` under a non-uniform prior.
pub fn me_success_with_prior(enc: &Encoding, dec: &Povm, prior: &ProbVector) -> Result<f64> {
    enc.check_decoder(dec, &[])?;
    if prior.len() != enc.len() {
        return Err(Error::DimensionMismatch { expected: enc.len(), found: prior.len() });
    }
    Ok(enc
        .alphabet()
        .iter()
        .zip(enc.states())
        .zip(prior.entries())
        .map(|((x, rho), p)| p * dec.probability(rho, x.as_str()))
        .sum())
}

/// The `d/N` ceiling on minimum-error success with a `d`-level carrier.
pub fn me_bound(d: usize, n: usize) -> Result<f64> {
    if d == 0 || n < d {
        return Err(Error::OutOfDomain(format!("minimum-error bound needs N ≥ d ≥ 1, got d = {d}, N = {n}")));
    }
    Ok(d as f64 / n as f64)
}

/// Dit strategy reaching `d/N`: symbols `1..d-1` get dedicated levels, symbol
/// `0` and symbols `d..N-1` share level `0`, and outcome `0` is resolved by a
/// uniform guess among the sharing symbols.
///
/// For `d = 2, N = 3` this is the bit strategy `a → 0, b → 1, c → 0`.
pub fn classical_me_strategy(d: usize, n: usize) -> Result<(Encoding, Povm)> {
    me_bound(d, n)?;
    let alphabet = default_alphabet(n);
    let level = |x: usize| if x < d { x } else { 0 };
    let states = (0..n).map(|x| DensityMatrix::basis(d, level(x))).collect();
    let shared = n - d + 1;
    let outcomes = (0..n)
        .map(|x| {
            let weight = if level(x) == 0 { 1.0 / shared as f64 } else { 1.0 };
            let m = DensityMatrix::basis(d, level(x)).matrix() * c(weight, 0.0);
            Ok((alphabet[x].clone(), Effect::new(m)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((Encoding::new(alphabet, states)?, Povm::new(outcomes)?))
}

/// Pretty-good measurement `M(x) = S^{-1/2} p_x ρ_x S^{-1/2}`, `S = Σ p_x ρ_x`.
/// The complement of the support of `S` is added to the first outcome.
pub fn square_root_measurement(enc: &Encoding) -> Result<Povm> {
    let n = enc.len() as f64;
    let d = enc.dim();
    let avg: CMat = enc.states().iter().map(|s| s.matrix() / c(n, 0.0)).sum();
    let inv = linalg::psd_inv_sqrt(&avg, 1e-12);
    let mut effects: Vec<CMat> = enc.states().iter().map(|s| &inv * (s.matrix() / c(n, 0.0)) * &inv).collect();
    let total: CMat = effects.iter().sum();
    effects[0] += linalg::identity(d) - total;
    Povm::from_matrices(enc.alphabet().iter().cloned().zip(effects))
}

/// For a fixed decoder the best encoding sends each symbol `x` to a top
/// eigenvector of `M(x)`, scoring `m_x`, its largest eigenvalue. Returns that
/// encoding and `(1/N) Σ m_x`.
pub fn optimal_encoding(dec: &Povm) -> Result<(Encoding, f64)> {
    let mut states = Vec::with_capacity(dec.len());
    let mut total = 0.0;
    for (_, effect) in dec.outcomes() {
        let (values, vectors) = linalg::hermitian_eigen(effect.matrix());
        let top = values.len() - 1;
        total += values[top];
        states.push(PureState::normalized(vectors.column(top).into_owned())?.density());
    }
    let enc = Encoding::new(dec.labels().cloned().collect(), states)?;
    Ok((enc, total / dec.len() as f64))
}

#[derive(Clone, Copy, Debug)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iterations: usize,
    /// Stop once the objective gains less than this over `window` iterations.
    pub tolerance: f64,
    pub window: usize,
    /// Add a run started from the square-root measurement.
    pub warm_start: bool,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self { restarts: 32, max_iterations: 5000, tolerance: 1e-10, window: 50, warm_start: true }
    }
}

/// Searches for the decoder maximizing minimum-error success.
///
/// Decoders are parameterized by blocks `B_y` with `M(y) = B_y* B_y` and
/// `Σ B_y* B_y = 1`, i.e. a point on the complex Stiefel manifold. Each step
/// moves along the projected gradient and renormalizes with
/// `A ↦ A K^{-1/2}`, `K = Σ A_y* A_y`, so every iterate is a valid POVM.
/// With `warm_start`, run 0 starts from the square-root measurement; runs
/// `1..=restarts` start from seeded Gaussian blocks. The best restart wins, lowest index on ties.
pub fn optimize_me_decoder(enc: &Encoding, restarts: usize, seed: u64) -> Result<(Povm, f64)> {
    optimize_me_decoder_with(enc, OptimizerConfig { restarts, ..OptimizerConfig::default() }, seed)
}

pub fn optimize_me_decoder_with(enc: &Encoding, cfg: OptimizerConfig, seed: u64) -> Result<(Povm, f64)> {
    let n = enc.len();
    let d = enc.dim();
    let weights: Vec<CMat> = enc.states().iter().map(|s| s.matrix() / c(n as f64, 0.0)).collect();

    let srm = square_root_measurement(enc)?;
    let first = if cfg.warm_start { 0 } else { 1 };
    let runs: Vec<(f64, Vec<CMat>)> = (first..=cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let start: Vec<CMat> = if r == 0 {
                srm.outcomes().iter().map(|(_, e)| linalg::psd_sqrt(e.matrix())).collect()
            } else {
                let mut rng = stream(seed, r as u64);
                (0..n).map(|_| linalg::ginibre(&mut rng, d, d)).collect()
            };
            stiefel_ascent(&weights, retract(start), &cfg)
        })
        .collect();

    let (mut best_value, mut best) = (f64::NEG_INFINITY, None);
    for (value, blocks) in runs {
        if value > best_value {
            best_value = value;
            best = Some(blocks);
        }
    }
    let blocks = best.expect("at least one run");
    let dec = Povm::from_matrices(enc.alphabet().iter().cloned().zip(blocks.iter().map(|b| {
        let m = b.adjoint() * b;
        linalg::hermitize(&m)
    })))?;
    let value = me_success(enc, &dec)?;
    debug_assert!(value <= me_bound(d, n).unwrap_or(1.0) + EPS_OPT);
    Ok((dec, value))
}

fn objective(weights: &[CMat], blocks: &[CMat]) -> f64 {
    weights
        .iter()
        .zip(blocks)
        .map(|(q, b)| linalg::trace_product(&(b * q), &b.adjoint()))
        .sum()
}

/// `A ↦ A K^{-1/2}` with `K = Σ A_y* A_y`.
fn retract(blocks: Vec<CMat>) -> Vec<CMat> {
    let k: CMat = blocks.iter().map(|a| a.adjoint() * a).sum();
    let inv = linalg::psd_inv_sqrt(&k, 1e-14);
    blocks.into_iter().map(|a| a * &inv).collect()
}

fn stiefel_ascent(weights: &[CMat], mut blocks: Vec<CMat>, cfg: &OptimizerConfig) -> (f64, Vec<CMat>) {
    let mut value = objective(weights, &blocks);
    let mut history = vec![value];
    let mut step = 1.0;
    for _ in 0..cfg.max_iterations {
        let grads: Vec<CMat> = blocks.iter().zip(weights).map(|(b, q)| b * q).collect();
        let s: CMat = blocks.iter().zip(&grads).map(|(b, g)| b.adjoint() * g).sum();
        let sym = linalg::hermitize(&s);
        let dirs: Vec<CMat> = blocks.iter().zip(&grads).map(|(b, g)| g - b * &sym).collect();
        let slope: f64 = dirs.iter().map(|g| g.norm_squared()).sum();
        if slope < 1e-30 {
            break;
        }
        let mut accepted = false;
        while step > 1e-12 {
            let trial = retract(blocks.iter().zip(&dirs).map(|(b, g)| b + g * c(step, 0.0)).collect());
            let trial_value = objective(weights, &trial);
            if trial_value >= value + 1e-4 * step * slope {
                blocks = trial;
                value = trial_value;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
        step *= 2.0;
        history.push(value);
        if history.len() > cfg.window && value - history[history.len() - 1 - cfg.window] < cfg.tolerance {
            break;
        }
    }
    (value, blocks)
}
