//! Prepare-and-measure communication games.
//!
//! A referee draws a symbol, Alice encodes what she is told into a state,
//! Bob measures and announces a symbol. Three scorings are covered:
//! minimum-error decoding, unambiguous decoding with an inconclusive
//! outcome, and communication of partial ignorance, where Alice only learns
//! one wrong symbol.

mod game;
mod minimum_error;
mod partial_ignorance;
mod unambiguous;

pub use game::{default_alphabet, Encoding, GameKind, GameSpec, RefereePolicy, StrategyReport};
pub use minimum_error::{
    classical_me_strategy, me_bound, me_success, me_success_with_prior, optimal_encoding,
    optimize_me_decoder, optimize_me_decoder_with, square_root_measurement, OptimizerConfig,
};
pub use partial_ignorance::{antidist_setup, pi_bound, pi_play_classical, pi_play_quantum, ClassicalBitStrategy};
pub use unambiguous::{classical_ua_strategy, ua_bound, ua_success, ua_to_me_decoder};
