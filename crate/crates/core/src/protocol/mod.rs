//! Non-overlapping random sequences from trine-state transmission.
//!
//! In every slot Alice draws a symbol from `{a, b, c}` and sends the matching
//! trine state to each receiver, who measures with the anti-trine
//! measurement. The receiver's outcome is never Alice's symbol and is
//! otherwise uniform, so the two sequences disagree in every slot while
//! revealing nothing beyond that. A classical baseline with four symbols,
//! authentication tags cut from a receiver's sequence, and leakage analysis
//! complete the module.

mod leakage;
mod tag;
mod transcript;
mod trine;

pub use leakage::{kl_divergence_bits, leakage_analytic, leakage_report, LeakageReport, SymbolLeakage};
pub use tag::{check_tag, forgery_acceptance, issue_tag, AuthTag, TagVerdict};
pub use transcript::{
    run_classical4, run_quantum, verify_disagreement, Scheme, Transcript, Verdict, MAX_LENGTH,
};
pub use trine::{antitrine_measurement, trine_alphabet, trine_states};
