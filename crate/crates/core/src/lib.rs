//! Finite-dimensional toolkit for comparing classical dits with quantum qudits
//! as communication media.
//!
//! The crate is split into four layers:
//!
//! * [`quantum`]: density matrices, effects, POVMs, Born probabilities,
//!   mixing and relabeling of measurements, and Naimark dilation.
//! * [`tasks`]: minimum-error, unambiguous and partial-ignorance games with
//!   their optimal bounds, reference strategies and a decoder optimizer.
//! * [`commmatrix`]: communication matrices, nonnegative and PSD
//!   factorizations, and minimal-dimension certificates.
//! * [`protocol`]: trine-state generation of non-overlapping sequences,
//!   the classical baseline, authentication tags and leakage analysis.

pub mod commmatrix;
mod error;
pub mod linalg;
pub mod protocol;
pub mod quantum;
pub mod rng;
pub mod tasks;
pub mod tol;

pub use error::{Error, Result};
