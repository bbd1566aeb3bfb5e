//! Numerical tolerances shared across the crate.

/// Eigenvalue floor for positive semidefiniteness.
pub const EPS_PSD: f64 = 1e-9;
/// Trace, completeness and normalization tolerance.
pub const EPS_NORM: f64 = 1e-9;
/// Effect-wise agreement required of a Naimark roundtrip.
pub const EPS_DILATION: f64 = 1e-10;
/// Zero-error threshold for unambiguous decoders.
pub const EPS_UA: f64 = 1e-9;
/// Slack allowed when comparing optimizer output against bounds.
pub const EPS_OPT: f64 = 1e-6;
/// Residual below which a factorization counts as exact.
pub const EPS_FACT: f64 = 1e-6;
/// Agreement between an implementation and its target matrix.
pub const EPS_IMPL: f64 = 1e-6;
