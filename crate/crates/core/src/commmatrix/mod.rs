//! Communication matrices and the minimal dimension needed to implement them.
//!
//! A row-stochastic `m × n` matrix `C` lists the desired probability of
//! outcome `y` after preparation `x`. A dit implementation in dimension `d`
//! is a stochastic factorization `C = S T` with inner dimension `d`; a qudit
//! implementation is a PSD factorization `C_xy = tr(E_x F_y)` with `d × d`
//! factors. This module builds matrices, searches for both kinds of
//! factorization, converts factorizations back into states and measurements,
//! and certifies minimal dimensions from below and above.

mod bounds;
mod convert;
mod matrix;
mod mindim;
mod nonneg;
mod psd;

pub use bounds::{
    distinguishable_rows, linear_rank, nonneg_lower_bound, psd_lower_bound, rank_root_bound, rectangle_cover_number,
};
pub use convert::{factorization_to_implementation, Factorization};
pub use matrix::{antidist_matrix, from_implementation, identity_matrix, CommMatrix, Implementation};
pub use mindim::{min_dim, min_dim_with_tol, Attempt, DimCertificate, DimKind, LowerMethod};
pub use nonneg::{nonneg_factorize, NonnegFactorization};
pub use psd::{psd_factorize, PsdFactorization};

/// Iteration cap for a single factorization run.
pub const MAX_ITERATIONS: usize = 5000;
