//! Exact finite-dimensional quantum mechanics at desk scale.
//!
//! Every type validates its invariants on construction and on
//! deserialization, so a value that exists is a value that is physically
//! meaningful up to the tolerances in [`crate::tol`].

mod dilation;
mod json;
mod povm;
mod state;

pub use dilation::{naimark_dilate, povm_from_dilation, DilationRealization};
pub use json::{matrix_from_json, matrix_to_json, JsonMatrix};
pub use povm::{
    born_probabilities, mix_measurements, mixed_label, projective_from_basis,
    projective_from_basis_labeled, relabel, Effect, Label, Povm,
};
pub use state::{bloch_to_state, embed_classical, state_to_bloch, DensityMatrix, ProbVector, PureState};

/// Pauli-basis measurements with outcomes labeled `+` and `-`.
pub mod standard {
    use super::{projective_from_basis_labeled, Povm, PureState};
    use crate::linalg::c;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn labels() -> [&'static str; 2] {
        ["+", "-"]
    }

    pub fn z() -> Povm {
        let basis = [
            PureState::from_amplitudes(&[c(1.0, 0.0), c(0.0, 0.0)]).unwrap(),
            PureState::from_amplitudes(&[c(0.0, 0.0), c(1.0, 0.0)]).unwrap(),
        ];
        projective_from_basis_labeled(&basis, &labels()).unwrap()
    }

    pub fn x() -> Povm {
        let h = FRAC_1_SQRT_2;
        let basis = [
            PureState::from_amplitudes(&[c(h, 0.0), c(h, 0.0)]).unwrap(),
            PureState::from_amplitudes(&[c(h, 0.0), c(-h, 0.0)]).unwrap(),
        ];
        projective_from_basis_labeled(&basis, &labels()).unwrap()
    }

    pub fn y() -> Povm {
        let h = FRAC_1_SQRT_2;
        let basis = [
            PureState::from_amplitudes(&[c(h, 0.0), c(0.0, h)]).unwrap(),
            PureState::from_amplitudes(&[c(h, 0.0), c(0.0, -h)]).unwrap(),
        ];
        projective_from_basis_labeled(&basis, &labels()).unwrap()
    }
}
