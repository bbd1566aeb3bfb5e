//! Naimark dilation: a POVM on `C^d` realized as a rank-one projective
//! measurement on `C^d ⊗ C^d` after a joint unitary acting on the system and
//! an ancilla prepared in a fixed state.
//!
//! The coupling is built from the isometry `W: C^d → C^{d²}` whose rows are
//! `√λ ⟨v|` for every eigenpair `(λ, v)` of every effect. Rows belonging to
//! outcome `j` are grouped under `j`; leftover rows are zero and grouped
//! under no label. The coupling `U` satisfies `U(ψ ⊗ |0⟩) = Wψ`.

use super::povm::{projective_from_basis, Effect, Label, Povm};
use super::state::{DensityMatrix, PureState};
use crate::linalg::{self, c, CMat};
use crate::tol::{EPS_DILATION, EPS_NORM};
use crate::{Error, Result};

/// Eigenvalues at or below this are treated as zero when splitting effects into rank-one pieces.
const RANK_TOL: f64 = 1e-13;

#[derive(Clone, Debug)]
pub struct DilationRealization {
    dim: usize,
    ancilla: DensityMatrix,
    coupling: CMat,
    projective: Povm,
    /// Output label of each projective outcome; `None` marks padding.
    grouping: Vec<Option<Label>>,
    labels: Vec<Label>,
}

impl DilationRealization {
    pub fn new(
        ancilla: DensityMatrix,
        coupling: CMat,
        projective: Povm,
        grouping: Vec<Option<Label>>,
        labels: Vec<Label>,
    ) -> Result<Self> {
        const WHAT: &str = "dilation";
        let dim = ancilla.dim();
        let big = dim * dim;
        if coupling.nrows() != big || coupling.ncols() != big {
            return Err(Error::invalid(WHAT, format!("coupling must be {big}x{big}")));
        }
        let defect = linalg::max_abs_diff(&(&coupling * coupling.adjoint()), &linalg::identity(big));
        if defect > EPS_NORM {
            return Err(Error::invalid(WHAT, format!("coupling is not unitary, defect {defect:e}")));
        }
        if projective.dim() != big {
            return Err(Error::DimensionMismatch { expected: big, found: projective.dim() });
        }
        for (i, (label, effect)) in projective.outcomes().iter().enumerate() {
            let e = effect.matrix();
            let idem = linalg::max_abs_diff(&(e * e), e);
            let trace = e.trace().re;
            if idem > EPS_NORM || (trace - 1.0).abs() > EPS_NORM {
                return Err(Error::invalid(
                    WHAT,
                    format!("projective outcome {i} ({label}) is not a rank-one projection"),
                ));
            }
        }
        if grouping.len() != projective.len() {
            return Err(Error::invalid(
                WHAT,
                format!("{} group entries for {} projective outcomes", grouping.len(), projective.len()),
            ));
        }
        for g in grouping.iter().flatten() {
            if !labels.contains(g) {
                return Err(Error::invalid(WHAT, format!("group label {g:?} is not an output label")));
            }
        }
        Ok(Self { dim, ancilla, coupling, projective, grouping, labels })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ancilla(&self) -> &DensityMatrix {
        &self.ancilla
    }

    pub fn coupling(&self) -> &CMat {
        &self.coupling
    }

    pub fn projective(&self) -> &Povm {
        &self.projective
    }

    pub fn grouping(&self) -> &[Option<Label>] {
        &self.grouping
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    /// Evaluates `tr(U(ρ ⊗ ρ₀)U* P(j))` directly on the composite system,
    /// summed per output label.
    pub fn probabilities(&self, state: &DensityMatrix) -> Result<Vec<f64>> {
        if state.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: state.dim() });
        }
        let joint = state.matrix().kronecker(self.ancilla.matrix());
        let evolved = &self.coupling * joint * self.coupling.adjoint();
        let mut out = vec![0.0; self.labels.len()];
        for ((_, effect), group) in self.projective.outcomes().iter().zip(&self.grouping) {
            if let Some(label) = group {
                let k = self.labels.iter().position(|l| l == label).expect("validated");
                out[k] += linalg::trace_product(&evolved, effect.matrix());
            }
        }
        Ok(out)
    }
}

pub fn naimark_dilate(meas: &Povm) -> Result<DilationRealization> {
    let d = meas.dim();
    let big = d * d;
    if meas.len() > big {
        return Err(Error::Unsupported(format!("{} outcomes exceed d² = {big}", meas.len())));
    }
    let mut rows: Vec<(usize, nalgebra::RowDVector<num_complex::Complex64>)> = Vec::new();
    for (j, (_, effect)) in meas.outcomes().iter().enumerate() {
        let (values, vectors) = linalg::hermitian_eigen(effect.matrix());
        for (k, &lambda) in values.iter().enumerate() {
            if lambda > RANK_TOL {
                rows.push((j, vectors.column(k).adjoint() * c(lambda.sqrt(), 0.0)));
            }
        }
    }
    if rows.len() > big {
        return Err(Error::Unsupported(format!(
            "total effect rank {} exceeds d² = {big}; no pure-ancilla dilation on C^d ⊗ C^d exists",
            rows.len()
        )));
    }

    let mut isometry = CMat::zeros(big, d);
    let mut grouping = vec![None; big];
    for (r, (j, row)) in rows.iter().enumerate() {
        isometry.set_row(r, row);
        grouping[r] = Some(meas.outcomes()[*j].0.clone());
    }

    // Columns ψ_i ⊗ |0⟩ sit at composite index i·d.
    let completed = linalg::complete_unitary(&isometry);
    let mut coupling = CMat::zeros(big, big);
    let mut free = d..big;
    for i in 0..big {
        let src = if i % d == 0 { i / d } else { free.next().expect("d² - d free columns") };
        coupling.set_column(i, &completed.column(src));
    }

    let basis: Vec<PureState> = (0..big).map(|k| PureState::basis(big, k)).collect();
    let projective = projective_from_basis(&basis)?;
    let labels = meas.labels().cloned().collect();
    DilationRealization::new(DensityMatrix::basis(d, 0), coupling, projective, grouping, labels)
}

/// Recovers `M(j) = tr_anc[(1 ⊗ ρ₀) U* P(j) U]`, summed over each label's group.
pub fn povm_from_dilation(real: &DilationRealization) -> Result<Povm> {
    let d = real.dim;
    let weight = linalg::identity(d).kronecker(real.ancilla.matrix());
    let mut effects = vec![CMat::zeros(d, d); real.labels.len()];
    let mut padding = CMat::zeros(d, d);
    for ((_, p), group) in real.projective.outcomes().iter().zip(&real.grouping) {
        let pulled = real.coupling.adjoint() * p.matrix() * &real.coupling;
        let reduced = linalg::partial_trace_second(&(&weight * pulled), d, d);
        match group {
            Some(label) => {
                let k = real.labels.iter().position(|l| l == label).expect("validated");
                effects[k] += reduced;
            }
            None => padding += reduced,
        }
    }
    let leak = padding.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if leak > EPS_DILATION {
        return Err(Error::invalid("dilation", format!("padding outcomes carry weight {leak:e}")));
    }
    let outcomes = real
        .labels
        .iter()
        .cloned()
        .zip(effects)
        .map(|(l, m)| Ok((l, Effect::new(m)?)))
        .collect::<Result<Vec<_>>>()?;
    Povm::new(outcomes)
}
