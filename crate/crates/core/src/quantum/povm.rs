use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::json::{matrix_from_json, matrix_to_json, JsonMatrix};
use super::state::{DensityMatrix, ProbVector, PureState};
use crate::linalg::{self, c, CMat};
use crate::tol::{EPS_NORM, EPS_PSD};
use crate::{Error, Result};

/// Opaque outcome label.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Label(pub String);

impl Label {
    /// Reserved label for the inconclusive outcome.
    pub const INCONCLUSIVE: &'static str = "?";

    pub fn new(s: impl Into<String>) -> Self {
        Label(s.into())
    }

    pub fn inconclusive() -> Self {
        Label(Self::INCONCLUSIVE.to_owned())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label(s.to_owned())
    }
}

impl From<String> for Label {
    fn from(s: String) -> Self {
        Label(s)
    }
}

/// Hermitian operator with spectrum in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Effect {
    m: CMat,
}

impl Effect {
    pub fn new(m: CMat) -> Result<Self> {
        const WHAT: &str = "effect";
        if m.nrows() == 0 || m.nrows() != m.ncols() {
            return Err(Error::invalid(WHAT, format!("shape {}x{} is not square", m.nrows(), m.ncols())));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid(WHAT, "non-finite entry"));
        }
        let (defect, i, j) = linalg::hermiticity_defect(&m);
        if defect > EPS_NORM {
            return Err(Error::invalid(WHAT, format!("not Hermitian at ({i}, {j}), defect {defect:e}")));
        }
        let h = linalg::hermitize(&m);
        let (values, _) = linalg::hermitian_eigen(&h);
        let (lo, hi) = (values[0], values[values.len() - 1]);
        if lo < -EPS_PSD || hi > 1.0 + EPS_PSD {
            return Err(Error::invalid(WHAT, format!("spectrum [{lo:e}, {hi}] leaves [0, 1]")));
        }
        Ok(Self { m: h })
    }

    pub fn zero(dim: usize) -> Self {
        Self { m: CMat::zeros(dim, dim) }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.m
    }

    pub fn largest_eigenvalue(&self) -> f64 {
        linalg::max_eigenvalue(&self.m)
    }
}

/// Finite-outcome measurement: labeled effects summing to the identity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PovmRecord", into = "PovmRecord")]
pub struct Povm {
    dim: usize,
    outcomes: Vec<(Label, Effect)>,
}

#[derive(Clone, Serialize, Deserialize)]
struct OutcomeRecord {
    label: Label,
    effect: JsonMatrix,
}

#[derive(Clone, Serialize, Deserialize)]
struct PovmRecord {
    dim: usize,
    outcomes: Vec<OutcomeRecord>,
}

impl Povm {
    pub fn new(outcomes: Vec<(Label, Effect)>) -> Result<Self> {
        const WHAT: &str = "POVM";
        let dim = match outcomes.first() {
            Some((_, e)) => e.dim(),
            None => return Err(Error::invalid(WHAT, "no outcomes")),
        };
        let mut seen = HashSet::new();
        let mut total = CMat::zeros(dim, dim);
        for (label, effect) in &outcomes {
            if effect.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: effect.dim() });
            }
            if !seen.insert(label) {
                return Err(Error::invalid(WHAT, format!("duplicate label {label:?}")));
            }
            total += effect.matrix();
        }
        let defect = linalg::max_abs_diff(&total, &linalg::identity(dim));
        if defect > EPS_NORM {
            return Err(Error::invalid(WHAT, format!("effects do not sum to identity, defect {defect:e}")));
        }
        Ok(Self { dim, outcomes })
    }

    /// Builds a POVM from labels and raw matrices, validating each effect.
    pub fn from_matrices<L: Into<Label>>(items: impl IntoIterator<Item = (L, CMat)>) -> Result<Self> {
        let outcomes = items
            .into_iter()
            .map(|(l, m)| Ok((l.into(), Effect::new(m)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(outcomes)
    }

    /// The single-outcome measurement `{label: 1}`.
    pub fn trivial(dim: usize, label: impl Into<Label>) -> Self {
        Self { dim, outcomes: vec![(label.into(), Effect { m: linalg::identity(dim) })] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn outcomes(&self) -> &[(Label, Effect)] {
        &self.outcomes
    }

    pub fn labels(&self) -> impl Iterator<Item = &Label> {
        self.outcomes.iter().map(|(l, _)| l)
    }

    pub fn effect(&self, label: &str) -> Option<&Effect> {
        self.outcomes.iter().find(|(l, _)| l.as_str() == label).map(|(_, e)| e)
    }

    /// Born probability of one outcome; zero for labels the POVM lacks.
    pub fn probability(&self, state: &DensityMatrix, label: &str) -> f64 {
        self.effect(label).map_or(0.0, |e| linalg::trace_product(state.matrix(), e.matrix()))
    }

    /// Adds zero-effect outcomes under the given labels.
    pub fn padded<L: Into<Label>>(&self, labels: impl IntoIterator<Item = L>) -> Result<Self> {
        let mut outcomes = self.outcomes.clone();
        outcomes.extend(labels.into_iter().map(|l| (l.into(), Effect::zero(self.dim))));
        Self::new(outcomes)
    }
}

impl TryFrom<PovmRecord> for Povm {
    type Error = Error;
    fn try_from(r: PovmRecord) -> Result<Self> {
        let outcomes = r
            .outcomes
            .iter()
            .map(|o| Ok((o.label.clone(), Effect::new(matrix_from_json(r.dim, &o.effect)?)?)))
            .collect::<Result<Vec<_>>>()?;
        let povm = Povm::new(outcomes)?;
        if povm.dim != r.dim {
            return Err(Error::DimensionMismatch { expected: r.dim, found: povm.dim });
        }
        Ok(povm)
    }
}

impl From<Povm> for PovmRecord {
    fn from(p: Povm) -> Self {
        PovmRecord {
            dim: p.dim,
            outcomes: p
                .outcomes
                .iter()
                .map(|(l, e)| OutcomeRecord { label: l.clone(), effect: matrix_to_json(e.matrix()) })
                .collect(),
        }
    }
}

/// Outcome probabilities `tr(ρ M(j))` in the POVM's outcome order.
pub fn born_probabilities(state: &DensityMatrix, meas: &Povm) -> Result<ProbVector> {
    if state.dim() != meas.dim() {
        return Err(Error::DimensionMismatch { expected: meas.dim(), found: state.dim() });
    }
    let p = meas
        .outcomes
        .iter()
        .map(|(_, e)| linalg::trace_product(state.matrix(), e.matrix()))
        .collect();
    ProbVector::new(p)
}

/// Projective measurement onto an orthonormal basis, outcomes labeled `0..d`.
pub fn projective_from_basis(basis: &[PureState]) -> Result<Povm> {
    let labels: Vec<String> = (0..basis.len()).map(|i| i.to_string()).collect();
    projective_from_basis_labeled(basis, &labels)
}

pub fn projective_from_basis_labeled<S: AsRef<str>>(basis: &[PureState], labels: &[S]) -> Result<Povm> {
    let dim = match basis.first() {
        Some(v) => v.dim(),
        None => return Err(Error::invalid("basis", "empty")),
    };
    if basis.len() != dim {
        return Err(Error::invalid("basis", format!("{} vectors cannot span dimension {dim}", basis.len())));
    }
    if labels.len() != dim {
        return Err(Error::invalid("basis", format!("{} labels for {dim} vectors", labels.len())));
    }
    for (i, u) in basis.iter().enumerate() {
        if u.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: u.dim() });
        }
        for (j, v) in basis.iter().enumerate().skip(i) {
            let target = if i == j { 1.0 } else { 0.0 };
            if (u.inner(v) - c(target, 0.0)).norm() > EPS_NORM {
                return Err(Error::NonOrthonormal(i, j));
            }
        }
    }
    Povm::new(
        basis
            .iter()
            .zip(labels)
            .map(|(v, l)| (Label::new(l.as_ref()), Effect { m: linalg::hermitize(&v.projector()) }))
            .collect(),
    )
}

/// Label given to outcome `label` of part `part` in a mixture.
pub fn mixed_label(label: &Label, part: usize) -> Label {
    Label(format!("{label}@{part}"))
}

/// Random choice among measurements: part `i` is performed with probability
/// `weight_i` and its outcome `j` is recorded as [`mixed_label`]`(j, i)`.
pub fn mix_measurements(parts: &[(f64, &Povm)]) -> Result<Povm> {
    let dim = match parts.first() {
        Some((_, p)) => p.dim,
        None => return Err(Error::invalid("mixture", "no parts")),
    };
    let mut total = 0.0;
    let mut outcomes = Vec::new();
    for (i, &(w, meas)) in parts.iter().enumerate() {
        if !w.is_finite() || w < 0.0 {
            return Err(Error::invalid("mixture", format!("weight {w} of part {i} is negative")));
        }
        if meas.dim != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: meas.dim });
        }
        total += w;
        for (label, effect) in &meas.outcomes {
            outcomes.push((mixed_label(label, i), Effect { m: effect.matrix() * c(w, 0.0) }));
        }
    }
    if (total - 1.0).abs() > EPS_NORM {
        return Err(Error::invalid("mixture", format!("weights sum to {total}")));
    }
    Povm::new(outcomes)
}

/// Coarse-grains outcomes: every label is sent through `mapping` and effects
/// landing on the same target are summed. Targets appear in order of first use.
pub fn relabel(meas: &Povm, mapping: &BTreeMap<Label, Label>) -> Result<Povm> {
    let mut outcomes: Vec<(Label, CMat)> = Vec::new();
    for (label, effect) in &meas.outcomes {
        let target = mapping
            .get(label)
            .ok_or_else(|| Error::invalid("relabeling", format!("no target for outcome {label:?}")))?;
        match outcomes.iter_mut().find(|(l, _)| l == target) {
            Some((_, m)) => *m += effect.matrix(),
            None => outcomes.push((target.clone(), effect.matrix().clone())),
        }
    }
    Povm::from_matrices(outcomes)
}
