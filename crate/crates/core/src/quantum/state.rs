use serde::{Deserialize, Serialize};

use super::json::{matrix_from_json, matrix_to_json, JsonMatrix};
use crate::linalg::{self, c, CMat, CVec};
use crate::tol::{EPS_NORM, EPS_PSD};
use crate::{Error, Result};

/// A finite probability distribution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProbRecord", into = "ProbRecord")]
pub struct ProbVector {
    entries: Vec<f64>,
}

#[derive(Clone, Serialize, Deserialize)]
struct ProbRecord {
    entries: Vec<f64>,
}

impl ProbVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::invalid("probability vector", "no entries"));
        }
        for (i, &p) in entries.iter().enumerate() {
            if !p.is_finite() || p < -EPS_NORM {
                return Err(Error::invalid("probability vector", format!("entry {i} = {p} is negative or not finite")));
            }
        }
        let sum: f64 = entries.iter().sum();
        if (sum - 1.0).abs() > EPS_NORM {
            return Err(Error::invalid("probability vector", format!("entries sum to {sum}")));
        }
        Ok(Self { entries })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("probability vector", "no entries"));
        }
        Ok(Self { entries: vec![1.0 / n as f64; n] })
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl TryFrom<ProbRecord> for ProbVector {
    type Error = Error;
    fn try_from(r: ProbRecord) -> Result<Self> {
        ProbVector::new(r.entries)
    }
}

impl From<ProbVector> for ProbRecord {
    fn from(p: ProbVector) -> Self {
        ProbRecord { entries: p.entries }
    }
}

/// A unit vector in `C^d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PureRecord", into = "PureRecord")]
pub struct PureState {
    amplitudes: CVec,
}

#[derive(Clone, Serialize, Deserialize)]
struct PureRecord {
    dim: usize,
    amplitudes: Vec<[f64; 2]>,
}

impl PureState {
    pub fn new(amplitudes: CVec) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::invalid("pure state", "dimension must be positive"));
        }
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::invalid("pure state", "non-finite amplitude"));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > EPS_NORM {
            return Err(Error::invalid("pure state", format!("norm is {norm}")));
        }
        Ok(Self { amplitudes })
    }

    pub fn from_amplitudes(amplitudes: &[num_complex::Complex64]) -> Result<Self> {
        Self::new(CVec::from_column_slice(amplitudes))
    }

    /// Normalizes a nonzero vector.
    pub fn normalized(v: CVec) -> Result<Self> {
        let norm = v.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::invalid("pure state", "cannot normalize a zero or non-finite vector"));
        }
        Self::new(v / c(norm, 0.0))
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = CVec::zeros(dim);
        v[k] = c(1.0, 0.0);
        Self { amplitudes: v }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVec {
        &self.amplitudes
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> num_complex::Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn projector(&self) -> CMat {
        linalg::projector(&self.amplitudes)
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix { m: linalg::hermitize(&self.projector()) }
    }
}

impl TryFrom<PureRecord> for PureState {
    type Error = Error;
    fn try_from(r: PureRecord) -> Result<Self> {
        if r.amplitudes.len() != r.dim {
            return Err(Error::DimensionMismatch { expected: r.dim, found: r.amplitudes.len() });
        }
        let v: Vec<_> = r.amplitudes.iter().map(|&[re, im]| c(re, im)).collect();
        PureState::from_amplitudes(&v)
    }
}

impl From<PureState> for PureRecord {
    fn from(p: PureState) -> Self {
        PureRecord {
            dim: p.dim(),
            amplitudes: p.amplitudes.iter().map(|a| [a.re, a.im]).collect(),
        }
    }
}

/// Positive semidefinite unit-trace `d × d` matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRecord", into = "MatrixRecord")]
pub struct DensityMatrix {
    m: CMat,
}

#[derive(Clone, Serialize, Deserialize)]
pub(crate) struct MatrixRecord {
    pub dim: usize,
    pub entries: JsonMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity (in that order).
    pub fn new(m: CMat) -> Result<Self> {
        const WHAT: &str = "density matrix";
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
        let trace = m.trace().re;
        if (trace - 1.0).abs() > EPS_NORM {
            return Err(Error::invalid(WHAT, format!("trace is {trace}, not 1")));
        }
        let h = linalg::hermitize(&m);
        let min = linalg::min_eigenvalue(&h);
        if min < -EPS_PSD {
            return Err(Error::invalid(WHAT, format!("not positive semidefinite, eigenvalue {min:e}")));
        }
        Ok(Self { m: h })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { m: linalg::identity(dim) / c(dim as f64, 0.0) }
    }

    /// `|k⟩⟨k|` in dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Self {
        PureState::basis(dim, k).density()
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.m
    }

    /// Convex combination `weight·self + (1 − weight)·other`.
    pub fn mix(&self, weight: f64, other: &DensityMatrix) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        if !(0.0..=1.0).contains(&weight) {
            return Err(Error::invalid("mixture", format!("weight {weight} outside [0, 1]")));
        }
        Self::new(&self.m * c(weight, 0.0) + &other.m * c(1.0 - weight, 0.0))
    }
}

impl TryFrom<MatrixRecord> for DensityMatrix {
    type Error = Error;
    fn try_from(r: MatrixRecord) -> Result<Self> {
        DensityMatrix::new(matrix_from_json(r.dim, &r.entries)?)
    }
}

impl From<DensityMatrix> for MatrixRecord {
    fn from(s: DensityMatrix) -> Self {
        MatrixRecord { dim: s.dim(), entries: matrix_to_json(&s.m) }
    }
}

/// The diagonal density matrix carrying `p` on its diagonal.
pub fn embed_classical(p: &ProbVector) -> DensityMatrix {
    DensityMatrix { m: linalg::diag_real(p.entries()) }
}

/// Bloch vector `r` with `ρ = (1 + r·σ)/2`, using `σ = (X, Y, Z)` whose `+1`
/// eigenprojections are the `+` effects of [`super::standard`].
pub fn state_to_bloch(state: &DensityMatrix) -> Result<[f64; 3]> {
    if state.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: state.dim() });
    }
    let m = state.matrix();
    let off = m[(0, 1)];
    Ok([2.0 * off.re, -2.0 * off.im, m[(0, 0)].re - m[(1, 1)].re])
}

pub fn bloch_to_state(r: [f64; 3]) -> Result<DensityMatrix> {
    let norm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !norm.is_finite() || norm > 1.0 + EPS_NORM {
        return Err(Error::invalid("Bloch vector", format!("norm {norm} exceeds 1")));
    }
    let [x, y, z] = r;
    let m = CMat::from_row_slice(
        2,
        2,
        &[c((1.0 + z) / 2.0, 0.0), c(x / 2.0, -y / 2.0), c(x / 2.0, y / 2.0), c((1.0 - z) / 2.0, 0.0)],
    );
    Ok(DensityMatrix { m })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;

    #[test]
    fn embed_diagonal_qubit() {
        let s = embed_classical(&ProbVector::new(vec![0.3, 0.7]).unwrap());
        assert_eq!(s.matrix(), &linalg::diag_real(&[0.3, 0.7]));
        let pure = embed_classical(&ProbVector::new(vec![1.0, 0.0]).unwrap());
        assert_eq!(pure, DensityMatrix::basis(2, 0));
        let mixed = embed_classical(&ProbVector::uniform(3).unwrap());
        assert!(max_abs_diff(mixed.matrix(), DensityMatrix::maximally_mixed(3).matrix()) < 1e-16);
    }

    #[test]
    fn rejects_each_violated_invariant() {
        let non_herm = CMat::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.1, 0.0), c(0.2, 0.0), c(0.5, 0.0)]);
        let err = DensityMatrix::new(non_herm).unwrap_err().to_string();
        assert!(err.contains("Hermitian"), "{err}");

        let err = DensityMatrix::new(linalg::diag_real(&[0.5, 0.6])).unwrap_err().to_string();
        assert!(err.contains("trace"), "{err}");

        let err = DensityMatrix::new(linalg::diag_real(&[1.2, -0.2])).unwrap_err().to_string();
        assert!(err.contains("positive"), "{err}");

        assert!(ProbVector::new(vec![0.5, 0.6]).is_err());
        assert!(ProbVector::new(vec![1.1, -0.1]).is_err());
        assert!(PureState::from_amplitudes(&[c(1.0, 0.0), c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn bloch_poles_and_center() {
        assert_eq!(state_to_bloch(&DensityMatrix::basis(2, 0)).unwrap(), [0.0, 0.0, 1.0]);
        assert_eq!(state_to_bloch(&DensityMatrix::maximally_mixed(2)).unwrap(), [0.0, 0.0, 0.0]);
        assert!(bloch_to_state([1.0, 1.0, 0.0]).is_err());
        assert!(state_to_bloch(&DensityMatrix::maximally_mixed(3)).is_err());
    }

    #[test]
    fn json_revalidates() {
        let s = DensityMatrix::basis(2, 1);
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, r#"{"dim":2,"entries":[[[0.0,0.0],[0.0,0.0]],[[0.0,0.0],[1.0,0.0]]]}"#);
        let back: DensityMatrix = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        let bad = r#"{"dim":2,"entries":[[[2.0,0.0],[0.0,0.0]],[[0.0,0.0],[-1.0,0.0]]]}"#;
        let err = serde_json::from_str::<DensityMatrix>(bad).unwrap_err().to_string();
        assert!(err.contains("positive"), "{err}");
    }
}
