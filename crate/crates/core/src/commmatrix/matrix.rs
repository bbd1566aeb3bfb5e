use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::linalg;
use crate::quantum::{DensityMatrix, Povm};
use crate::tol::EPS_NORM;
use crate::{Error, Result};

/// Largest row or column count accepted from serialized input.
pub const MAX_SIZE: usize = 256;

/// Row-stochastic matrix of preparation → outcome probabilities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CommRecord", into = "CommRecord")]
pub struct CommMatrix {
    entries: DMatrix<f64>,
}

#[derive(Clone, Serialize, Deserialize)]
struct CommRecord {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<f64>>,
}

impl CommMatrix {
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        const WHAT: &str = "communication matrix";
        let (m, n) = entries.shape();
        if m == 0 || n == 0 {
            return Err(Error::invalid(WHAT, "empty"));
        }
        for i in 0..m {
            for j in 0..n {
                let v = entries[(i, j)];
                if !v.is_finite() || !(-EPS_NORM..=1.0 + EPS_NORM).contains(&v) {
                    return Err(Error::invalid(WHAT, format!("entry ({i}, {j}) = {v} is not a probability")));
                }
            }
            let sum: f64 = entries.row(i).iter().sum();
            if (sum - 1.0).abs() > EPS_NORM {
                return Err(Error::invalid(WHAT, format!("row {i} sums to {sum}")));
            }
        }
        Ok(Self { entries })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::invalid("communication matrix", format!("row {i} has {} entries, expected {n}", r.len())));
        }
        Self::new(DMatrix::from_row_iterator(m, n, rows.iter().flatten().copied()))
    }

    /// Parses whitespace-separated rows. Blank lines and `#` comments are
    /// skipped; entries may be decimals or fractions such as `1/2`.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let row = line
                .split_whitespace()
                .map(|tok| parse_entry(tok).ok_or_else(|| Error::Parse(format!("line {}: bad entry {tok:?}", lineno + 1))))
                .collect::<Result<Vec<f64>>>()?;
            if row.len() > MAX_SIZE || rows.len() >= MAX_SIZE {
                return Err(Error::Parse(format!("matrix exceeds {MAX_SIZE} rows or columns")));
            }
            rows.push(row);
        }
        Self::from_rows(&rows)
    }

    pub fn rows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn cols(&self) -> usize {
        self.entries.ncols()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.entries[(x, y)]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.entries.row_iter().map(|r| r.iter().copied().collect()).collect()
    }

    /// Largest entrywise difference to another matrix of the same shape.
    pub fn max_abs_diff(&self, other: &DMatrix<f64>) -> f64 {
        assert_eq!(self.entries.shape(), other.shape());
        (&self.entries - other).amax()
    }
}

fn parse_entry(tok: &str) -> Option<f64> {
    let v = match tok.split_once('/') {
        Some((a, b)) => a.parse::<f64>().ok()? / b.parse::<f64>().ok()?,
        None => tok.parse().ok()?,
    };
    v.is_finite().then_some(v)
}

impl fmt::Display for CommMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.entries.row_iter() {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

impl TryFrom<CommRecord> for CommMatrix {
    type Error = Error;
    fn try_from(r: CommRecord) -> Result<Self> {
        if r.rows > MAX_SIZE || r.cols > MAX_SIZE {
            return Err(Error::invalid("communication matrix", format!("exceeds {MAX_SIZE} rows or columns")));
        }
        if r.entries.len() != r.rows {
            return Err(Error::invalid("communication matrix", format!("{} rows declared, {} given", r.rows, r.entries.len())));
        }
        if r.entries.iter().any(|row| row.len() != r.cols) {
            return Err(Error::invalid("communication matrix", format!("every row must have {} entries", r.cols)));
        }
        CommMatrix::from_rows(&r.entries)
    }
}

impl From<CommMatrix> for CommRecord {
    fn from(c: CommMatrix) -> Self {
        CommRecord { rows: c.rows(), cols: c.cols(), entries: c.to_rows() }
    }
}

/// States and a decoder sharing one dimension.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ImplRecord", into = "ImplRecord")]
pub struct Implementation {
    states: Vec<DensityMatrix>,
    decoder: Povm,
}

#[derive(Clone, Serialize, Deserialize)]
struct ImplRecord {
    dim: usize,
    states: Vec<DensityMatrix>,
    decoder: Povm,
}

impl Implementation {
    pub fn new(states: Vec<DensityMatrix>, decoder: Povm) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::invalid("implementation", "no states"));
        }
        if let Some(s) = states.iter().find(|s| s.dim() != decoder.dim()) {
            return Err(Error::DimensionMismatch { expected: decoder.dim(), found: s.dim() });
        }
        Ok(Self { states, decoder })
    }

    pub fn dim(&self) -> usize {
        self.decoder.dim()
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn decoder(&self) -> &Povm {
        &self.decoder
    }
}

impl TryFrom<ImplRecord> for Implementation {
    type Error = Error;
    fn try_from(r: ImplRecord) -> Result<Self> {
        let imp = Implementation::new(r.states, r.decoder)?;
        if imp.dim() != r.dim {
            return Err(Error::DimensionMismatch { expected: r.dim, found: imp.dim() });
        }
        Ok(imp)
    }
}

impl From<Implementation> for ImplRecord {
    fn from(i: Implementation) -> Self {
        ImplRecord { dim: i.dim(), states: i.states, decoder: i.decoder }
    }
}

/// `C_xy = tr(ρ_x M(y))`, rows in state order and columns in outcome order.
pub fn from_implementation(imp: &Implementation) -> Result<CommMatrix> {
    let m = imp.states.len();
    let n = imp.decoder.len();
    let entries = DMatrix::from_fn(m, n, |x, y| {
        linalg::trace_product(imp.states[x].matrix(), imp.decoder.outcomes()[y].1.matrix())
    });
    CommMatrix::new(entries)
}

/// Perfect communication of `n` symbols.
pub fn identity_matrix(n: usize) -> Result<CommMatrix> {
    if n == 0 {
        return Err(Error::OutOfDomain("identity matrix needs n ≥ 1".into()));
    }
    CommMatrix::new(DMatrix::identity(n, n))
}

/// Uniform antidistinguishability: zero diagonal, `1/(n-1)` elsewhere.
pub fn antidist_matrix(n: usize) -> Result<CommMatrix> {
    if n < 2 {
        return Err(Error::OutOfDomain("antidistinguishability matrix needs n ≥ 2".into()));
    }
    let off = 1.0 / (n - 1) as f64;
    CommMatrix::new(DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { off }))
}
