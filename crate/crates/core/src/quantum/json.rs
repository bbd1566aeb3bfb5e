use crate::linalg::{c, CMat};
use crate::{Error, Result};

/// Largest dimension accepted from serialized input.
pub const MAX_DIM: usize = 64;

/// Row-major complex matrix with entries written as `[re, im]` pairs.
pub type JsonMatrix = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_json(m: &CMat) -> JsonMatrix {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

/// Parses a square matrix of the given dimension.
pub fn matrix_from_json(dim: usize, rows: &JsonMatrix) -> Result<CMat> {
    if dim == 0 {
        return Err(Error::invalid("matrix", "dimension must be positive"));
    }
    if dim > MAX_DIM {
        return Err(Error::invalid("matrix", format!("dimension {dim} exceeds {MAX_DIM}")));
    }
    if rows.len() != dim {
        return Err(Error::invalid("matrix", format!("expected {dim} rows, found {}", rows.len())));
    }
    let mut m = CMat::zeros(dim, dim);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != dim {
            return Err(Error::invalid(
                "matrix",
                format!("row {i} has {} entries, expected {dim}", row.len()),
            ));
        }
        for (j, &[re, im]) in row.iter().enumerate() {
            if !re.is_finite() || !im.is_finite() {
                return Err(Error::invalid("matrix", format!("entry ({i}, {j}) is not finite")));
            }
            m[(i, j)] = c(re, im);
        }
    }
    Ok(m)
}
