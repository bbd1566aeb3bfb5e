//! Small dense complex linear algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(d: usize) -> CMat {
    CMat::identity(d, d)
}

pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> CMat {
    CMat::from_row_iterator(rows, cols, data.iter().map(|&x| c(x, 0.0)))
}

pub fn diag_real(values: &[f64]) -> CMat {
    let mut m = CMat::zeros(values.len(), values.len());
    for (i, &v) in values.iter().enumerate() {
        m[(i, i)] = c(v, 0.0);
    }
    m
}

pub fn hermitize(m: &CMat) -> CMat {
    (m + m.adjoint()) * c(0.5, 0.0)
}

/// Largest entrywise deviation of `m` from its adjoint, with its position.
pub fn hermiticity_defect(m: &CMat) -> (f64, usize, usize) {
    let mut worst = (0.0, 0, 0);
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            let e = (m[(i, j)] - m[(j, i)].conj()).norm();
            if e > worst.0 {
                worst = (e, i, j);
            }
        }
    }
    worst
}

/// Eigen-decomposition of the Hermitian part of `m`, eigenvalues ascending.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let eig = hermitize(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMat::zeros(m.nrows(), m.ncols());
    for (k, &i) in order.iter().enumerate() {
        vectors.set_column(k, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

pub fn min_eigenvalue(m: &CMat) -> f64 {
    hermitian_eigen(m).0.first().copied().unwrap_or(0.0)
}

pub fn max_eigenvalue(m: &CMat) -> f64 {
    hermitian_eigen(m).0.last().copied().unwrap_or(0.0)
}

/// Applies `f` to the eigenvalues of a Hermitian matrix.
pub fn spectral_map(m: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let (values, vectors) = hermitian_eigen(m);
    let mut scaled = vectors.clone();
    for (k, &v) in values.iter().enumerate() {
        scaled.column_mut(k).scale_mut(f(v));
    }
    &scaled * vectors.adjoint()
}

/// Principal square root; negative eigenvalues are clamped to zero.
pub fn psd_sqrt(m: &CMat) -> CMat {
    spectral_map(m, |v| v.max(0.0).sqrt())
}

/// Inverse square root on the support of `m`; eigenvalues at or below `tol` map to zero.
pub fn psd_inv_sqrt(m: &CMat, tol: f64) -> CMat {
    spectral_map(m, |v| if v > tol { 1.0 / v.sqrt() } else { 0.0 })
}

/// Real part of `tr(a b)` without forming the product.
pub fn trace_product(a: &CMat, b: &CMat) -> f64 {
    let mut acc = 0.0;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            let p = a[(i, j)] * b[(j, i)];
            acc += p.re;
        }
    }
    acc
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn projector(v: &CVec) -> CMat {
    v * v.adjoint()
}

/// Extends the orthonormal columns of `partial` to a unitary by Gram–Schmidt
/// against the standard basis.
pub fn complete_unitary(partial: &CMat) -> CMat {
    let n = partial.nrows();
    let mut cols: Vec<CVec> = partial.column_iter().map(|c| c.into_owned()).collect();
    for k in 0..n {
        if cols.len() == n {
            break;
        }
        let mut v = CVec::zeros(n);
        v[k] = ONE;
        // two passes keep the completion orthogonal to working precision
        for _ in 0..2 {
            for u in &cols {
                let overlap = u.dotc(&v);
                v -= u * overlap;
            }
        }
        let norm = v.norm();
        if norm > 1e-8 {
            cols.push(v / c(norm, 0.0));
        }
    }
    CMat::from_columns(&cols)
}

/// Traces out the second tensor factor of a `(d_sys * d_anc)`-dimensional operator.
pub fn partial_trace_second(m: &CMat, d_sys: usize, d_anc: usize) -> CMat {
    let mut out = CMat::zeros(d_sys, d_sys);
    for i in 0..d_sys {
        for j in 0..d_sys {
            let mut acc = ZERO;
            for a in 0..d_anc {
                acc += m[(i * d_anc + a, j * d_anc + a)];
            }
            out[(i, j)] = acc;
        }
    }
    out
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im)
    })
}

/// Uniformly random unit vector in `C^d`.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CVec {
    let g = ginibre(rng, d, 1);
    let v = g.column(0).into_owned();
    let n = v.norm();
    v / c(n, 0.0)
}

/// Singular values of a real matrix, descending.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn sqrt_squares_back() {
        let mut rng = stream(1, 0);
        let g = ginibre(&mut rng, 3, 3);
        let p = &g * g.adjoint();
        let s = psd_sqrt(&p);
        assert!(max_abs_diff(&(&s * &s), &p) < 1e-10);
        let inv = psd_inv_sqrt(&p, 1e-12);
        assert!(max_abs_diff(&(&inv * &p * &inv), &identity(3)) < 1e-9);
    }

    #[test]
    fn completion_is_unitary() {
        let mut rng = stream(2, 0);
        let v = random_unit_vector(&mut rng, 4);
        let u = complete_unitary(&CMat::from_columns(std::slice::from_ref(&v)));
        assert!(max_abs_diff(&(&u * u.adjoint()), &identity(4)) < 1e-12);
        assert!((u.column(0) - v).norm() < 1e-14);
    }

    #[test]
    fn partial_trace_of_product_state() {
        let a = from_real(2, 2, &[0.3, 0.1, 0.1, 0.7]);
        let b = from_real(2, 2, &[0.5, 0.0, 0.0, 0.5]);
        let ab = a.kronecker(&b);
        assert!(max_abs_diff(&partial_trace_second(&ab, 2, 2), &a) < 1e-15);
    }

    #[test]
    fn eigenvalues_ascend() {
        let m = from_real(3, 3, &[0.0, 0.5, 0.5, 0.5, 0.0, 0.5, 0.5, 0.5, 0.0]);
        let (vals, _) = hermitian_eigen(&m);
        assert!((vals[0] + 0.5).abs() < 1e-12);
        assert!((vals[1] + 0.5).abs() < 1e-12);
        assert!((vals[2] - 1.0).abs() < 1e-12);
    }
}
