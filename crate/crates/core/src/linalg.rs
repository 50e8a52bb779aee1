//! Small dense kernels shared by the geometry and POD code.
//!
//! Matrices are `nalgebra` values throughout; the SVD and the symmetric
//! eigensolver run in `faer`, whose bidiagonal SVD stays backward stable on
//! inputs where the `nalgebra` one does not converge to the right factors.

use faer::{Mat, MatRef, Side};
use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Relative singular-value floor below which a matrix is treated as singular.
pub const RANK_TOLERANCE: f64 = 1e-10;

fn to_faer(a: &DMatrix<f64>) -> Mat<f64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

fn from_faer(a: MatRef<'_, f64>) -> DMatrix<f64> {
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

/// Singular values in descending order.
pub fn singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    if a.is_empty() {
        return Vec::new();
    }
    to_faer(a)
        .singular_values()
        .expect("svd of a finite matrix converges")
}

/// Thin SVD `a = u * diag(sigma) * vt` with descending singular values.
pub fn thin_svd(a: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>, DMatrix<f64>) {
    let svd = to_faer(a)
        .thin_svd()
        .expect("svd of a finite matrix converges");
    let sigma = svd.S().column_vector().iter().copied().collect();
    (from_faer(svd.U()), sigma, from_faer(svd.V()).transpose())
}

/// Eigen-decomposition of a symmetric matrix, eigenvalues descending with
/// eigenvectors as matching columns. Only the lower triangle is read.
pub fn symmetric_eigen(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let evd = to_faer(a)
        .self_adjoint_eigen(Side::Lower)
        .expect("eigensolver of a finite symmetric matrix converges");
    let values: Vec<f64> = evd.S().column_vector().iter().copied().collect();
    let vectors = evd.U();
    // faer orders ascending
    let values_desc = values.iter().rev().copied().collect();
    let vectors_desc = DMatrix::from_fn(n, n, |i, j| vectors[(i, n - 1 - j)]);
    (values_desc, vectors_desc)
}

/// Orthonormal basis of the column space of a full-column-rank matrix.
///
/// Householder QR, with column signs chosen so that diag(R) >= 0. For an
/// input that is already orthonormal this returns (a rounding of) the input.
pub fn orthonormalize(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (n, m) = a.shape();
    if m == 0 || m > n {
        return Err(Error::DimensionMismatch {
            expected: "n x m with 1 <= m <= n".into(),
            found: crate::error::dims(n, m),
        });
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::RankDeficient { ratio: f64::NAN });
    }
    let sv = singular_values(a);
    let largest = sv[0];
    let smallest = sv[m - 1];
    if largest == 0.0 || smallest <= RANK_TOLERANCE * largest {
        let ratio = if largest == 0.0 {
            0.0
        } else {
            smallest / largest
        };
        return Err(Error::RankDeficient { ratio });
    }
    let qr = a.clone().qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..m {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    Ok(q)
}

/// Frobenius inner product computed as `tr(a^T b)`.
pub fn frobenius_inner(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.dot(b)
}

/// `|a^T a - I|_F`.
pub fn orthonormality_defect(a: &DMatrix<f64>) -> f64 {
    let g = a.transpose() * a;
    (g - DMatrix::identity(a.ncols(), a.ncols())).norm()
}
