//! Seeded random generators for subspaces, used by tests and benchmarks.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::manifold::{make_point, principal_angles, GrassmannPoint, TangentVector};

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Uniformly distributed point of `G_m(R^n)`.
pub fn random_point<R: Rng + ?Sized>(rng: &mut R, n: usize, m: usize) -> GrassmannPoint {
    loop {
        if let Ok(p) = make_point(&gaussian_matrix(rng, n, m)) {
            return p;
        }
    }
}

/// Point obtained by perturbing `x` with Gaussian noise of Frobenius size
/// `spread`, redrawn until every principal angle to `x` is below `max_angle`.
pub fn random_nearby<R: Rng + ?Sized>(
    rng: &mut R,
    x: &GrassmannPoint,
    spread: f64,
    max_angle: f64,
) -> GrassmannPoint {
    loop {
        let g = gaussian_matrix(rng, x.n(), x.m());
        let g = &g / g.norm();
        let Ok(y) = make_point(&(x.representative() + g * spread)) else {
            continue;
        };
        if principal_angles(x, &y)
            .map(|a| a.largest() < max_angle)
            .unwrap_or(false)
        {
            return y;
        }
    }
}

/// Random invertible `m x m` matrix with condition number at most `max_cond`.
pub fn random_invertible<R: Rng + ?Sized>(rng: &mut R, m: usize, max_cond: f64) -> DMatrix<f64> {
    loop {
        let a = gaussian_matrix(rng, m, m);
        let sv = crate::linalg::singular_values(&a);
        if sv[m - 1] > 0.0 && sv[0] / sv[m - 1] <= max_cond {
            return a;
        }
    }
}

/// Random horizontal direction at `x` with Frobenius norm `norm`.
pub fn random_tangent<R: Rng + ?Sized>(
    rng: &mut R,
    x: &GrassmannPoint,
    norm: f64,
) -> TangentVector {
    loop {
        let g = gaussian_matrix(rng, x.n(), x.m());
        let v = TangentVector::horizontal_projection(x.clone(), &g).expect("shapes match");
        let len = v.norm();
        if len > 1e-8 {
            return v.scaled(norm / len);
        }
    }
}
