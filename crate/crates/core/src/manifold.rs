//! Geometry of the Grassmann manifold `G_m(R^n)`.
//!
//! A point is an `m`-dimensional subspace of `R^n`, stored through an
//! orthonormal `n x m` representative. Because every representative is
//! orthonormal, the metric `tr((X^T X)^{-1} Y1^T Y2)` reduces to the
//! Frobenius inner product and every `(X^T X)^{±1/2}` factor in the
//! exponential/logarithm formulas is the identity.
//!
//! With `~U ~S ~V^T = Y (X^T Y)^{-1} - X` (thin SVD) the geodesic from `X` to
//! `Y` is
//!
//! ```text
//! gamma(s) = span( X ~V cos(s atan ~S) + ~U sin(s atan ~S) )
//! ```
//!
//! and `d(X, Y) = |atan ~S|_F`, which equals the 2-norm of the principal
//! angles between the two subspaces.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{dims, Error, Result};
use crate::linalg::{self, RANK_TOLERANCE};

/// Injectivity radius of the Grassmann manifold.
pub const INJECTIVITY_RADIUS: f64 = FRAC_PI_2;

/// Largest admissible `|X^T delta|_F` for a tangent vector at `X`.
pub const HORIZONTAL_TOLERANCE: f64 = 1e-10;

/// Two representatives are "the same base point" when they agree entrywise
/// to this tolerance.
const SAME_BASE_TOLERANCE: f64 = 1e-12;

/// Margin below the injectivity radius for the pairwise check.
const HYPOTHESIS_MARGIN: f64 = 1e-9;

/// An `m`-dimensional subspace of `R^n`.
#[derive(Clone, Debug)]
pub struct GrassmannPoint {
    rep: DMatrix<f64>,
}

impl GrassmannPoint {
    /// Canonical projection: any full-column-rank `n x m` matrix in, a point
    /// with an orthonormal representative of the same column space out.
    pub fn new(basis: &DMatrix<f64>) -> Result<Self> {
        Ok(Self {
            rep: linalg::orthonormalize(basis)?,
        })
    }

    /// Ambient dimension `n`.
    pub fn n(&self) -> usize {
        self.rep.nrows()
    }

    /// Subspace dimension `m`.
    pub fn m(&self) -> usize {
        self.rep.ncols()
    }

    /// Orthonormal `n x m` representative.
    pub fn representative(&self) -> &DMatrix<f64> {
        &self.rep
    }

    pub fn into_representative(self) -> DMatrix<f64> {
        self.rep
    }

    /// Orthogonal projection of `v` onto the subspace.
    pub fn project(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.rep * (self.rep.transpose() * v)
    }

    fn same_base(&self, other: &GrassmannPoint) -> bool {
        self.rep.shape() == other.rep.shape()
            && self
                .rep
                .iter()
                .zip(other.rep.iter())
                .all(|(a, b)| (a - b).abs() <= SAME_BASE_TOLERANCE)
    }

    pub(crate) fn check_same_shape(&self, other: &GrassmannPoint) -> Result<()> {
        if self.rep.shape() != other.rep.shape() {
            return Err(Error::DimensionMismatch {
                expected: dims(self.n(), self.m()),
                found: dims(other.n(), other.m()),
            });
        }
        Ok(())
    }
}

/// Builds a [`GrassmannPoint`] from any full-rank basis.
pub fn make_point(basis: &DMatrix<f64>) -> Result<GrassmannPoint> {
    GrassmannPoint::new(basis)
}

/// A horizontal `n x m` matrix at a base point.
#[derive(Clone, Debug)]
pub struct TangentVector {
    base: GrassmannPoint,
    delta: DMatrix<f64>,
}

impl TangentVector {
    /// Wraps `delta`, rejecting it unless `|base^T delta|_F <= 1e-10`.
    pub fn new(base: GrassmannPoint, delta: DMatrix<f64>) -> Result<Self> {
        if delta.shape() != base.rep.shape() {
            return Err(Error::DimensionMismatch {
                expected: dims(base.n(), base.m()),
                found: dims(delta.nrows(), delta.ncols()),
            });
        }
        let defect = (base.rep.transpose() * &delta).norm();
        if !(defect <= HORIZONTAL_TOLERANCE) {
            return Err(Error::NotHorizontal { defect });
        }
        Ok(Self { base, delta })
    }

    /// Horizontal part `(I - X X^T) delta` of an arbitrary matrix.
    pub fn horizontal_projection(base: GrassmannPoint, delta: &DMatrix<f64>) -> Result<Self> {
        if delta.shape() != base.rep.shape() {
            return Err(Error::DimensionMismatch {
                expected: dims(base.n(), base.m()),
                found: dims(delta.nrows(), delta.ncols()),
            });
        }
        let delta = remove_vertical(&base.rep, delta.clone());
        Ok(Self { base, delta })
    }

    pub fn zero(base: GrassmannPoint) -> Self {
        let delta = DMatrix::zeros(base.n(), base.m());
        Self { base, delta }
    }

    pub fn base(&self) -> &GrassmannPoint {
        &self.base
    }

    pub fn delta(&self) -> &DMatrix<f64> {
        &self.delta
    }

    /// Norm induced by [`metric_inner`].
    pub fn norm(&self) -> f64 {
        self.delta.norm()
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            base: self.base.clone(),
            delta: &self.delta * t,
        }
    }
}

fn remove_vertical(x: &DMatrix<f64>, delta: DMatrix<f64>) -> DMatrix<f64> {
    let vertical = x * (x.transpose() * &delta);
    delta - vertical
}

/// Riemannian metric at a common base point.
pub fn metric_inner(v1: &TangentVector, v2: &TangentVector) -> Result<f64> {
    if !v1.base.same_base(&v2.base) {
        return Err(Error::BaseMismatch);
    }
    Ok(linalg::frobenius_inner(&v1.delta, &v2.delta))
}

/// Principal angles in `[0, pi/2]`, ascending.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PrincipalAngles {
    angles: Vec<f64>,
}

impl PrincipalAngles {
    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn largest(&self) -> f64 {
        self.angles.last().copied().unwrap_or(0.0)
    }

    /// `|theta|_2`, the geodesic distance.
    pub fn norm(&self) -> f64 {
        self.angles.iter().map(|a| a * a).sum::<f64>().sqrt()
    }
}

/// Principal angles between two subspaces.
///
/// Cosines come from the singular values of `X^T Y`. Angles whose cosine
/// exceeds `1/sqrt(2)` are instead taken from the sines, the singular values
/// of `Y - X X^T Y`, since `acos` loses half the digits near zero.
pub fn principal_angles(x: &GrassmannPoint, y: &GrassmannPoint) -> Result<PrincipalAngles> {
    x.check_same_shape(y)?;
    let m = x.m();
    let xty = x.rep.transpose() * &y.rep;
    let cosines = linalg::singular_values(&xty);
    let residual = &y.rep - &x.rep * &xty;
    let sines = linalg::singular_values(&residual);
    let mut angles: Vec<f64> = (0..m)
        .map(|i| {
            let c = cosines[i].clamp(0.0, 1.0);
            if c * c <= 0.5 {
                c.acos()
            } else {
                // sines are descending; the i-th largest cosine pairs with
                // the i-th smallest sine
                sines[m - 1 - i].clamp(0.0, 1.0).asin()
            }
        })
        .collect();
    angles.sort_by(|a, b| a.total_cmp(b));
    Ok(PrincipalAngles { angles })
}

/// Geodesic distance `|theta|_2`.
pub fn distance(x: &GrassmannPoint, y: &GrassmannPoint) -> Result<f64> {
    Ok(principal_angles(x, y)?.norm())
}

/// Distance through the SVD of `Y (X^T Y)^{-1} - X`, `|atan(S)|_F`.
///
/// Only defined when `X^T Y` is invertible. Kept as an independent route to
/// cross-check [`distance`].
pub fn distance_tangent_route(x: &GrassmannPoint, y: &GrassmannPoint) -> Result<f64> {
    Ok(GeodesicFactors::between(x, y)?.length())
}

/// Thin SVD factors `U diag(sigma) V^T = Y (X^T Y)^{-1} - X` describing the
/// geodesic leaving `base` towards another point.
#[derive(Clone, Debug)]
pub struct GeodesicFactors {
    base: GrassmannPoint,
    u: DMatrix<f64>,
    sigma: Vec<f64>,
    v: DMatrix<f64>,
}

impl GeodesicFactors {
    /// Factors of the geodesic from `x` (at `s = 0`) to `y` (at `s = 1`).
    pub fn between(x: &GrassmannPoint, y: &GrassmannPoint) -> Result<Self> {
        x.check_same_shape(y)?;
        let xty = x.rep.transpose() * &y.rep;
        let sv = linalg::singular_values(&xty);
        let smallest = sv[sv.len() - 1];
        if !(smallest > RANK_TOLERANCE) {
            return Err(Error::SubspacesNotInGenericPosition { smallest });
        }
        let y_perp = &y.rep - &x.rep * &xty;
        // M (X^T Y) = Y_perp  <=>  (X^T Y)^T M^T = Y_perp^T
        let lu = xty.transpose().lu();
        let mt = lu
            .solve(&y_perp.transpose())
            .ok_or(Error::SubspacesNotInGenericPosition { smallest })?;
        let tangent = remove_vertical(&x.rep, mt.transpose());
        let (u, sigma, vt) = linalg::thin_svd(&tangent);
        Ok(Self {
            base: x.clone(),
            u,
            sigma,
            v: vt.transpose(),
        })
    }

    pub fn base(&self) -> &GrassmannPoint {
        &self.base
    }

    pub fn u(&self) -> &DMatrix<f64> {
        &self.u
    }

    /// Singular values of `Y (X^T Y)^{-1} - X`, i.e. tangents of the
    /// principal angles, descending.
    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn v(&self) -> &DMatrix<f64> {
        &self.v
    }

    /// Principal angles `atan(sigma)`, descending.
    pub fn angles(&self) -> Vec<f64> {
        self.sigma.iter().map(|s| s.atan()).collect()
    }

    /// Length of the geodesic segment `s in [0, 1]`.
    pub fn length(&self) -> f64 {
        self.sigma
            .iter()
            .map(|s| s.atan().powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Reconstruction `U diag(sigma) V^T`.
    pub fn recompose(&self) -> DMatrix<f64> {
        scale_columns(&self.u, &self.sigma) * self.v.transpose()
    }

    /// Initial velocity `U atan(sigma) V^T`, the logarithm of the endpoint.
    pub fn velocity(&self) -> TangentVector {
        let angles = self.angles();
        let delta = scale_columns(&self.u, &angles) * self.v.transpose();
        TangentVector {
            base: self.base.clone(),
            delta: remove_vertical(&self.base.rep, delta),
        }
    }

    /// Point at parameter `s`. Any real `s` is accepted; values outside
    /// `[0, 1]` extrapolate along the same geodesic.
    pub fn eval(&self, s: f64) -> Result<GrassmannPoint> {
        let angles: Vec<f64> = self.sigma.iter().map(|t| s * t.atan()).collect();
        Ok(recombine(&self.base.rep, &self.u, &angles, &self.v))
    }
}

/// `X V cos(theta) V^T + U sin(theta) V^T`, re-orthonormalized.
fn recombine(
    x: &DMatrix<f64>,
    u: &DMatrix<f64>,
    theta: &[f64],
    v: &DMatrix<f64>,
) -> GrassmannPoint {
    let cos: Vec<f64> = theta.iter().map(|t| t.cos()).collect();
    let sin: Vec<f64> = theta.iter().map(|t| t.sin()).collect();
    let moved = (scale_columns(&(x * v), &cos) + scale_columns(u, &sin)) * v.transpose();
    // the columns are orthonormal up to rounding, so the QR cannot fail
    GrassmannPoint::new(&moved).expect("geodesic recombination stays full rank")
}

fn scale_columns(a: &DMatrix<f64>, scale: &[f64]) -> DMatrix<f64> {
    let mut out = a.clone();
    for (j, s) in scale.iter().enumerate() {
        out.column_mut(j).scale_mut(*s);
    }
    out
}

/// Point `gamma(s)` on the geodesic with `gamma(0) = x`, `gamma(1) = y`.
pub fn geodesic_eval(x: &GrassmannPoint, y: &GrassmannPoint, s: f64) -> Result<GrassmannPoint> {
    GeodesicFactors::between(x, y)?.eval(s)
}

/// Riemannian logarithm of `y` at `x`.
pub fn log_map(x: &GrassmannPoint, y: &GrassmannPoint) -> Result<TangentVector> {
    match GeodesicFactors::between(x, y) {
        Ok(factors) => Ok(factors.velocity()),
        Err(Error::SubspacesNotInGenericPosition { smallest }) => {
            Err(Error::OutOfInjectivityBall {
                sample: None,
                smallest_cosine: smallest,
            })
        }
        Err(e) => Err(e),
    }
}

/// Riemannian exponential of `v` at `x`.
pub fn exp_map(x: &GrassmannPoint, v: &TangentVector) -> Result<GrassmannPoint> {
    if !x.same_base(&v.base) {
        return Err(Error::BaseMismatch);
    }
    let (u, sigma, vt) = linalg::thin_svd(&v.delta);
    Ok(recombine(&x.rep, &u, &sigma, &vt.transpose()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Warn,
}

/// Outcome of the pairwise injectivity-ball check.
#[derive(Clone, Debug, Serialize)]
pub struct HypothesisCheck {
    pub max_pairwise_distance: f64,
    pub worst_pair: Option<(usize, usize)>,
    pub verdict: Verdict,
}

/// Checks that every pair of points is closer than the injectivity radius,
/// which guarantees the unique pairwise geodesics used by the interpolators.
pub fn check_hypothesis_h(points: &[GrassmannPoint]) -> Result<HypothesisCheck> {
    let first = points.first().ok_or(Error::EmptySampleSet)?;
    for p in &points[1..] {
        first.check_same_shape(p)?;
    }
    let mut max_pairwise_distance = 0.0;
    let mut worst_pair = None;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d = distance(&points[i], &points[j])?;
            if d > max_pairwise_distance || worst_pair.is_none() {
                max_pairwise_distance = d;
                worst_pair = Some((i, j));
            }
        }
    }
    let verdict = if max_pairwise_distance < INJECTIVITY_RADIUS - HYPOTHESIS_MARGIN {
        Verdict::Pass
    } else {
        Verdict::Warn
    };
    Ok(HypothesisCheck {
        max_pairwise_distance,
        worst_pair,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn line(n: usize, theta: f64) -> GrassmannPoint {
        let mut v = DMatrix::zeros(n, 1);
        v[(0, 0)] = theta.cos();
        v[(1, 0)] = theta.sin();
        make_point(&v).unwrap()
    }

    #[test]
    fn identity_block_is_kept() {
        let mut b = DMatrix::zeros(4, 2);
        b[(0, 0)] = 1.0;
        b[(1, 1)] = 1.0;
        let p = make_point(&b).unwrap();
        assert_eq!(p.representative(), &b);
    }

    #[test]
    fn scaled_vector_is_normalized() {
        let mut b = DMatrix::zeros(3, 1);
        b[(0, 0)] = 2.0;
        let p = make_point(&b).unwrap();
        assert!((p.representative()[(0, 0)] - 1.0).abs() < 1e-15);
        assert_eq!(p.representative()[(1, 0)], 0.0);
    }

    #[test]
    fn rank_deficient_basis_is_rejected() {
        let b = DMatrix::from_column_slice(3, 2, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0]);
        assert!(matches!(make_point(&b), Err(Error::RankDeficient { .. })));
        let zero = DMatrix::<f64>::zeros(3, 1);
        assert!(matches!(
            make_point(&zero),
            Err(Error::RankDeficient { .. })
        ));
    }

    #[test]
    fn too_many_columns_is_a_dimension_error() {
        let b = DMatrix::<f64>::identity(2, 3);
        assert!(matches!(
            make_point(&b),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn metric_of_single_entry() {
        let base = line(3, 0.0);
        let mut d = DMatrix::zeros(3, 1);
        d[(1, 0)] = 3.0;
        let v = TangentVector::new(base.clone(), d).unwrap();
        assert_eq!(metric_inner(&v, &v).unwrap(), 9.0);
        let z = TangentVector::zero(base);
        assert_eq!(metric_inner(&z, &z).unwrap(), 0.0);
    }

    #[test]
    fn metric_rejects_different_bases() {
        let a = TangentVector::zero(line(3, 0.0));
        let b = TangentVector::zero(line(3, 0.5));
        assert!(matches!(metric_inner(&a, &b), Err(Error::BaseMismatch)));
    }

    #[test]
    fn vertical_vectors_are_rejected() {
        let base = line(3, 0.0);
        let d = base.representative().clone();
        assert!(matches!(
            TangentVector::new(base, d),
            Err(Error::NotHorizontal { .. })
        ));
    }

    #[test]
    fn planar_angles() {
        let a = principal_angles(&line(3, 0.0), &line(3, 0.3)).unwrap();
        assert!((a.angles()[0] - 0.3).abs() < 1e-15);
        let same = principal_angles(&line(3, 0.3), &line(3, 0.3)).unwrap();
        assert!(same.angles()[0] < 1e-15);
        let ortho = principal_angles(&line(3, 0.0), &line(3, PI / 2.0)).unwrap();
        assert!((ortho.angles()[0] - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn angle_dimension_mismatch() {
        let a = line(3, 0.0);
        let b = line(4, 0.0);
        assert!(matches!(
            principal_angles(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn planar_distance_and_log() {
        let x = line(3, 0.0);
        let y = line(3, 0.3);
        assert!((distance(&x, &y).unwrap() - 0.3).abs() < 1e-15);
        assert!((distance_tangent_route(&x, &y).unwrap() - 0.3).abs() < 1e-15);
        let v = log_map(&x, &y).unwrap();
        assert!(v.delta()[(0, 0)].abs() < 1e-15);
        assert!((v.delta()[(1, 0)] - 0.3).abs() < 1e-15);
        assert!(v.delta()[(2, 0)].abs() < 1e-15);
        assert!((v.norm() - 0.3).abs() < 1e-15);
        let zero = log_map(&x, &x).unwrap();
        assert_eq!(zero.norm(), 0.0);
    }

    #[test]
    fn log_of_orthogonal_line_fails() {
        let x = line(3, 0.0);
        let y = line(3, PI / 2.0);
        assert!(matches!(
            log_map(&x, &y),
            Err(Error::OutOfInjectivityBall { .. })
        ));
        assert!(matches!(
            geodesic_eval(&x, &y, 0.5),
            Err(Error::SubspacesNotInGenericPosition { .. })
        ));
    }

    #[test]
    fn planar_exp() {
        let x = line(3, 0.0);
        let mut d = DMatrix::zeros(3, 1);
        d[(1, 0)] = 0.3;
        let v = TangentVector::new(x.clone(), d).unwrap();
        let y = exp_map(&x, &v).unwrap();
        assert!(distance(&y, &line(3, 0.3)).unwrap() < 1e-15);
        let back = exp_map(&x, &TangentVector::zero(x.clone())).unwrap();
        assert!(distance(&back, &x).unwrap() < 1e-15);
    }

    #[test]
    fn exp_rejects_foreign_base() {
        let x = line(3, 0.0);
        let v = TangentVector::zero(line(3, 0.4));
        assert!(matches!(exp_map(&x, &v), Err(Error::BaseMismatch)));
    }

    #[test]
    fn planar_geodesic_points() {
        let x = line(3, 0.0);
        let y = line(3, 0.3);
        assert!(distance(&geodesic_eval(&x, &y, 0.0).unwrap(), &x).unwrap() < 1e-15);
        assert!(distance(&geodesic_eval(&x, &y, 1.0).unwrap(), &y).unwrap() < 1e-15);
        let mid = geodesic_eval(&x, &y, 0.5).unwrap();
        assert!(distance(&mid, &line(3, 0.15)).unwrap() < 1e-15);
        let far = geodesic_eval(&x, &y, 4.0).unwrap();
        assert!(distance(&far, &line(3, 1.2)).unwrap() < 1e-14);
    }

    #[test]
    fn geodesic_factors_recompose_their_input() {
        let x = line(3, 0.0);
        let y = line(3, 0.7);
        let f = GeodesicFactors::between(&x, &y).unwrap();
        let target = y.representative()
            * (x.representative().transpose() * y.representative())
                .try_inverse()
                .unwrap()
            - x.representative();
        let rel = (f.recompose() - &target).norm() / target.norm();
        assert!(rel < 1e-10);
    }

    #[test]
    fn hypothesis_verdicts() {
        let single = check_hypothesis_h(&[line(3, 0.1)]).unwrap();
        assert_eq!(single.verdict, Verdict::Pass);
        assert_eq!(single.max_pairwise_distance, 0.0);

        let fam = [line(3, 0.0), line(3, 0.2), line(3, 0.4)];
        let check = check_hypothesis_h(&fam).unwrap();
        assert_eq!(check.verdict, Verdict::Pass);
        assert!((check.max_pairwise_distance - 0.4).abs() < 1e-14);
        assert_eq!(check.worst_pair, Some((0, 2)));

        let ortho = check_hypothesis_h(&[line(3, 0.0), line(3, PI / 2.0)]).unwrap();
        assert_eq!(ortho.verdict, Verdict::Warn);

        assert!(matches!(
            check_hypothesis_h(&[]),
            Err(Error::EmptySampleSet)
        ));
        assert!(matches!(
            check_hypothesis_h(&[line(3, 0.0), line(4, 0.0)]),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
