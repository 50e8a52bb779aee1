use crate::error::{Error, Result};
use crate::manifold::{distance, geodesic_eval, GrassmannPoint};

/// `(lambda - lambda_i) / (lambda_j - lambda_i)`.
pub fn affine_weight(lambda_i: f64, lambda_j: f64, lambda: f64) -> Result<f64> {
    let scale = lambda_i.abs().max(lambda_j.abs()).max(1.0);
    if !((lambda_j - lambda_i).abs() > 1e-12 * scale) {
        return Err(Error::DegenerateInterval {
            lo: lambda_i,
            hi: lambda_j,
        });
    }
    Ok((lambda - lambda_i) / (lambda_j - lambda_i))
}

/// Geodesic barycenter of `y_i` and `y_j` with weights `1 - alpha` and
/// `alpha`, `alpha = affine_weight(lambda_i, lambda_j, lambda)`.
pub fn two_point_barycenter(
    lambda_i: f64,
    lambda_j: f64,
    y_i: &GrassmannPoint,
    y_j: &GrassmannPoint,
    lambda: f64,
) -> Result<GrassmannPoint> {
    let alpha = affine_weight(lambda_i, lambda_j, lambda)?;
    geodesic_eval(y_i, y_j, alpha)
}

/// `J(y) = 1/2 [(1 - alpha) d^2(y, y_i) + alpha d^2(y, y_j)]`, minimized over
/// `y` by the geodesic barycenter.
pub fn karcher_objective(
    y: &GrassmannPoint,
    y_i: &GrassmannPoint,
    y_j: &GrassmannPoint,
    alpha: f64,
) -> Result<f64> {
    let di = distance(y, y_i)?;
    let dj = distance(y, y_j)?;
    Ok(0.5 * ((1.0 - alpha) * di * di + alpha * dj * dj))
}
