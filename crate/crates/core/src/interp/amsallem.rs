use nalgebra::DMatrix;

use super::{Diagnostic, InterpolationResult, Method, ParameterSampleSet};
use crate::error::{Error, Result};
use crate::manifold::{exp_map, log_map, TangentVector, INJECTIVITY_RADIUS};

/// Lagrange basis polynomials of `nodes` evaluated at `lambda`.
pub fn lagrange_weights(nodes: &[f64], lambda: f64) -> Vec<f64> {
    (0..nodes.len())
        .map(|k| {
            nodes
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(_, &lj)| (lambda - lj) / (nodes[k] - lj))
                .product()
        })
        .collect()
}

/// Index of the sample closest to `lambda`; ties go to the smaller index.
pub fn nearest_index(params: &[f64], lambda: f64) -> usize {
    let mut best = 0;
    for (k, p) in params.iter().enumerate().skip(1) {
        if (lambda - p).abs() < (lambda - params[best]).abs() {
            best = k;
        }
    }
    best
}

/// Tangent-space interpolation at a reference sample.
///
/// Every sample is mapped to the tangent space at `y_r` by the logarithm,
/// the tangent matrices are interpolated entrywise by the full-degree
/// Lagrange polynomial, and the result is mapped back with the exponential.
/// Without `reference_index`, `r` is the sample nearest to `lambda`.
pub fn amsallem(
    samples: &ParameterSampleSet,
    lambda: f64,
    reference_index: Option<usize>,
) -> Result<InterpolationResult> {
    let params = samples.params();
    let r = match reference_index {
        Some(r) if r >= samples.len() => {
            return Err(Error::InvalidSampleSet(format!(
                "reference index {r} out of range for {} samples",
                samples.len()
            )))
        }
        Some(r) => r,
        None => nearest_index(params, lambda),
    };
    let reference = &samples.points()[r];

    let mut diagnostics = vec![Diagnostic::ReferencePoint {
        index: r,
        lambda: params[r],
    }];
    diagnostics.extend(samples.extrapolation_diagnostic(lambda));

    let weights = lagrange_weights(params, lambda);
    let mut combined = DMatrix::zeros(samples.n(), samples.m());
    for (k, (point, w)) in samples.points().iter().zip(&weights).enumerate() {
        if k == r {
            continue;
        }
        let v = log_map(reference, point).map_err(|e| match e {
            Error::OutOfInjectivityBall {
                smallest_cosine, ..
            } => Error::OutOfInjectivityBall {
                sample: Some(k),
                smallest_cosine,
            },
            e => e,
        })?;
        let length = v.norm();
        if length >= INJECTIVITY_RADIUS {
            diagnostics.push(Diagnostic::FarFromReference {
                sample: k,
                distance: length,
            });
        }
        combined += v.delta() * *w;
    }
    let v = TangentVector::horizontal_projection(reference.clone(), &combined)?;
    Ok(InterpolationResult {
        point: exp_map(reference, &v)?,
        method: Method::Amsallem,
        target: lambda,
        diagnostics,
    })
}
