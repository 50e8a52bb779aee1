use super::{affine_weight, Diagnostic, InterpolationResult, Method, ParameterSampleSet};
use crate::error::{Error, Result};
use crate::manifold::{
    check_hypothesis_h, distance, GeodesicFactors, GrassmannPoint, Verdict, INJECTIVITY_RADIUS,
};

/// Geodesic Neville–Aitken interpolation at `lambda`.
///
/// Builds the triangle `Y(i, 0) = y_i`,
/// `Y(i, j + 1) = Gamma[lambda_i, lambda_{i+j+1}; Y(i, j), Y(i + 1, j)](lambda)`
/// in ascending parameter order and returns `Y(0, N)`.
pub fn neville(samples: &ParameterSampleSet, lambda: f64) -> Result<InterpolationResult> {
    let order: Vec<usize> = (0..samples.len()).collect();
    neville_in_order(samples, lambda, &order)
}

/// Same triangle with the nodes visited in `order` (a permutation of the
/// sample indices). Exists to measure order dependence on the manifold.
pub fn neville_in_order(
    samples: &ParameterSampleSet,
    lambda: f64,
    order: &[usize],
) -> Result<InterpolationResult> {
    let mut seen = vec![false; samples.len()];
    if order.len() != samples.len()
        || order
            .iter()
            .any(|&k| k >= samples.len() || std::mem::replace(&mut seen[k], true))
    {
        return Err(Error::InvalidSampleSet(
            "node order is not a permutation of the samples".into(),
        ));
    }
    let params: Vec<f64> = order.iter().map(|&k| samples.params()[k]).collect();
    let mut table: Vec<GrassmannPoint> =
        order.iter().map(|&k| samples.points()[k].clone()).collect();

    let mut diagnostics = Vec::new();
    diagnostics.extend(samples.extrapolation_diagnostic(lambda));
    let check = check_hypothesis_h(samples.points())?;
    if check.verdict == Verdict::Warn {
        diagnostics.push(Diagnostic::HypothesisWarn {
            max_pairwise_distance: check.max_pairwise_distance,
            pair: check.worst_pair.unwrap_or((0, 0)),
        });
    }

    let last = table.len() - 1;
    for j in 0..last {
        for i in 0..last - j {
            let cell = |e: Error| Error::NevilleCell {
                i,
                j: j + 1,
                source: Box::new(e),
            };
            let alpha = affine_weight(params[i], params[i + j + 1], lambda).map_err(cell)?;
            let factors = GeodesicFactors::between(&table[i], &table[i + 1]).map_err(cell)?;
            let arc = alpha.abs() * factors.length();
            if arc >= INJECTIVITY_RADIUS {
                diagnostics.push(Diagnostic::LongArc { i, j: j + 1, arc });
            }
            table[i] = factors.eval(alpha).map_err(cell)?;
        }
    }

    Ok(InterpolationResult {
        point: table.swap_remove(0),
        method: Method::Neville,
        target: lambda,
        diagnostics,
    })
}

/// Distance between the ascending-order and descending-order Neville
/// interpolants. Zero for vector-valued Lagrange interpolation; on the
/// manifold it measures how much the node order matters.
pub fn order_sensitivity(samples: &ParameterSampleSet, lambda: f64) -> Result<f64> {
    let forward = neville(samples, lambda)?;
    let reversed: Vec<usize> = (0..samples.len()).rev().collect();
    let backward = neville_in_order(samples, lambda, &reversed)?;
    distance(&forward.point, &backward.point)
}
