use super::{affine_weight, Diagnostic, InterpolationResult, Method, ParameterSampleSet};
use crate::error::Result;
use crate::manifold::make_point;

/// Naive baseline: entrywise piecewise-affine blend of the two bracketing
/// basis matrices, orthonormalized into a subspace.
pub fn standard(samples: &ParameterSampleSet, lambda: f64) -> Result<InterpolationResult> {
    let mut diagnostics = Vec::new();
    diagnostics.extend(samples.extrapolation_diagnostic(lambda));
    let bases: Vec<_> = match samples.raw_bases() {
        Some(raw) => raw.iter().collect(),
        None => {
            diagnostics.push(Diagnostic::RawBasesMissing);
            samples
                .points()
                .iter()
                .map(|p| p.representative())
                .collect()
        }
    };
    let (i, j) = samples.bracket(lambda);
    let blend = if i == j {
        bases[i].clone()
    } else {
        let alpha = affine_weight(samples.params()[i], samples.params()[j], lambda)?;
        diagnostics.push(Diagnostic::BlendOrthonormalized {
            lo: i,
            hi: j,
            alpha,
        });
        bases[i] * (1.0 - alpha) + bases[j] * alpha
    };
    Ok(InterpolationResult {
        point: make_point(&blend)?,
        method: Method::Standard,
        target: lambda,
        diagnostics,
    })
}
