//! Interpolation of subspaces sampled at scalar parameter values.
//!
//! Three interpolators share one input type, [`ParameterSampleSet`]:
//!
//! * [`neville`]: the Neville–Aitken triangle with every affine two-point
//!   combination replaced by a point on the connecting geodesic;
//! * [`amsallem`]: logarithms at a reference sample, entrywise Lagrange
//!   interpolation in the tangent space, exponential back;
//! * [`standard`]: piecewise-affine blending of the raw basis matrices,
//!   orthonormalized afterwards. This is the naive baseline.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{dims, Error, Result};
use crate::manifold::GrassmannPoint;

mod amsallem;
mod barycenter;
mod neville;
mod standard;

pub use amsallem::{amsallem, lagrange_weights, nearest_index};
pub use barycenter::{affine_weight, karcher_objective, two_point_barycenter};
pub use neville::{neville, neville_in_order, order_sensitivity};
pub use standard::standard;

/// Ordered parameter samples with one subspace each.
#[derive(Clone, Debug)]
pub struct ParameterSampleSet {
    params: Vec<f64>,
    points: Vec<GrassmannPoint>,
    raw_bases: Option<Vec<DMatrix<f64>>>,
    mean_fields: Option<Vec<DVector<f64>>>,
}

impl ParameterSampleSet {
    /// `params` must be strictly increasing and match `points` in length.
    pub fn new(params: Vec<f64>, points: Vec<GrassmannPoint>) -> Result<Self> {
        if params.is_empty() || points.is_empty() {
            return Err(Error::EmptySampleSet);
        }
        if params.len() != points.len() {
            return Err(Error::InvalidSampleSet(format!(
                "{} parameters but {} points",
                params.len(),
                points.len()
            )));
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidSampleSet("non-finite parameter".into()));
        }
        let range = params[params.len() - 1] - params[0];
        for w in params.windows(2) {
            if !(w[1] - w[0] > 1e-12 * range) {
                return Err(Error::InvalidSampleSet(format!(
                    "parameters must be strictly increasing ({} then {})",
                    w[0], w[1]
                )));
            }
        }
        for p in &points[1..] {
            points[0].check_same_shape(p)?;
        }
        Ok(Self {
            params,
            points,
            raw_bases: None,
            mean_fields: None,
        })
    }

    /// Builds a sample set from possibly unordered `(lambda, point)` pairs.
    pub fn from_unsorted(mut samples: Vec<(f64, GrassmannPoint)>) -> Result<Self> {
        samples.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (params, points) = samples.into_iter().unzip();
        Self::new(params, points)
    }

    /// Attaches the un-orthonormalized bases used by [`standard`].
    pub fn with_raw_bases(mut self, raw: Vec<DMatrix<f64>>) -> Result<Self> {
        if raw.len() != self.len() {
            return Err(Error::InvalidSampleSet(format!(
                "{} raw bases for {} samples",
                raw.len(),
                self.len()
            )));
        }
        let shape = (self.n(), self.m());
        if let Some(b) = raw.iter().find(|b| b.shape() != shape) {
            return Err(Error::DimensionMismatch {
                expected: dims(shape.0, shape.1),
                found: dims(b.nrows(), b.ncols()),
            });
        }
        self.raw_bases = Some(raw);
        Ok(self)
    }

    pub fn with_mean_fields(mut self, means: Vec<DVector<f64>>) -> Result<Self> {
        if means.len() != self.len() {
            return Err(Error::InvalidSampleSet(format!(
                "{} mean fields for {} samples",
                means.len(),
                self.len()
            )));
        }
        if let Some(v) = means.iter().find(|v| v.len() != self.n()) {
            return Err(Error::DimensionMismatch {
                expected: format!("length {}", self.n()),
                found: format!("length {}", v.len()),
            });
        }
        self.mean_fields = Some(means);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn n(&self) -> usize {
        self.points[0].n()
    }

    pub fn m(&self) -> usize {
        self.points[0].m()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn points(&self) -> &[GrassmannPoint] {
        &self.points
    }

    pub fn raw_bases(&self) -> Option<&[DMatrix<f64>]> {
        self.raw_bases.as_deref()
    }

    pub fn mean_fields(&self) -> Option<&[DVector<f64>]> {
        self.mean_fields.as_deref()
    }

    /// Parameter hull `[min, max]`.
    pub fn hull(&self) -> (f64, f64) {
        (self.params[0], self.params[self.len() - 1])
    }

    /// Indices `(i, i + 1)` of the interval containing `lambda`; the first
    /// or last interval when `lambda` lies outside the hull.
    pub fn bracket(&self, lambda: f64) -> (usize, usize) {
        let last = self.len() - 1;
        if last == 0 {
            return (0, 0);
        }
        let upper = self.params.partition_point(|&p| p < lambda);
        let i = upper.saturating_sub(1).min(last - 1);
        (i, i + 1)
    }

    /// Entrywise piecewise-linear interpolation of the mean fields.
    pub fn interpolate_mean(&self, lambda: f64) -> Option<DVector<f64>> {
        let means = self.mean_fields.as_ref()?;
        let (i, j) = self.bracket(lambda);
        if i == j {
            return Some(means[i].clone());
        }
        let alpha = affine_weight(self.params[i], self.params[j], lambda).ok()?;
        Some(&means[i] * (1.0 - alpha) + &means[j] * alpha)
    }

    pub(crate) fn extrapolation_diagnostic(&self, lambda: f64) -> Option<Diagnostic> {
        let (lo, hi) = self.hull();
        (lambda < lo || lambda > hi).then_some(Diagnostic::Extrapolation {
            target: lambda,
            lo,
            hi,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Neville,
    Amsallem,
    Standard,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Neville => "neville",
            Method::Amsallem => "amsallem",
            Method::Standard => "standard",
        })
    }
}

/// Non-fatal observations made while interpolating.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Diagnostic {
    /// Target outside the sampled parameter hull.
    Extrapolation {
        target: f64,
        lo: f64,
        hi: f64,
    },
    /// A Neville cell traveled at least the injectivity radius along its
    /// geodesic.
    LongArc {
        i: usize,
        j: usize,
        arc: f64,
    },
    /// Pairwise injectivity check failed for the samples.
    HypothesisWarn {
        max_pairwise_distance: f64,
        pair: (usize, usize),
    },
    /// A sample lies at least the injectivity radius away from the
    /// tangent-space reference.
    FarFromReference {
        sample: usize,
        distance: f64,
    },
    ReferencePoint {
        index: usize,
        lambda: f64,
    },
    /// No raw bases were attached; orthonormal representatives were blended.
    RawBasesMissing,
    /// The entrywise blend was orthonormalized before use.
    BlendOrthonormalized {
        lo: usize,
        hi: usize,
        alpha: f64,
    },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::Extrapolation { target, lo, hi } => {
                write!(f, "WARN target {target} outside sampled range [{lo}, {hi}]")
            }
            Diagnostic::LongArc { i, j, arc } => {
                write!(
                    f,
                    "WARN Neville cell ({i}, {j}) traveled arc {arc:.4} >= pi/2"
                )
            }
            Diagnostic::HypothesisWarn {
                max_pairwise_distance,
                pair,
            } => write!(
                f,
                "WARN samples {} and {} are {max_pairwise_distance:.4} apart (>= pi/2)",
                pair.0, pair.1
            ),
            Diagnostic::FarFromReference { sample, distance } => write!(
                f,
                "WARN sample {sample} is {distance:.4} from the reference point (>= pi/2)"
            ),
            Diagnostic::ReferencePoint { index, lambda } => {
                write!(f, "reference point: sample {index} (lambda = {lambda})")
            }
            Diagnostic::RawBasesMissing => {
                write!(f, "raw bases missing; blended orthonormal representatives")
            }
            Diagnostic::BlendOrthonormalized { lo, hi, alpha } => write!(
                f,
                "blend of samples {lo} and {hi} (alpha = {alpha:.4}) orthonormalized"
            ),
        }
    }
}

/// Interpolated subspace with the method that produced it.
#[derive(Clone, Debug)]
pub struct InterpolationResult {
    pub point: GrassmannPoint,
    pub method: Method,
    pub target: f64,
    pub diagnostics: Vec<Diagnostic>,
}

/// Dispatches to one of the interpolators. `reference_index` only affects
/// [`Method::Amsallem`].
pub fn interpolate(
    method: Method,
    samples: &ParameterSampleSet,
    lambda: f64,
    reference_index: Option<usize>,
) -> Result<InterpolationResult> {
    match method {
        Method::Neville => neville(samples, lambda),
        Method::Amsallem => amsallem(samples, lambda, reference_index),
        Method::Standard => standard(samples, lambda),
    }
}
