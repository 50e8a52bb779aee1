use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::manifold::{make_point, GeodesicFactors, GrassmannPoint};

/// Smooth one-parameter family of subspaces with a known value at every
/// parameter, used as ground truth for interpolation error.
#[derive(Clone, Debug)]
pub struct AnalyticFamily {
    kind: FamilyKind,
    domain: (f64, f64),
}

#[derive(Clone, Debug)]
pub enum FamilyKind {
    /// `span{ Q (cos(r_k lambda) e_k + sin(r_k lambda) e_{m+k}) }`: every
    /// principal direction turns at its own constant rate, so the family is
    /// an affinely parametrized geodesic.
    PlanarRotation {
        frame: DMatrix<f64>,
        rates: Vec<f64>,
    },
    /// Orthonormalization of `sum_p lambda^p C_p`.
    PolynomialFrame { coefficients: Vec<DMatrix<f64>> },
    /// `gamma(lambda)` on the geodesic with `gamma(0) = x`, `gamma(1) = y`.
    GeodesicThroughPair { factors: GeodesicFactors },
}

impl AnalyticFamily {
    /// Planar rotations in the fixed frame `Q = frame` (orthogonal `n x n`).
    pub fn planar_rotation(
        frame: DMatrix<f64>,
        rates: Vec<f64>,
        domain: (f64, f64),
    ) -> Result<Self> {
        let n = frame.nrows();
        let m = rates.len();
        if m == 0 || 2 * m > n || frame.ncols() != n {
            return Err(Error::InvalidProblem(format!(
                "planar rotation needs a square frame with n >= 2m (n = {n}, m = {m})"
            )));
        }
        if crate::linalg::orthonormality_defect(&frame) > 1e-10 {
            return Err(Error::InvalidProblem(
                "rotation frame must be orthogonal".into(),
            ));
        }
        Ok(Self {
            kind: FamilyKind::PlanarRotation { frame, rates },
            domain,
        })
    }

    /// Planar rotations at a common `rate` in the standard frame of `R^n`.
    pub fn planar_rotation_standard(
        n: usize,
        m: usize,
        rate: f64,
        domain: (f64, f64),
    ) -> Result<Self> {
        Self::planar_rotation(DMatrix::identity(n, n), vec![rate; m], domain)
    }

    /// Planar rotations in a random (seeded) orthogonal frame.
    pub fn planar_rotation_seeded(
        n: usize,
        rates: Vec<f64>,
        domain: (f64, f64),
        seed: u64,
    ) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let frame = crate::sampling::random_point(&mut rng, n, n).into_representative();
        Self::planar_rotation(frame, rates, domain)
    }

    pub fn polynomial_frame(coefficients: Vec<DMatrix<f64>>, domain: (f64, f64)) -> Result<Self> {
        let Some(first) = coefficients.first() else {
            return Err(Error::InvalidProblem(
                "polynomial frame needs coefficients".into(),
            ));
        };
        if coefficients.iter().any(|c| c.shape() != first.shape()) || first.ncols() > first.nrows()
        {
            return Err(Error::InvalidProblem(
                "inconsistent polynomial frame coefficients".into(),
            ));
        }
        Ok(Self {
            kind: FamilyKind::PolynomialFrame { coefficients },
            domain,
        })
    }

    /// `span{(1, lambda, lambda^2), (0, 1, lambda^3)}` in `R^3`.
    pub fn cubic_frame(domain: (f64, f64)) -> Self {
        let c = |entries: [f64; 6]| DMatrix::from_column_slice(3, 2, &entries);
        let coefficients = vec![
            c([1.0, 0.0, 0.0, 0.0, 1.0, 0.0]),
            c([0.0, 1.0, 0.0, 0.0, 0.0, 0.0]),
            c([0.0, 0.0, 1.0, 0.0, 0.0, 0.0]),
            c([0.0, 0.0, 0.0, 0.0, 0.0, 1.0]),
        ];
        Self {
            kind: FamilyKind::PolynomialFrame { coefficients },
            domain,
        }
    }

    pub fn geodesic_through_pair(
        x: &GrassmannPoint,
        y: &GrassmannPoint,
        domain: (f64, f64),
    ) -> Result<Self> {
        Ok(Self {
            kind: FamilyKind::GeodesicThroughPair {
                factors: GeodesicFactors::between(x, y)?,
            },
            domain,
        })
    }

    pub fn kind(&self) -> &FamilyKind {
        &self.kind
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn n(&self) -> usize {
        match &self.kind {
            FamilyKind::PlanarRotation { frame, .. } => frame.nrows(),
            FamilyKind::PolynomialFrame { coefficients } => coefficients[0].nrows(),
            FamilyKind::GeodesicThroughPair { factors } => factors.base().n(),
        }
    }

    pub fn m(&self) -> usize {
        match &self.kind {
            FamilyKind::PlanarRotation { rates, .. } => rates.len(),
            FamilyKind::PolynomialFrame { coefficients } => coefficients[0].ncols(),
            FamilyKind::GeodesicThroughPair { factors } => factors.base().m(),
        }
    }

    /// Subspace at `lambda`.
    pub fn eval(&self, lambda: f64) -> Result<GrassmannPoint> {
        let (lo, hi) = self.domain;
        if !(lambda >= lo && lambda <= hi) {
            return Err(Error::OutOfDomain {
                value: lambda,
                lo,
                hi,
            });
        }
        match &self.kind {
            FamilyKind::PlanarRotation { frame, rates } => {
                let m = rates.len();
                let mut basis = DMatrix::zeros(frame.nrows(), m);
                for (k, rate) in rates.iter().enumerate() {
                    let theta = rate * lambda;
                    let col = frame.column(k) * theta.cos() + frame.column(m + k) * theta.sin();
                    basis.set_column(k, &col);
                }
                make_point(&basis)
            }
            FamilyKind::PolynomialFrame { coefficients } => {
                let mut basis = DMatrix::zeros(coefficients[0].nrows(), coefficients[0].ncols());
                for c in coefficients.iter().rev() {
                    basis = basis * lambda + c;
                }
                make_point(&basis)
            }
            FamilyKind::GeodesicThroughPair { factors } => factors.eval(lambda),
        }
    }
}
