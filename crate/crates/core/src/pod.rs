//! Snapshot POD: mean/fluctuation split, method of snapshots, and the
//! projection and dynamic error figures.
//!
//! Fields are discrete vectors on a uniform grid and the inner product is the
//! plain Euclidean one.

use nalgebra::{DMatrix, DVector};

use crate::error::{dims, Error, Result};
use crate::linalg;
use crate::manifold::GrassmannPoint;

/// Relative eigenvalue floor defining the numerical rank of the snapshots.
pub const EIGEN_RANK_TOLERANCE: f64 = 1e-12;

/// Fluctuating snapshots `raw - mean 1^T` with their temporal mean.
#[derive(Clone, Debug)]
pub struct SnapshotEnsemble {
    snapshots: DMatrix<f64>,
    times: Vec<f64>,
    mean: DVector<f64>,
}

impl SnapshotEnsemble {
    /// Fluctuations, one column per time.
    pub fn snapshots(&self) -> &DMatrix<f64> {
        &self.snapshots
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn n(&self) -> usize {
        self.snapshots.nrows()
    }

    pub fn len(&self) -> usize {
        self.snapshots.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.ncols() == 0
    }

    /// Adds the mean back.
    pub fn raw(&self) -> DMatrix<f64> {
        let mut raw = self.snapshots.clone();
        for mut col in raw.column_iter_mut() {
            col += &self.mean;
        }
        raw
    }
}

/// Splits raw snapshots into their row-wise temporal mean and fluctuations.
pub fn split_mean(raw: &DMatrix<f64>, times: &[f64]) -> Result<SnapshotEnsemble> {
    let count = raw.ncols();
    if count < 2 {
        return Err(Error::TooFewSnapshots(count));
    }
    if times.len() != count {
        return Err(Error::DimensionMismatch {
            expected: format!("{count} times"),
            found: format!("{} times", times.len()),
        });
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidProblem(
            "snapshot times must be strictly increasing".into(),
        ));
    }
    let mean = raw.column_sum() / raw.ncols() as f64;
    let mut snapshots = raw.clone();
    for mut col in snapshots.column_iter_mut() {
        col -= &mean;
    }
    Ok(SnapshotEnsemble {
        snapshots,
        times: times.to_vec(),
        mean,
    })
}

/// Orthonormal modes with the mean field they complement.
///
/// `eigenvalues` holds the leading eigenvalues of the snapshot correlation
/// matrix when the basis came out of [`snapshots_pod`]; it is `None` for
/// bases obtained otherwise (for instance by interpolation).
#[derive(Clone, Debug)]
pub struct PodBasis {
    modes: DMatrix<f64>,
    eigenvalues: Option<Vec<f64>>,
    mean: DVector<f64>,
}

impl PodBasis {
    /// Wraps an orthonormal subspace representative and a mean field.
    pub fn from_subspace(point: &GrassmannPoint, mean: DVector<f64>) -> Result<Self> {
        if mean.len() != point.n() {
            return Err(Error::DimensionMismatch {
                expected: format!("mean of length {}", point.n()),
                found: format!("length {}", mean.len()),
            });
        }
        Ok(Self {
            modes: point.representative().clone(),
            eigenvalues: None,
            mean,
        })
    }

    /// Reassembles a stored basis. The modes are kept verbatim and must be
    /// orthonormal to `1e-10`.
    pub fn from_parts(
        modes: DMatrix<f64>,
        eigenvalues: Option<Vec<f64>>,
        mean: DVector<f64>,
    ) -> Result<Self> {
        let (n, m) = modes.shape();
        if m == 0 || m > n || mean.len() != n || eigenvalues.as_ref().is_some_and(|e| e.len() != m)
        {
            return Err(Error::DimensionMismatch {
                expected: format!("{n}x{m} modes with mean of length {n} and {m} eigenvalues"),
                found: format!(
                    "mean of length {}, {} eigenvalues",
                    mean.len(),
                    eigenvalues.as_ref().map_or(0, Vec::len)
                ),
            });
        }
        let defect = linalg::orthonormality_defect(&modes);
        if !(defect <= 1e-10) {
            return Err(Error::Format(format!(
                "stored modes are not orthonormal (defect {defect:e})"
            )));
        }
        Ok(Self {
            modes,
            eigenvalues,
            mean,
        })
    }

    /// Truncation rank `M`.
    pub fn rank(&self) -> usize {
        self.modes.ncols()
    }

    pub fn n(&self) -> usize {
        self.modes.nrows()
    }

    pub fn modes(&self) -> &DMatrix<f64> {
        &self.modes
    }

    pub fn eigenvalues(&self) -> Option<&[f64]> {
        self.eigenvalues.as_deref()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    /// Coefficients `Phi^T (u - mean)` of a full field.
    pub fn coefficients(&self, field: &DVector<f64>) -> DVector<f64> {
        self.modes.transpose() * (field - &self.mean)
    }

    pub fn to_point(&self) -> Result<GrassmannPoint> {
        GrassmannPoint::new(&self.modes)
    }
}

/// Eigenvalues of `C = S^T S / N_T`, descending, clamped at zero.
pub fn correlation_spectrum(ens: &SnapshotEnsemble) -> Vec<f64> {
    correlation_eigen(ens).0
}

fn correlation_eigen(ens: &SnapshotEnsemble) -> (Vec<f64>, DMatrix<f64>) {
    let s = &ens.snapshots;
    let c = (s.transpose() * s) / ens.len() as f64;
    let (values, vectors) = linalg::symmetric_eigen(&c);
    (values.into_iter().map(|mu| mu.max(0.0)).collect(), vectors)
}

/// Number of eigenvalues above the numerical-rank floor.
pub fn numerical_rank(spectrum: &[f64]) -> usize {
    let largest = spectrum.first().copied().unwrap_or(0.0);
    if largest <= 0.0 {
        return 0;
    }
    spectrum
        .iter()
        .take_while(|&&mu| mu >= EIGEN_RANK_TOLERANCE * largest)
        .count()
}

/// Smallest `M` whose leading eigenvalues capture at least `1 - eps` of the
/// total energy.
pub fn modes_for_energy(spectrum: &[f64], eps: f64) -> usize {
    let total: f64 = spectrum.iter().sum();
    if total <= 0.0 {
        return 0;
    }
    let mut captured = 0.0;
    for (k, mu) in spectrum.iter().enumerate() {
        captured += mu;
        if captured >= (1.0 - eps) * total {
            return k + 1;
        }
    }
    spectrum.len()
}

/// Method of snapshots, truncated to `modes` modes.
///
/// Eigenvectors `w_k` of the temporal correlation matrix are mapped back
/// through the snapshots, `phi_k = S w_k / sqrt(N_T mu_k)`. A final
/// sign-preserving QR pass removes the orthogonality drift of the weaker
/// modes; each mode is then signed so its first significant entry is
/// positive.
pub fn snapshots_pod(ens: &SnapshotEnsemble, modes: usize) -> Result<PodBasis> {
    let (spectrum, vectors) = correlation_eigen(ens);
    let rank = numerical_rank(&spectrum);
    if modes == 0 || modes > rank {
        return Err(Error::RankTooLow {
            requested: modes,
            rank,
        });
    }
    let count = ens.len() as f64;
    let mut phi = &ens.snapshots * vectors.columns(0, modes);
    for (k, mut col) in phi.column_iter_mut().enumerate() {
        col /= (count * spectrum[k]).sqrt();
    }
    let mut phi = linalg::orthonormalize(&phi)?;
    for mut col in phi.column_iter_mut() {
        let scale = col.amax();
        if let Some(first) = col.iter().copied().find(|v| v.abs() > 1e-8 * scale) {
            if first < 0.0 {
                col.neg_mut();
            }
        }
    }
    Ok(PodBasis {
        modes: phi,
        eigenvalues: Some(spectrum[..modes].to_vec()),
        mean: ens.mean.clone(),
    })
}

fn relative_residual(reference: &SnapshotEnsemble, approx: &DMatrix<f64>) -> Result<f64> {
    let norm2 = reference.snapshots.norm_squared();
    if norm2 == 0.0 {
        return Err(Error::ZeroReference);
    }
    Ok((&reference.snapshots - approx).norm_squared() / norm2)
}

/// `|V - Phi Phi^T V|_F^2 / |V|_F^2` for the reference fluctuations `V`.
pub fn projection_error(basis: &PodBasis, reference: &SnapshotEnsemble) -> Result<f64> {
    if basis.n() != reference.n() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} rows", reference.n()),
            found: dims(basis.n(), basis.rank()),
        });
    }
    let phi = &basis.modes;
    let projected = phi * (phi.transpose() * &reference.snapshots);
    relative_residual(reference, &projected)
}

/// Temporal coefficients `a_m(t_i)`, one column per time.
#[derive(Clone, Debug)]
pub struct RomTrajectory {
    pub coefficients: DMatrix<f64>,
    pub times: Vec<f64>,
}

impl RomTrajectory {
    /// Exact projection `Phi^T V` of reference fluctuations.
    pub fn projected(basis: &PodBasis, reference: &SnapshotEnsemble) -> Self {
        Self {
            coefficients: basis.modes.transpose() * &reference.snapshots,
            times: reference.times.clone(),
        }
    }
}

/// `|V - Phi A|_F^2 / |V|_F^2` with `A` the simulated coefficients.
pub fn dynamic_error(
    basis: &PodBasis,
    trajectory: &RomTrajectory,
    reference: &SnapshotEnsemble,
) -> Result<f64> {
    let expected = (basis.rank(), reference.len());
    if basis.n() != reference.n() || trajectory.coefficients.shape() != expected {
        return Err(Error::DimensionMismatch {
            expected: format!(
                "{} rows, coefficients {}",
                reference.n(),
                dims(expected.0, expected.1)
            ),
            found: format!(
                "{} rows, coefficients {}",
                basis.n(),
                dims(
                    trajectory.coefficients.nrows(),
                    trajectory.coefficients.ncols()
                )
            ),
        });
    }
    let scale = reference.times.iter().fold(1.0_f64, |a, t| a.max(t.abs()));
    if trajectory.times.len() != reference.times.len()
        || trajectory
            .times
            .iter()
            .zip(&reference.times)
            .any(|(a, b)| (a - b).abs() > 1e-12 * scale)
    {
        return Err(Error::TimeGridMismatch);
    }
    relative_residual(reference, &(&basis.modes * &trajectory.coefficients))
}
