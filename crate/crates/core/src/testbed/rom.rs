use nalgebra::{DMatrix, DVector};

use super::burgers::{central_difference, laplacian, BurgersProblem};
use crate::error::{Error, Result};
use crate::pod::{PodBasis, RomTrajectory};

/// Reduced dynamics `da/dt = c + L a + [a^T Q_m a]_m`.
#[derive(Clone, Debug)]
pub struct RomSystem {
    pub constant: DVector<f64>,
    pub linear: DMatrix<f64>,
    /// `quadratic[m][(j, k)] = Q_{mjk}`.
    pub quadratic: Vec<DMatrix<f64>>,
    basis: PodBasis,
}

impl RomSystem {
    pub fn new(
        constant: DVector<f64>,
        linear: DMatrix<f64>,
        quadratic: Vec<DMatrix<f64>>,
        basis: PodBasis,
    ) -> Result<Self> {
        let m = basis.rank();
        let ok = constant.len() == m
            && linear.shape() == (m, m)
            && quadratic.len() == m
            && quadratic.iter().all(|q| q.shape() == (m, m));
        if !ok {
            return Err(Error::DimensionMismatch {
                expected: format!("operators for {m} modes"),
                found: format!(
                    "constant {}, linear {}x{}, {} quadratic slices",
                    constant.len(),
                    linear.nrows(),
                    linear.ncols(),
                    quadratic.len()
                ),
            });
        }
        Ok(Self {
            constant,
            linear,
            quadratic,
            basis,
        })
    }

    pub fn basis(&self) -> &PodBasis {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.constant.len()
    }

    /// Same system with the quadratic term dropped (heat-equation limit).
    pub fn without_quadratic(mut self) -> Self {
        for q in &mut self.quadratic {
            q.fill(0.0);
        }
        self
    }

    pub fn rhs(&self, a: &DVector<f64>) -> DVector<f64> {
        let mut out = &self.constant + &self.linear * a;
        for (m, q) in self.quadratic.iter().enumerate() {
            out[m] += a.dot(&(q * a));
        }
        out
    }

    /// Frobenius norm of the Jacobian at `a`, an upper bound on its spectral
    /// radius.
    fn jacobian_bound(&self, a: &DVector<f64>) -> f64 {
        let mut jac = self.linear.clone();
        for (m, q) in self.quadratic.iter().enumerate() {
            let row = (q + q.transpose()) * a;
            for j in 0..self.rank() {
                jac[(m, j)] += row[j];
            }
        }
        jac.norm()
    }
}

fn columns_as_vecs(modes: &DMatrix<f64>) -> Vec<Vec<f64>> {
    modes
        .column_iter()
        .map(|c| c.iter().copied().collect())
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Galerkin projection of the semi-discrete Burgers operator onto
/// `u = mean + Phi a`.
///
/// With `F(u) = -D1(u^2 / 2) + nu D2 u` on the grid:
///
/// ```text
/// c_m    = <phi_m, -D1(mean^2 / 2) + nu D2 mean>
/// L_mj   = <phi_m, -D1(mean phi_j) + nu D2 phi_j>
/// Q_mjk  = <phi_m, -D1(phi_j phi_k) / 2>
/// ```
///
/// so the ROM is the exact projection of the HDM right-hand side.
pub fn build_rom(basis: &PodBasis, problem: &BurgersProblem) -> Result<RomSystem> {
    let n = problem.grid();
    if basis.n() != n {
        return Err(Error::DimensionMismatch {
            expected: format!("basis with {n} rows"),
            found: format!("{} rows", basis.n()),
        });
    }
    let dx = problem.dx();
    let nu = problem.nu();
    let rank = basis.rank();
    let phi = columns_as_vecs(basis.modes());
    let mean: Vec<f64> = basis.mean().iter().copied().collect();

    let mean_sq: Vec<f64> = mean.iter().map(|v| 0.5 * v * v).collect();
    let conv = central_difference(&mean_sq, dx);
    let diff = laplacian(&mean, dx);
    let forcing: Vec<f64> = conv.iter().zip(&diff).map(|(c, d)| -c + nu * d).collect();
    let constant = DVector::from_fn(rank, |m, _| dot(&phi[m], &forcing));

    let mut linear = DMatrix::zeros(rank, rank);
    for j in 0..rank {
        let product: Vec<f64> = mean.iter().zip(&phi[j]).map(|(a, b)| a * b).collect();
        let conv = central_difference(&product, dx);
        let diff = laplacian(&phi[j], dx);
        let image: Vec<f64> = conv.iter().zip(&diff).map(|(c, d)| -c + nu * d).collect();
        for m in 0..rank {
            linear[(m, j)] = dot(&phi[m], &image);
        }
    }

    let mut quadratic = vec![DMatrix::zeros(rank, rank); rank];
    for j in 0..rank {
        for k in j..rank {
            let product: Vec<f64> = phi[j].iter().zip(&phi[k]).map(|(a, b)| a * b).collect();
            let image = central_difference(&product, dx);
            for (m, q) in quadratic.iter_mut().enumerate() {
                let value = -0.5 * dot(&phi[m], &image);
                q[(j, k)] = value;
                q[(k, j)] = value;
            }
        }
    }

    RomSystem::new(constant, linear, quadratic, basis.clone())
}

/// Bound on `h |J|`; keeps the RK4 amplification error of the fastest mode
/// below `1e-6` relative over unit time.
pub const STEP_SAFETY: f64 = 0.1;

/// Integrates the ROM by classical RK4 from `a0` at `times[0]` and records
/// the state at every entry of `times`.
///
/// The step is the smallest gap between recording times, reduced to
/// `STEP_SAFETY / |J(a0)|_F` when the Jacobian at the initial state is
/// stiffer than that; each gap is split into equal sub-steps no longer than
/// this step.
pub fn simulate_rom(system: &RomSystem, a0: &DVector<f64>, times: &[f64]) -> Result<RomTrajectory> {
    if a0.len() != system.rank() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} coefficients", system.rank()),
            found: format!("{}", a0.len()),
        });
    }
    if times.is_empty() || times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidProblem(
            "ROM times must be strictly increasing".into(),
        ));
    }
    let mut step = times
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    let stiffness = system.jacobian_bound(a0);
    if stiffness * step > STEP_SAFETY {
        step = STEP_SAFETY / stiffness;
    }
    let a0_norm = a0.norm();
    // a zero initial state has no scale of its own
    let limit = 1e6 * if a0_norm > 0.0 { a0_norm } else { 1.0 };

    let mut coefficients = DMatrix::zeros(system.rank(), times.len());
    coefficients.set_column(0, a0);
    let mut a = a0.clone();
    for (k, w) in times.windows(2).enumerate() {
        let gap = w[1] - w[0];
        let substeps = if step.is_finite() {
            ((gap / step) * (1.0 - 1e-12)).ceil().max(1.0) as usize
        } else {
            1
        };
        let h = gap / substeps as f64;
        for _ in 0..substeps {
            let k1 = system.rhs(&a);
            let k2 = system.rhs(&(&a + &k1 * (0.5 * h)));
            let k3 = system.rhs(&(&a + &k2 * (0.5 * h)));
            let k4 = system.rhs(&(&a + &k3 * h));
            a += (k1 + (k2 + k3) * 2.0 + k4) * (h / 6.0);
        }
        let norm = a.norm();
        if !norm.is_finite() || norm > limit {
            return Err(Error::Divergence { time: w[1], norm });
        }
        coefficients.set_column(k + 1, &a);
    }
    Ok(RomTrajectory {
        coefficients,
        times: times.to_vec(),
    })
}
