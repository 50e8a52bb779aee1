use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Safety factor applied to both the advective and the diffusive limit.
pub const CFL_SAFETY: f64 = 0.25;

/// Growth of `max |u|` beyond this multiple of its initial value aborts a run.
const BLOWUP_FACTOR: f64 = 10.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialCondition {
    Zero,
    /// `offset + amplitude sin(2 pi k x / L)`.
    Sine {
        offset: f64,
        amplitude: f64,
        wavenumber: u32,
    },
    /// `offset` plus a seeded Fourier series over wavenumbers `1..=modes`
    /// with `1/k` amplitude decay, rescaled to peak `amplitude`.
    RandomFourier {
        offset: f64,
        amplitude: f64,
        modes: u32,
    },
}

impl InitialCondition {
    fn sample(&self, grid: usize, length: f64, seed: u64) -> DVector<f64> {
        let x = |i: usize| i as f64 * length / grid as f64;
        match *self {
            InitialCondition::Zero => DVector::zeros(grid),
            InitialCondition::Sine {
                offset,
                amplitude,
                wavenumber,
            } => DVector::from_fn(grid, |i, _| {
                offset + amplitude * (2.0 * PI * wavenumber as f64 * x(i) / length).sin()
            }),
            InitialCondition::RandomFourier {
                offset,
                amplitude,
                modes,
            } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let coeffs: Vec<(f64, f64)> = (0..modes)
                    .map(|_| {
                        (
                            StandardNormal.sample(&mut rng),
                            StandardNormal.sample(&mut rng),
                        )
                    })
                    .collect();
                let shape = DVector::from_fn(grid, |i, _| {
                    coeffs
                        .iter()
                        .enumerate()
                        .map(|(k, (a, b))| {
                            let k = (k + 1) as f64;
                            let phase = 2.0 * PI * k * x(i) / length;
                            (a * phase.cos() + b * phase.sin()) / k
                        })
                        .sum::<f64>()
                });
                let peak = shape.amax();
                let scale = if peak > 0.0 { amplitude / peak } else { 0.0 };
                shape.map(|v| offset + scale * v)
            }
        }
    }
}

/// Physical and numerical settings shared by every parameter value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BurgersConfig {
    /// Number of grid cells.
    pub grid: usize,
    /// Domain length (m).
    pub length: f64,
    /// Final time (s).
    pub final_time: f64,
    /// Number of regularly spaced snapshots, `t = 0` and `t = T` included.
    pub snapshots: usize,
    pub initial: InitialCondition,
    /// Time step (s); the largest stable step is used when absent.
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default)]
    pub seed: u64,
}

impl Default for BurgersConfig {
    fn default() -> Self {
        Self {
            grid: 512,
            length: 1.0,
            final_time: 1.0,
            snapshots: 200,
            initial: InitialCondition::Sine {
                offset: 1.0,
                amplitude: 0.5,
                wavenumber: 1,
            },
            dt: None,
            seed: 0,
        }
    }
}

/// Viscous Burgers problem `u_t + (u^2/2)_x = nu u_xx` on a periodic domain
/// with `nu = 1 / lambda`.
#[derive(Clone, Debug)]
pub struct BurgersProblem {
    config: BurgersConfig,
    lambda: f64,
    nu: f64,
    dt: f64,
    steps_per_snapshot: usize,
    initial: DVector<f64>,
}

impl BurgersProblem {
    pub fn new(config: &BurgersConfig, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidProblem(format!(
                "lambda must be positive, got {lambda}"
            )));
        }
        if config.grid < 3 {
            return Err(Error::InvalidProblem("grid needs at least 3 cells".into()));
        }
        if config.snapshots < 2 {
            return Err(Error::TooFewSnapshots(config.snapshots));
        }
        if !(config.length > 0.0 && config.final_time > 0.0) {
            return Err(Error::InvalidProblem(
                "length and final time must be positive".into(),
            ));
        }
        let nu = 1.0 / lambda;
        let initial = config
            .initial
            .sample(config.grid, config.length, config.seed);
        let dx = config.length / config.grid as f64;
        let u_max = initial.amax();
        let mut limit = dx * dx / (2.0 * nu);
        if u_max > 0.0 {
            limit = limit.min(dx / u_max);
        }
        let max_dt = CFL_SAFETY * limit;
        let requested = match config.dt {
            Some(dt) if !(dt > 0.0) => {
                return Err(Error::InvalidProblem(format!(
                    "dt must be positive, got {dt}"
                )))
            }
            Some(dt) if dt > max_dt => {
                return Err(Error::InvalidProblem(format!(
                    "dt = {dt:.3e} violates the stability bound {max_dt:.3e}"
                )))
            }
            Some(dt) => dt,
            None => max_dt,
        };
        let interval = config.final_time / (config.snapshots - 1) as f64;
        let steps_per_snapshot = (interval / requested).ceil().max(1.0) as usize;
        Ok(Self {
            config: config.clone(),
            lambda,
            nu,
            dt: interval / steps_per_snapshot as f64,
            steps_per_snapshot,
            initial,
        })
    }

    pub fn config(&self) -> &BurgersConfig {
        &self.config
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// Time step actually used (divides the snapshot interval).
    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn dx(&self) -> f64 {
        self.config.length / self.config.grid as f64
    }

    pub fn grid(&self) -> usize {
        self.config.grid
    }

    pub fn initial(&self) -> &DVector<f64> {
        &self.initial
    }

    /// Node coordinates `x_i = i dx`.
    pub fn nodes(&self) -> Vec<f64> {
        (0..self.grid()).map(|i| i as f64 * self.dx()).collect()
    }

    pub fn snapshot_times(&self) -> Vec<f64> {
        let count = self.config.snapshots;
        let interval = self.config.final_time / (count - 1) as f64;
        (0..count).map(|k| k as f64 * interval).collect()
    }

    /// Semi-discrete right-hand side `-D1(u^2 / 2) + nu D2 u`.
    pub fn rhs(&self, u: &[f64], out: &mut [f64]) {
        burgers_rhs(u, self.nu, self.dx(), out);
    }
}

/// Periodic central difference `(v_{i+1} - v_{i-1}) / (2 dx)`.
pub fn central_difference(v: &[f64], dx: f64) -> Vec<f64> {
    let n = v.len();
    (0..n)
        .map(|i| (v[(i + 1) % n] - v[(i + n - 1) % n]) / (2.0 * dx))
        .collect()
}

/// Periodic three-point Laplacian.
pub fn laplacian(v: &[f64], dx: f64) -> Vec<f64> {
    let n = v.len();
    (0..n)
        .map(|i| (v[(i + 1) % n] - 2.0 * v[i] + v[(i + n - 1) % n]) / (dx * dx))
        .collect()
}

fn burgers_rhs(u: &[f64], nu: f64, dx: f64, out: &mut [f64]) {
    let n = u.len();
    let flux = |i: usize| 0.5 * u[i] * u[i];
    let inv_2dx = 0.5 / dx;
    let inv_dx2 = 1.0 / (dx * dx);
    for i in 0..n {
        let r = if i + 1 == n { 0 } else { i + 1 };
        let l = if i == 0 { n - 1 } else { i - 1 };
        out[i] = -(flux(r) - flux(l)) * inv_2dx + nu * (u[r] - 2.0 * u[i] + u[l]) * inv_dx2;
    }
}

/// Snapshots of one HDM run, one column per snapshot time.
#[derive(Clone, Debug)]
pub struct HdmRun {
    pub raw: DMatrix<f64>,
    pub times: Vec<f64>,
}

/// Integrates the problem with classical RK4 and records the snapshots.
pub fn solve_burgers(problem: &BurgersProblem) -> Result<HdmRun> {
    let n = problem.grid();
    let times = problem.snapshot_times();
    let mut raw = DMatrix::zeros(n, times.len());
    let mut u: Vec<f64> = problem.initial.iter().copied().collect();
    let bound = BLOWUP_FACTOR * problem.initial.amax();
    let dt = problem.dt;

    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut stage = vec![0.0; n];

    raw.set_column(0, &DVector::from_column_slice(&u));
    for (snap, &t) in times.iter().enumerate().skip(1) {
        for _ in 0..problem.steps_per_snapshot {
            problem.rhs(&u, &mut k1);
            for i in 0..n {
                stage[i] = u[i] + 0.5 * dt * k1[i];
            }
            problem.rhs(&stage, &mut k2);
            for i in 0..n {
                stage[i] = u[i] + 0.5 * dt * k2[i];
            }
            problem.rhs(&stage, &mut k3);
            for i in 0..n {
                stage[i] = u[i] + dt * k3[i];
            }
            problem.rhs(&stage, &mut k4);
            for i in 0..n {
                u[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
        let max_abs = u.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        if !max_abs.is_finite() || max_abs > bound {
            return Err(Error::UnstableRun { time: t, max_abs });
        }
        raw.set_column(snap, &DVector::from_column_slice(&u));
    }
    Ok(HdmRun { raw, times })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(grid: usize, initial: InitialCondition, final_time: f64) -> BurgersConfig {
        BurgersConfig {
            grid,
            length: 1.0,
            final_time,
            snapshots: 11,
            initial,
            dt: None,
            seed: 0,
        }
    }

    fn sine() -> InitialCondition {
        InitialCondition::Sine {
            offset: 0.0,
            amplitude: 1.0,
            wavenumber: 1,
        }
    }

    #[test]
    fn stability_bound_is_enforced() {
        let mut cfg = config(64, sine(), 0.1);
        let p = BurgersProblem::new(&cfg, 100.0).unwrap();
        let dx: f64 = 1.0 / 64.0;
        let bound = 0.25 * (dx / 1.0).min(dx * dx / (2.0 * 0.01));
        assert!(p.dt() <= bound * (1.0 + 1e-12));
        cfg.dt = Some(2.0 * bound);
        assert!(matches!(
            BurgersProblem::new(&cfg, 100.0),
            Err(Error::InvalidProblem(_))
        ));
        cfg.dt = Some(0.5 * bound);
        assert!(BurgersProblem::new(&cfg, 100.0).unwrap().dt() <= 0.5 * bound * (1.0 + 1e-12));
        assert!(BurgersProblem::new(&cfg, -1.0).is_err());
    }

    #[test]
    fn viscous_run_loses_energy_monotonically() {
        let p = BurgersProblem::new(&config(64, sine(), 0.5), 2.0).unwrap();
        let run = solve_burgers(&p).unwrap();
        let norms: Vec<f64> = run.raw.column_iter().map(|c| c.norm()).collect();
        assert!(norms.windows(2).all(|w| w[1] <= w[0]), "{norms:?}");
        assert!(norms[10] < 0.5 * norms[0]);
    }

    #[test]
    fn zero_initial_condition_stays_zero() {
        let p = BurgersProblem::new(&config(32, InitialCondition::Zero, 0.1), 50.0).unwrap();
        let run = solve_burgers(&p).unwrap();
        assert_eq!(run.raw.amax(), 0.0);
    }

    #[test]
    fn momentum_is_conserved() {
        let cfg = BurgersConfig {
            initial: InitialCondition::RandomFourier {
                offset: 0.3,
                amplitude: 0.8,
                modes: 5,
            },
            seed: 11,
            ..config(128, sine(), 0.2)
        };
        let p = BurgersProblem::new(&cfg, 200.0).unwrap();
        let mut u: Vec<f64> = p.initial().iter().copied().collect();
        let mut du = vec![0.0; u.len()];
        let m0: f64 = u.iter().sum::<f64>() * p.dx();
        // single explicit Euler steps isolate the per-step flux balance
        for _ in 0..50 {
            p.rhs(&u, &mut du);
            for (ui, di) in u.iter_mut().zip(&du) {
                *ui += p.dt() * di;
            }
            let m: f64 = u.iter().sum::<f64>() * p.dx();
            assert!((m - m0).abs() <= 1e-10);
        }
        let run = solve_burgers(&p).unwrap();
        for col in run.raw.column_iter() {
            assert!((col.sum() * p.dx() - m0).abs() <= 1e-10 * 50.0);
        }
    }

    #[test]
    fn random_initial_condition_is_seeded() {
        let ic = InitialCondition::RandomFourier {
            offset: 0.0,
            amplitude: 1.0,
            modes: 4,
        };
        let a = ic.sample(64, 1.0, 5);
        let b = ic.sample(64, 1.0, 5);
        let c = ic.sample(64, 1.0, 6);
        assert_eq!(a, b);
        assert!((a - c).amax() > 1e-3);
    }

    #[test]
    fn second_order_in_space() {
        // coarse node i coincides with fine node 2i
        let err = |grid: usize| {
            let coarse = BurgersProblem::new(&config(grid, sine(), 0.1), 20.0).unwrap();
            let fine = BurgersProblem::new(&config(2 * grid, sine(), 0.1), 20.0).unwrap();
            let a = solve_burgers(&coarse).unwrap();
            let b = solve_burgers(&fine).unwrap();
            let last = a.times.len() - 1;
            (0..grid)
                .map(|i| (a.raw[(i, last)] - b.raw[(2 * i, last)]).abs())
                .fold(0.0, f64::max)
        };
        let e1 = err(32);
        let e2 = err(64);
        let order = (e1 / e2).log2();
        assert!(order > 1.8 && order < 2.2, "observed order {order}");
    }
}
