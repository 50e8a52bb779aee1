use grassmann_core::manifold::make_point;
use grassmann_core::pod::{
    dynamic_error, projection_error, snapshots_pod, split_mean, PodBasis, RomTrajectory,
};
use grassmann_core::testbed::{
    build_rom, read_snapshots, simulate_rom, solve_burgers, write_snapshots, BurgersConfig,
    BurgersProblem, InitialCondition, SnapshotMetadata,
};
use nalgebra::{DMatrix, DVector};
use std::f64::consts::PI;

fn transient_config() -> BurgersConfig {
    BurgersConfig {
        initial: InitialCondition::RandomFourier {
            offset: 0.0,
            amplitude: 0.5,
            modes: 6,
        },
        ..BurgersConfig::default()
    }
}

#[test]
fn heat_limit_reproduces_modal_decay() {
    let cfg = BurgersConfig {
        grid: 64,
        initial: InitialCondition::Zero,
        ..BurgersConfig::default()
    };
    let problem = BurgersProblem::new(&cfg, 20.0).unwrap();
    let (n, dx, nu) = (problem.grid(), problem.dx(), problem.nu());
    let wavenumbers = [1.0, 2.0, 3.0, 5.0];
    let mut modes = DMatrix::zeros(n, 2 * wavenumbers.len());
    for (j, q) in wavenumbers.iter().enumerate() {
        let k = 2.0 * PI * q;
        for i in 0..n {
            let x = i as f64 * dx;
            modes[(i, 2 * j)] = (k * x).sin();
            modes[(i, 2 * j + 1)] = (k * x).cos();
        }
    }
    let basis = PodBasis::from_subspace(&make_point(&modes).unwrap(), DVector::zeros(n)).unwrap();
    let rom = build_rom(&basis, &problem).unwrap().without_quadratic();
    let a0 = DVector::from_fn(rom.rank(), |k, _| 1.0 - 0.1 * k as f64);
    let times: Vec<f64> = (0..=100).map(|k| k as f64 * 0.01).collect();
    let traj = simulate_rom(&rom, &a0, &times).unwrap();
    let mut worst = 0.0f64;
    for (j, q) in wavenumbers.iter().enumerate() {
        let k = 2.0 * PI * q;
        let rate = nu * (2.0 / dx * (0.5 * k * dx).sin()).powi(2);
        for (c, &t) in times.iter().enumerate() {
            for m in [2 * j, 2 * j + 1] {
                worst = worst.max((traj.coefficients[(m, c)] - a0[m] * (-rate * t).exp()).abs());
            }
        }
    }
    assert!(worst <= 1e-6, "max deviation {worst:e}");
}

#[test]
fn galerkin_rom_tracks_the_projected_hdm() {
    let cfg = transient_config();
    let problem = BurgersProblem::new(&cfg, 110.0).unwrap();
    let run = solve_burgers(&problem).unwrap();
    let ens = split_mean(&run.raw, &run.times).unwrap();
    let basis = snapshots_pod(&ens, 10).unwrap();
    let rom = build_rom(&basis, &problem).unwrap();
    let a0 = basis.coefficients(&run.raw.column(0).into_owned());
    let traj = simulate_rom(&rom, &a0, &run.times).unwrap();
    let exact = RomTrajectory::projected(&basis, &ens);
    let gap = (&traj.coefficients - &exact.coefficients).norm() / exact.coefficients.norm();
    assert!(gap <= 0.2, "relative coefficient discrepancy {gap}");

    let p = projection_error(&basis, &ens).unwrap();
    let d = dynamic_error(&basis, &traj, &ens).unwrap();
    assert!(d >= p - 1e-12);
    assert!(d <= 2.0 * p, "dynamic {d:e} vs projection {p:e}");
}

#[test]
fn solver_is_deterministic_and_persists() {
    let cfg = BurgersConfig {
        grid: 64,
        snapshots: 20,
        seed: 11,
        ..transient_config()
    };
    let problem = BurgersProblem::new(&cfg, 50.0).unwrap();
    let a = solve_burgers(&problem).unwrap();
    let b = solve_burgers(&BurgersProblem::new(&cfg, 50.0).unwrap()).unwrap();
    assert_eq!(a.raw, b.raw);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("snap.grsm");
    let meta = SnapshotMetadata::for_problem(&problem);
    write_snapshots(&path, &a, &meta).unwrap();
    let (back, meta_back) = read_snapshots(&path).unwrap();
    assert_eq!(back.raw, a.raw);
    assert_eq!(back.times, a.times);
    assert_eq!(meta_back, meta);
    let sidecar: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("snap.json")).unwrap())
            .unwrap();
    for key in ["lambda", "nu", "grid", "dt", "T", "N_T", "seed", "kind"] {
        assert!(sidecar.get(key).is_some(), "missing {key}");
    }
}
