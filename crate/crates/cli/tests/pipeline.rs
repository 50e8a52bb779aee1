mod common;

use common::small_case;
use grassmann_cli::report::{format_sci, Status};
use grassmann_cli::{run_pipeline, ErrorReport, MethodChoice};
use grassmann_core::pod::{correlation_spectrum, split_mean};
use grassmann_core::testbed::{solve_burgers, BurgersProblem};

fn value(report: &ErrorReport, method: MethodChoice) -> (f64, f64) {
    let m = report.method(method).expect("method present");
    assert_eq!(m.status, Status::Ok, "{method}: {:?}", m.reason);
    (m.projection_error.unwrap(), m.dynamic_error.unwrap())
}

#[test]
fn full_run_reports_every_method_and_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let report = run_pipeline(&small_case(dir.path(), "")).unwrap();
    assert_eq!(report.methods.len(), 4);
    for m in &report.methods {
        let (p, d) = value(&report, m.method);
        assert!(p >= 0.0 && d >= p - 1e-12, "{}: p = {p}, d = {d}", m.method);
        assert!(dir.path().join(m.basis.as_ref().unwrap()).exists());
    }
    let run = report.run.as_ref().unwrap();
    for key in ["hdm", "pod", "total", "interp.neville", "rom.standard"] {
        assert!(run.timings.contains_key(key), "missing timing {key}");
    }
    assert_eq!(run.hdm_solved, 7);
    assert!(dir.path().join("report.json").exists());
    assert!(dir.path().join("report.csv").exists());
}

#[test]
fn csv_cells_are_the_formatted_json_values() {
    let dir = tempfile::tempdir().unwrap();
    run_pipeline(&small_case(dir.path(), "")).unwrap();
    let json: ErrorReport =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap())
            .unwrap();
    let csv = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("metric,method,small"));
    let mut rows = 0;
    for line in lines {
        let cells: Vec<&str> = line.split(',').collect();
        let method: MethodChoice = cells[1].parse().unwrap();
        let m = json.method(method).unwrap();
        let v = match cells[0] {
            "projection_error" => m.projection_error,
            "dynamic_error" => m.dynamic_error,
            other => panic!("unexpected metric {other}"),
        };
        assert_eq!(cells[2], format_sci(v.unwrap()));
        rows += 1;
    }
    assert_eq!(rows, 8);
}

#[test]
fn target_in_the_sampling_reproduces_the_reference_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_case(dir.path(), "");
    cfg.sampling = vec![100.0, 110.0, 130.0, 170.0];
    cfg.methods = MethodChoice::ALL.to_vec();
    let report = run_pipeline(&cfg).unwrap();
    let (reference, _) = value(&report, MethodChoice::Reference);
    for method in [
        MethodChoice::Neville,
        MethodChoice::Amsallem,
        MethodChoice::Standard,
    ] {
        let (p, _) = value(&report, method);
        assert!(
            (p - reference).abs() <= 1e-8,
            "{method}: {p} vs {reference}"
        );
    }
    // the target snapshots are reused, not solved twice
    assert_eq!(report.run.unwrap().hdm_solved, 4);
}

#[test]
fn reference_only_error_is_the_eigenvalue_tail() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_case(dir.path(), "methods = (reference)");
    let report = run_pipeline(&cfg).unwrap();
    assert_eq!(report.methods.len(), 1);
    let (p, _) = value(&report, MethodChoice::Reference);

    let problem = BurgersProblem::new(cfg.burgers(), cfg.target).unwrap();
    let run = solve_burgers(&problem).unwrap();
    let spectrum = correlation_spectrum(&split_mean(&run.raw, &run.times).unwrap());
    let total: f64 = spectrum.iter().sum();
    let tail: f64 = spectrum[cfg.modes..].iter().sum();
    assert!((p - tail / total).abs() <= 1e-10, "{p} vs {}", tail / total);
}

#[test]
fn without_reference_errors_are_unavailable() {
    let dir = tempfile::tempdir().unwrap();
    let report = run_pipeline(&small_case(dir.path(), "methods = (neville, standard)")).unwrap();
    assert!(report.methods.iter().all(|m| m.projection_error.is_none()));
    assert!(!report.diagnostics.is_empty());
    assert_eq!(report.run.unwrap().hdm_solved, 6);
    let csv = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
    assert!(csv.contains("projection_error,neville,n/a"));
}

#[test]
fn identical_configs_give_identical_reports() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ra = run_pipeline(&small_case(a.path(), "workers = 1")).unwrap();
    let rb = run_pipeline(&small_case(b.path(), "workers = 3")).unwrap();
    assert_eq!(ra.deterministic_json(), rb.deterministic_json());
    assert_eq!(
        std::fs::read(a.path().join("report.csv")).unwrap(),
        std::fs::read(b.path().join("report.csv")).unwrap()
    );
}

#[test]
fn seed_changes_the_experiment() {
    let a = tempfile::tempdir().unwrap();
    let ra = run_pipeline(&small_case(a.path(), "seed = 1")).unwrap();
    let rb = run_pipeline(&small_case(a.path(), "seed = 2")).unwrap();
    assert_ne!(ra.config_hash, rb.config_hash);
    assert_ne!(
        value(&ra, MethodChoice::Neville),
        value(&rb, MethodChoice::Neville)
    );
}

#[test]
fn warm_cache_skips_the_solves_and_reproduces_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_case(dir.path(), "grid = 256\nsnapshots = 100\nfinal_time = 1.0");
    let cold = run_pipeline(&cfg).unwrap();
    let warm = run_pipeline(&cfg).unwrap();
    assert_eq!(cold.deterministic_json(), warm.deterministic_json());
    let info = warm.run.as_ref().unwrap();
    assert_eq!((info.hdm_solved, info.hdm_cached), (0, 7));
    assert_eq!(info.pod_computed, 0);
    let (c, w) = (cold.timing("hdm").unwrap(), warm.timing("hdm").unwrap());
    assert!(w < 0.01 * c, "warm hdm stage {w} s vs cold {c} s");
}

#[test]
fn constant_snapshots_fail_as_a_numerical_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_case(dir.path(), "amplitude = 0.0");
    cfg.methods = vec![MethodChoice::Reference];
    let err = run_pipeline(&cfg).unwrap_err();
    assert_eq!(err.exit_code(), 2, "{err}");
}
