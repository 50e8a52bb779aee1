//! End-to-end experiment: HDM snapshots, POD bases, interpolation at the
//! target parameter, Galerkin ROMs and the error report.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use grassmann_core::interp::{interpolate, ParameterSampleSet};
use grassmann_core::io;
use grassmann_core::pod::{
    dynamic_error, projection_error, snapshots_pod, split_mean, PodBasis, SnapshotEnsemble,
};
use grassmann_core::testbed::{
    build_rom, simulate_rom, solve_burgers, BurgersConfig, BurgersProblem, HdmRun, SnapshotMetadata,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::cache::{self, Cache};
use crate::config::{ExperimentConfig, MethodChoice};
use crate::error::{AtStage, CliError, CliResult, Stage};
use crate::report::{self, ErrorReport, MethodReport, RunInfo, Status};
use crate::samples;

/// Paths of the files written by [`run_pipeline`].
#[derive(Clone, Debug)]
pub struct Artifacts {
    pub report_json: PathBuf,
    pub report_csv: PathBuf,
    pub bases: PathBuf,
    pub cache: PathBuf,
}

impl Artifacts {
    pub fn in_dir(out: &Path) -> Self {
        Self {
            report_json: out.join("report.json"),
            report_csv: out.join("report.csv"),
            bases: out.join("bases"),
            cache: out.join("cache"),
        }
    }
}

/// Settings that determine the numbers in a report. Output location and
/// worker count are excluded.
#[derive(Serialize)]
struct ResultKey<'a> {
    case: &'a str,
    testbed: &'a BurgersConfig,
    sampling: &'a [f64],
    target: f64,
    modes: usize,
    methods: &'a [MethodChoice],
    reference_index: Option<usize>,
}

pub fn config_hash(cfg: &ExperimentConfig) -> String {
    cache::content_hash(&ResultKey {
        case: &cfg.case,
        testbed: cfg.burgers(),
        sampling: &cfg.sampling,
        target: cfg.target,
        modes: cfg.modes,
        methods: &cfg.methods,
        reference_index: cfg.reference_index,
    })
}

#[derive(Serialize)]
struct HdmKey<'a> {
    testbed: &'a BurgersConfig,
    lambda: f64,
}

#[derive(Serialize)]
struct PodKey<'a> {
    snapshots: &'a str,
    modes: usize,
}

struct Sample {
    lambda: f64,
    key: String,
    /// `None` when the snapshots are read back from the cache on demand.
    run: Option<HdmRun>,
}

impl Sample {
    fn ensemble(&self, cache: &Cache) -> CliResult<SnapshotEnsemble> {
        let loaded;
        let run = match &self.run {
            Some(run) => run,
            None => {
                loaded = cache.load_snapshots(&self.key).ok_or_else(|| {
                    CliError::Io(std::io::Error::other(format!(
                        "cached snapshots {} are unreadable",
                        cache.snapshot_path(&self.key).display()
                    )))
                })?;
                &loaded
            }
        };
        split_mean(&run.raw, &run.times).at(Stage::Pod)
    }
}

#[derive(Default)]
struct Timer {
    timings: BTreeMap<String, f64>,
}

impl Timer {
    fn time<T>(&mut self, key: impl Into<String>, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.timings
            .insert(key.into(), start.elapsed().as_secs_f64());
        out
    }
}

/// Runs the experiment described by `cfg`, writes `report.json`,
/// `report.csv` and the interpolated bases under `cfg.output`, and returns
/// the report.
///
/// Snapshot and POD artifacts are cached under `<output>/cache`, keyed by
/// the content hash of everything that determines them. The reference HDM
/// at the target is solved only when the `reference` method is requested;
/// without it errors are not available and the report says so.
pub fn run_pipeline(cfg: &ExperimentConfig) -> CliResult<ErrorReport> {
    let cfg = cfg.clone().validated()?;
    let artifacts = Artifacts::in_dir(&cfg.output);
    std::fs::create_dir_all(&cfg.output)?;
    let cache = Cache::new(&artifacts.cache);
    let workers = cfg
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::config(format!("cannot start {workers} workers: {e}")))?;

    let mut timer = Timer::default();
    let mut run = RunInfo {
        workers,
        ..RunInfo::default()
    };
    let started = Instant::now();

    let burgers = cfg.burgers();
    let target_problem = BurgersProblem::new(burgers, cfg.target).at(Stage::Config)?;
    let mut lambdas = cfg.sampling.clone();
    // slot of the target snapshots; a target inside the sampling reuses that sample
    let reference_slot = cfg.wants_reference().then(|| {
        lambdas
            .iter()
            .position(|&l| l == cfg.target)
            .unwrap_or_else(|| {
                lambdas.push(cfg.target);
                lambdas.len() - 1
            })
    });

    // (1) snapshots: solved in parallel, or left on disk when cached
    let solved: Vec<Sample> = timer.time("hdm", || {
        pool.install(|| {
            lambdas
                .par_iter()
                .map(|&lambda| {
                    let key = cache::key(
                        "hdm",
                        &HdmKey {
                            testbed: burgers,
                            lambda,
                        },
                    );
                    if cache.has_snapshots(&key) {
                        return Ok(Sample {
                            lambda,
                            key,
                            run: None,
                        });
                    }
                    let problem = BurgersProblem::new(burgers, lambda).at(Stage::Hdm)?;
                    let run = solve_burgers(&problem).at(Stage::Hdm)?;
                    cache
                        .store_snapshots(&key, &run, &SnapshotMetadata::for_problem(&problem))
                        .at(Stage::Hdm)?;
                    Ok(Sample {
                        lambda,
                        key,
                        run: Some(run),
                    })
                })
                .collect::<CliResult<Vec<_>>>()
        })
    })?;
    run.hdm_solved = solved.iter().filter(|s| s.run.is_some()).count();
    run.hdm_cached = solved.len() - run.hdm_solved;

    // (2) one POD basis per sample
    let bases: Vec<PodBasis> = timer
        .time("pod", || {
            solved
                .iter()
                .map(|s| {
                    let key = cache::key(
                        "pod",
                        &PodKey {
                            snapshots: &s.key,
                            modes: cfg.modes,
                        },
                    );
                    if let Some(b) = cache.load_pod(&key) {
                        return Ok((b, true));
                    }
                    let b = snapshots_pod(&s.ensemble(&cache)?, cfg.modes).at(Stage::Pod)?;
                    cache.store_pod(&key, s.lambda, &b).at(Stage::Pod)?;
                    Ok((b, false))
                })
                .collect::<CliResult<Vec<_>>>()
        })?
        .into_iter()
        .map(|(b, hit)| {
            if hit {
                run.pod_cached += 1;
            } else {
                run.pod_computed += 1;
            }
            b
        })
        .collect();

    let count = cfg.sampling.len();
    let sample_bases = &bases[..count];
    let reference_basis = reference_slot.map(|i| &bases[i]);
    let reference_ensemble = match reference_slot.map(|i| &solved[i]) {
        Some(s) => Some(timer.time("load", || s.ensemble(&cache))?),
        None => None,
    };
    let reference_ensemble = reference_ensemble.as_ref();

    let set = ParameterSampleSet::new(
        cfg.sampling.clone(),
        sample_bases
            .iter()
            .map(|b| b.to_point())
            .collect::<Result<_, _>>()
            .at(Stage::Interp)?,
    )
    .and_then(|s| s.with_raw_bases(sample_bases.iter().map(|b| b.modes().clone()).collect()))
    .and_then(|s| s.with_mean_fields(sample_bases.iter().map(|b| b.mean().clone()).collect()))
    .at(Stage::Interp)?;

    let mut diagnostics = Vec::new();
    if reference_ensemble.is_none() {
        diagnostics.push(
            "reference method not requested: no HDM solve at the target, errors unavailable".into(),
        );
    }

    // (3)-(4) interpolate, build and simulate the ROM for every method
    std::fs::create_dir_all(&artifacts.bases)?;
    let mut methods = Vec::new();
    for &method in &cfg.methods {
        let outcome = evaluate_method(
            method,
            &cfg,
            &set,
            reference_basis,
            reference_ensemble,
            &target_problem,
            &artifacts,
            &mut timer,
        );
        methods.push(outcome.unwrap_or_else(|e| MethodReport::failed(method, e.to_string())));
    }

    let mut report = ErrorReport {
        case: cfg.case.clone(),
        target: cfg.target,
        sampling: cfg.sampling.clone(),
        modes: cfg.modes,
        config_hash: config_hash(&cfg),
        methods,
        diagnostics,
        run: None,
    };

    // (5) emit
    let csv = report::to_csv(std::slice::from_ref(&report));
    timer
        .timings
        .insert("total".into(), started.elapsed().as_secs_f64());
    run.timings = timer.timings;
    report.run = Some(run);
    write_text(&artifacts.report_csv, &csv)?;
    write_text(&artifacts.report_json, &report.to_json())?;
    Ok(report)
}

#[allow(clippy::too_many_arguments)]
fn evaluate_method(
    method: MethodChoice,
    cfg: &ExperimentConfig,
    set: &ParameterSampleSet,
    reference_basis: Option<&PodBasis>,
    reference: Option<&SnapshotEnsemble>,
    problem: &BurgersProblem,
    artifacts: &Artifacts,
    timer: &mut Timer,
) -> CliResult<MethodReport> {
    let (basis, diagnostics) = timer.time(format!("interp.{method}"), || -> CliResult<_> {
        match method.interpolator() {
            None => {
                let b = reference_basis
                    .expect("reference solved when requested")
                    .clone();
                Ok((b, Vec::new()))
            }
            Some(interpolator) => {
                let result = interpolate(interpolator, set, cfg.target, cfg.reference_index)
                    .at(Stage::Interp)?;
                let mean = set
                    .interpolate_mean(cfg.target)
                    .expect("mean fields attached");
                let b = PodBasis::from_subspace(&result.point, mean).at(Stage::Interp)?;
                Ok((
                    b,
                    result.diagnostics.iter().map(|d| d.to_string()).collect(),
                ))
            }
        }
    })?;

    let file = artifacts.bases.join(format!("{method}.grsm"));
    samples::write_basis(
        &file,
        cfg.target,
        basis.modes(),
        Some(basis.mean()),
        basis.eigenvalues(),
        Some(method.as_str()),
    )
    .at(Stage::Report)?;

    let trajectory = timer.time(format!("rom.{method}"), || -> CliResult<_> {
        let rom = build_rom(&basis, problem).at(Stage::Rom)?;
        let a0 = basis.coefficients(problem.initial());
        simulate_rom(&rom, &a0, &problem.snapshot_times()).at(Stage::Rom)
    })?;

    let (projection, dynamic) = match reference {
        Some(ens) => (
            Some(projection_error(&basis, ens).at(Stage::Evaluate)?),
            Some(dynamic_error(&basis, &trajectory, ens).at(Stage::Evaluate)?),
        ),
        None => (None, None),
    };

    Ok(MethodReport {
        method,
        status: Status::Ok,
        reason: None,
        projection_error: projection,
        dynamic_error: dynamic,
        basis: Some(format!("bases/{method}.grsm")),
        diagnostics,
    })
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    // same temporary-plus-rename discipline as the matrix files
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, text)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Loads every report file and merges them into one table.
pub fn merge_reports(paths: &[PathBuf]) -> CliResult<Vec<ErrorReport>> {
    paths
        .iter()
        .map(|p| io::read_json::<ErrorReport>(p).at(Stage::Report))
        .collect()
}
