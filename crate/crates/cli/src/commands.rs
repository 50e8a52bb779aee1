//! Command-line interface: argument definitions and subcommand handlers.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use grassmann_core::interp::interpolate;
use grassmann_core::pod::{dynamic_error, projection_error, snapshots_pod, split_mean};
use grassmann_core::testbed::{
    build_rom, read_snapshots, simulate_rom, solve_burgers, write_snapshots, BurgersProblem,
    SnapshotMetadata,
};
use rayon::prelude::*;

use crate::config::{ExperimentConfig, MethodChoice};
use crate::error::{AtStage, CliError, CliResult, Stage};
use crate::pipeline::{self, Artifacts};
use crate::report::{self, format_sci};
use crate::samples;

#[derive(Debug, Parser)]
#[command(
    name = "grassmann",
    version,
    about = "Subspace interpolation on the Grassmann manifold for POD/ROM experiments"
)]
pub struct Cli {
    /// Write failures to stderr as a JSON object.
    #[arg(long, global = true)]
    pub json_errors: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the HDM and store snapshots for a list of parameters.
    Generate(GenerateArgs),
    /// Compute truncated POD bases from snapshot files.
    Pod(PodArgs),
    /// Interpolate a basis at a target parameter from a sample directory.
    Interp(InterpArgs),
    /// Projection (and with a config, dynamic) error of a basis.
    Evaluate(EvaluateArgs),
    /// Run the full experiment and write report.json and report.csv.
    Pipeline(PipelineArgs),
    /// Merge reports into one table.
    Report(ReportArgs),
}

/// Overrides applied on top of a config file.
#[derive(Debug, Args, Default)]
pub struct Overrides {
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub target: Option<f64>,
    #[arg(long)]
    pub modes: Option<usize>,
    /// Worker threads for the HDM solves.
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

impl Overrides {
    fn apply(&self, mut cfg: ExperimentConfig) -> CliResult<ExperimentConfig> {
        if let Some(out) = &self.out {
            cfg.output = out.clone();
        }
        if let Some(t) = self.target {
            cfg.target = t;
        }
        if let Some(m) = self.modes {
            cfg.modes = m;
        }
        if let Some(w) = self.workers {
            cfg.workers = Some(w);
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        cfg.validated()
    }
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Parameters to solve for; defaults to the sampling of the config.
    #[arg(long = "lambda", value_delimiter = ',', allow_negative_numbers = true)]
    pub lambdas: Vec<f64>,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Args)]
pub struct PodArgs {
    /// Snapshot matrices (each with its JSON sidecar).
    #[arg(long = "snapshots", required = true, num_args = 1..)]
    pub snapshots: Vec<PathBuf>,
    #[arg(long)]
    pub modes: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    Neville,
    Amsallem,
    Standard,
    Reference,
}

impl From<MethodArg> for MethodChoice {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Neville => MethodChoice::Neville,
            MethodArg::Amsallem => MethodChoice::Amsallem,
            MethodArg::Standard => MethodChoice::Standard,
            MethodArg::Reference => MethodChoice::Reference,
        }
    }
}

#[derive(Debug, Args)]
pub struct InterpArgs {
    #[arg(long, value_enum)]
    pub method: MethodArg,
    #[arg(long, allow_negative_numbers = true)]
    pub target: f64,
    /// Directory of basis files with sidecars.
    #[arg(long)]
    pub samples: PathBuf,
    /// Output directory; the basis is written as `<method>.grsm`.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Tangent-space reference sample (amsallem only).
    #[arg(long)]
    pub reference_index: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Basis file or its sidecar.
    #[arg(long)]
    pub basis: PathBuf,
    /// Reference snapshot matrix.
    #[arg(long)]
    pub snapshots: PathBuf,
    /// Testbed config; enables the ROM and the dynamic error.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Parameter of the ROM; defaults to the one in the snapshot sidecar.
    #[arg(long, allow_negative_numbers = true)]
    pub target: Option<f64>,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Restrict the run to these methods.
    #[arg(long = "method", value_enum)]
    pub methods: Vec<MethodArg>,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Clone, Copy, ValueEnum, Default)]
pub enum TableFormat {
    #[default]
    Markdown,
    Csv,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// report.json files, one column each.
    #[arg(required = true)]
    pub reports: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    pub format: TableFormat,
    /// Also write table.csv and table.md into this directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Runs one parsed command, writing human-readable output to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> CliResult<()> {
    match &cli.command {
        Command::Generate(a) => generate(a, out),
        Command::Pod(a) => pod(a, out),
        Command::Interp(a) => interp(a, out),
        Command::Evaluate(a) => evaluate(a, out),
        Command::Pipeline(a) => run_pipeline(a, out),
        Command::Report(a) => merge(a, out),
    }
}

fn parameter_tag(lambda: f64) -> String {
    format!("lambda_{lambda}")
}

fn generate(args: &GenerateArgs, out: &mut dyn Write) -> CliResult<()> {
    let cfg = args
        .overrides
        .apply(ExperimentConfig::load(&args.config)?)?;
    let lambdas = if args.lambdas.is_empty() {
        cfg.sampling.clone()
    } else {
        args.lambdas.clone()
    };
    let dir = cfg.output.join("snapshots");
    let workers = cfg
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::config(format!("cannot start {workers} workers: {e}")))?;
    let written = pool.install(|| {
        lambdas
            .par_iter()
            .map(|&lambda| {
                let problem = BurgersProblem::new(cfg.burgers(), lambda).at(Stage::Config)?;
                let run = solve_burgers(&problem).at(Stage::Hdm)?;
                let path = dir.join(format!("{}.grsm", parameter_tag(lambda)));
                write_snapshots(&path, &run, &SnapshotMetadata::for_problem(&problem))
                    .at(Stage::Hdm)?;
                Ok(path)
            })
            .collect::<CliResult<Vec<_>>>()
    })?;
    for p in written {
        writeln!(out, "{}", p.display())?;
    }
    Ok(())
}

fn pod(args: &PodArgs, out: &mut dyn Write) -> CliResult<()> {
    if args.modes == 0 {
        return Err(CliError::config("modes must be at least 1"));
    }
    for path in &args.snapshots {
        let (run, meta) = read_snapshots(path).at(Stage::Pod)?;
        let ens = split_mean(&run.raw, &run.times).at(Stage::Pod)?;
        let basis = snapshots_pod(&ens, args.modes).at(Stage::Pod)?;
        let file = args
            .out
            .join(format!("pod_{}.grsm", parameter_tag(meta.lambda)));
        samples::write_basis(
            &file,
            meta.lambda,
            basis.modes(),
            Some(basis.mean()),
            basis.eigenvalues(),
            None,
        )
        .at(Stage::Pod)?;
        writeln!(out, "{}", file.display())?;
    }
    Ok(())
}

fn interp(args: &InterpArgs, out: &mut dyn Write) -> CliResult<()> {
    let method = MethodChoice::from(args.method);
    let Some(interpolator) = method.interpolator() else {
        return Err(CliError::config(
            "`reference` is computed from snapshots at the target; use `pod` or `pipeline`",
        ));
    };
    if !args.target.is_finite() {
        return Err(CliError::config("target must be finite"));
    }
    let stored = samples::read_sample_dir(&args.samples).at(Stage::Config)?;
    let set = samples::sample_set(&stored).at(Stage::Config)?;
    let result =
        interpolate(interpolator, &set, args.target, args.reference_index).at(Stage::Interp)?;
    let file = args.out.join(format!("{method}.grsm"));
    let mean = set.interpolate_mean(args.target);
    samples::write_basis(
        &file,
        args.target,
        result.point.representative(),
        mean.as_ref(),
        None,
        Some(method.as_str()),
    )
    .at(Stage::Report)?;
    writeln!(out, "{}", file.display())?;
    for d in &result.diagnostics {
        writeln!(out, "{d}")?;
    }
    Ok(())
}

fn evaluate(args: &EvaluateArgs, out: &mut dyn Write) -> CliResult<()> {
    let basis = samples::read_basis(&args.basis)
        .and_then(|b| b.to_pod())
        .at(Stage::Evaluate)?;
    let (run, meta) = read_snapshots(&args.snapshots).at(Stage::Evaluate)?;
    let reference = split_mean(&run.raw, &run.times).at(Stage::Evaluate)?;
    let projection = projection_error(&basis, &reference).at(Stage::Evaluate)?;
    let dynamic = match &args.config {
        Some(path) => {
            let cfg = ExperimentConfig::load(path)?;
            let lambda = args.target.unwrap_or(meta.lambda);
            let problem = BurgersProblem::new(cfg.burgers(), lambda).at(Stage::Config)?;
            let rom = build_rom(&basis, &problem).at(Stage::Rom)?;
            let a0 = basis.coefficients(problem.initial());
            let trajectory = simulate_rom(&rom, &a0, &problem.snapshot_times()).at(Stage::Rom)?;
            Some(dynamic_error(&basis, &trajectory, &reference).at(Stage::Evaluate)?)
        }
        None => None,
    };
    let summary = serde_json::json!({
        "projection_error": projection,
        "projection_error_formatted": format_sci(projection),
        "dynamic_error": dynamic,
        "dynamic_error_formatted": dynamic.map(format_sci),
    });
    writeln!(
        out,
        "{}",
        serde_json::to_string_pretty(&summary).expect("summary serializes")
    )?;
    Ok(())
}

fn run_pipeline(args: &PipelineArgs, out: &mut dyn Write) -> CliResult<()> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if !args.methods.is_empty() {
        let mut methods: Vec<MethodChoice> = args.methods.iter().map(|&m| m.into()).collect();
        methods.sort();
        methods.dedup();
        cfg.methods = methods;
    }
    let cfg = args.overrides.apply(cfg)?;
    let report = pipeline::run_pipeline(&cfg)?;
    let artifacts = Artifacts::in_dir(&cfg.output);
    write!(
        out,
        "{}",
        report::to_markdown(std::slice::from_ref(&report))
    )?;
    for m in report
        .methods
        .iter()
        .filter(|m| m.status == report::Status::Failed)
    {
        writeln!(
            out,
            "{} failed: {}",
            m.method,
            m.reason.as_deref().unwrap_or("unknown")
        )?;
    }
    for d in &report.diagnostics {
        writeln!(out, "{d}")?;
    }
    writeln!(out, "{}", artifacts.report_json.display())?;
    writeln!(out, "{}", artifacts.report_csv.display())?;
    Ok(())
}

fn merge(args: &ReportArgs, out: &mut dyn Write) -> CliResult<()> {
    let reports = pipeline::merge_reports(&args.reports)?;
    let csv = report::to_csv(&reports);
    let md = report::to_markdown(&reports);
    if let Some(dir) = &args.out {
        write_file(&dir.join("table.csv"), &csv)?;
        write_file(&dir.join("table.md"), &md)?;
    }
    match args.format {
        TableFormat::Markdown => write!(out, "{md}")?,
        TableFormat::Csv => write!(out, "{csv}")?,
    }
    Ok(())
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, text)?;
    Ok(())
}

/// Exit status for an error, with the error written to stderr.
pub fn report_error(err: &CliError, json: bool) -> i32 {
    if json {
        eprintln!("{}", err.to_json());
    } else {
        eprintln!("error: {err}");
    }
    err.exit_code()
}

/// Exit status for a command-line parse failure.
pub fn report_usage(err: &clap::Error, json: bool) -> i32 {
    use clap::error::ErrorKind;
    if matches!(
        err.kind(),
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
    ) {
        let _ = err.print();
        return 0;
    }
    if json {
        let value = serde_json::json!({
            "error": "usage",
            "stage": "config",
            "message": err.render().to_string().trim_end(),
            "exit_code": 1,
        });
        eprintln!("{value}");
    } else {
        let _ = err.print();
    }
    1
}
