//! Desk-scale parametric problems: analytic subspace families with known
//! ground truth, a periodic viscous Burgers HDM and its Galerkin ROM.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::io;

mod burgers;
mod family;
mod rom;

pub use burgers::{
    central_difference, laplacian, solve_burgers, BurgersConfig, BurgersProblem, HdmRun,
    InitialCondition, CFL_SAFETY,
};
pub use family::{AnalyticFamily, FamilyKind};
pub use rom::{build_rom, simulate_rom, RomSystem, STEP_SAFETY};

/// Sidecar metadata written next to every snapshot matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotMetadata {
    pub lambda: f64,
    pub nu: f64,
    pub grid: usize,
    pub dt: f64,
    #[serde(rename = "T")]
    pub final_time: f64,
    #[serde(rename = "N_T")]
    pub snapshot_count: usize,
    pub seed: u64,
    pub kind: String,
}

impl SnapshotMetadata {
    pub fn for_problem(problem: &BurgersProblem) -> Self {
        let cfg = problem.config();
        Self {
            lambda: problem.lambda(),
            nu: problem.nu(),
            grid: cfg.grid,
            dt: problem.dt(),
            final_time: cfg.final_time,
            snapshot_count: cfg.snapshots,
            seed: cfg.seed,
            kind: "burgers".into(),
        }
    }
}

/// Path of the JSON sidecar for a matrix file: `snap.grsm` -> `snap.json`.
pub fn sidecar_path(matrix: &Path) -> PathBuf {
    matrix.with_extension("json")
}

/// Writes the raw snapshot matrix at `path` (format chosen by extension),
/// its time grid as `<stem>.times.csv` and the metadata sidecar.
pub fn write_snapshots(path: &Path, run: &HdmRun, meta: &SnapshotMetadata) -> Result<()> {
    io::write_matrix(path, &run.raw)?;
    io::write_vector(&times_path(path), &run.times)?;
    io::write_json(&sidecar_path(path), meta)
}

pub fn read_snapshots(path: &Path) -> Result<(HdmRun, SnapshotMetadata)> {
    let raw = io::read_matrix(path)?;
    let times = io::read_vector(&times_path(path))?;
    let meta = io::read_json(&sidecar_path(path))?;
    Ok((HdmRun { raw, times }, meta))
}

fn times_path(matrix: &Path) -> PathBuf {
    let stem = matrix
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("snapshots");
    matrix.with_file_name(format!("{stem}.times.csv"))
}
