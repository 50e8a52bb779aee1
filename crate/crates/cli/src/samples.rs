//! Basis files with JSON sidecars, and sample directories made of them.
//!
//! A basis `name.grsm` (or `name.csv`) is described by `name.json`:
//!
//! ```json
//! { "kind": "basis", "lambda": 110.0, "modes": 10,
//!   "basis": "name.grsm", "mean": "name.mean.grsm", "method": "neville" }
//! ```
//!
//! File names are relative to the sidecar. `mean`, `eigenvalues` and
//! `method` are optional. A sample directory is any directory holding such
//! sidecars; other JSON files in it are ignored.

use std::path::{Path, PathBuf};

use grassmann_core::interp::ParameterSampleSet;
use grassmann_core::io;
use grassmann_core::pod::PodBasis;
use grassmann_core::{Error, GrassmannPoint, Result};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

pub const BASIS_KIND: &str = "basis";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisSidecar {
    pub kind: String,
    pub lambda: f64,
    pub modes: usize,
    pub basis: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eigenvalues: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
}

/// A basis read back from disk.
#[derive(Clone, Debug)]
pub struct StoredBasis {
    pub lambda: f64,
    pub modes: DMatrix<f64>,
    pub mean: Option<DVector<f64>>,
    pub method: Option<String>,
}

impl StoredBasis {
    /// POD basis with the stored (or a zero) mean field.
    pub fn to_pod(&self) -> Result<PodBasis> {
        let mean = self
            .mean
            .clone()
            .unwrap_or_else(|| DVector::zeros(self.modes.nrows()));
        let point = GrassmannPoint::new(&self.modes)?;
        PodBasis::from_subspace(&point, mean)
    }
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .and_then(|n| n.to_str())
        .unwrap_or_default()
        .to_string()
}

/// Writes `path`, its mean and eigenvalues next to it, and the sidecar.
pub fn write_basis(
    path: &Path,
    lambda: f64,
    modes: &DMatrix<f64>,
    mean: Option<&DVector<f64>>,
    eigenvalues: Option<&[f64]>,
    method: Option<&str>,
) -> Result<PathBuf> {
    io::write_matrix(path, modes)?;
    let mean_file = match mean {
        Some(m) => {
            let p = path.with_extension(format!("mean.{}", extension(path)));
            io::write_vector(&p, m.as_slice())?;
            Some(file_name(&p))
        }
        None => None,
    };
    let eig_file = match eigenvalues {
        Some(e) => {
            let p = path.with_extension("eigenvalues.csv");
            io::write_spectrum(&p, e)?;
            Some(file_name(&p))
        }
        None => None,
    };
    let sidecar = BasisSidecar {
        kind: BASIS_KIND.into(),
        lambda,
        modes: modes.ncols(),
        basis: file_name(path),
        mean: mean_file,
        eigenvalues: eig_file,
        method: method.map(str::to_string),
    };
    let sidecar_path = path.with_extension("json");
    io::write_json(&sidecar_path, &sidecar)?;
    Ok(sidecar_path)
}

fn extension(path: &Path) -> &str {
    path.extension().and_then(|e| e.to_str()).unwrap_or("grsm")
}

/// Reads a basis from its sidecar or from the matrix file next to it.
pub fn read_basis(path: &Path) -> Result<StoredBasis> {
    let sidecar_path = if extension(path) == "json" {
        path.to_path_buf()
    } else {
        path.with_extension("json")
    };
    let sidecar: BasisSidecar = io::read_json(&sidecar_path)?;
    if sidecar.kind != BASIS_KIND {
        return Err(Error::Format(format!(
            "{} describes a `{}`, not a basis",
            sidecar_path.display(),
            sidecar.kind
        )));
    }
    let dir = sidecar_path.parent().unwrap_or(Path::new("."));
    let modes = io::read_matrix(&dir.join(&sidecar.basis))?;
    let mean = match &sidecar.mean {
        Some(m) => Some(DVector::from_vec(io::read_vector(&dir.join(m))?)),
        None => None,
    };
    if let Some(m) = &mean {
        if m.len() != modes.nrows() {
            return Err(Error::DimensionMismatch {
                expected: format!("mean of length {}", modes.nrows()),
                found: format!("length {}", m.len()),
            });
        }
    }
    Ok(StoredBasis {
        lambda: sidecar.lambda,
        modes,
        mean,
        method: sidecar.method,
    })
}

/// All bases of a directory, ordered by parameter.
pub fn read_sample_dir(dir: &Path) -> Result<Vec<StoredBasis>> {
    let mut found = Vec::new();
    let mut entries: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| extension(p) == "json")
        .collect();
    entries.sort();
    for path in entries {
        let Ok(value) = io::read_json::<serde_json::Value>(&path) else {
            continue;
        };
        if value.get("kind").and_then(|k| k.as_str()) == Some(BASIS_KIND) {
            found.push(read_basis(&path)?);
        }
    }
    if found.is_empty() {
        return Err(Error::EmptySampleSet);
    }
    found.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    Ok(found)
}

/// Sample set with raw bases (as stored) and mean fields when every sample
/// carries one.
pub fn sample_set(bases: &[StoredBasis]) -> Result<ParameterSampleSet> {
    let points = bases
        .iter()
        .map(|b| GrassmannPoint::new(&b.modes))
        .collect::<Result<Vec<_>>>()?;
    let params = bases.iter().map(|b| b.lambda).collect();
    let mut set = ParameterSampleSet::new(params, points)?
        .with_raw_bases(bases.iter().map(|b| b.modes.clone()).collect())?;
    if bases.iter().all(|b| b.mean.is_some()) {
        set = set.with_mean_fields(bases.iter().map(|b| b.mean.clone().unwrap()).collect())?;
    }
    Ok(set)
}
