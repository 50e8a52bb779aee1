//! On-disk artifact cache keyed by content hash.
//!
//! Every entry is a set of files sharing a key prefix. Each file is written
//! atomically (temporary sibling plus rename) and the JSON sidecar is written
//! last, so an entry counts as present only once its sidecar exists.

use std::path::{Path, PathBuf};

use grassmann_core::io;
use grassmann_core::pod::PodBasis;
use grassmann_core::testbed::{read_snapshots, write_snapshots, HdmRun, SnapshotMetadata};
use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Bumped whenever the cached representation changes.
const CACHE_FORMAT: u32 = 1;

/// SHA-256 of the canonical JSON of `value`, hex encoded.
pub fn content_hash<T: Serialize>(value: &T) -> String {
    let json = serde_json::to_vec(value).expect("cache keys serialize");
    hex::encode(Sha256::digest(&json))
}

#[derive(Serialize)]
struct Keyed<'a, T: Serialize> {
    format: u32,
    kind: &'a str,
    value: &'a T,
}

/// Key for `value` within artifact family `kind`.
pub fn key<T: Serialize>(kind: &str, value: &T) -> String {
    content_hash(&Keyed {
        format: CACHE_FORMAT,
        kind,
        value,
    })
}

#[derive(Debug, Serialize, Deserialize)]
struct PodSidecar {
    kind: String,
    lambda: f64,
    modes: usize,
    eigenvalues: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct Cache {
    root: PathBuf,
}

impl Cache {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn snapshot_path(&self, key: &str) -> PathBuf {
        self.root.join("hdm").join(format!("{key}.grsm"))
    }

    fn pod_path(&self, key: &str) -> PathBuf {
        self.root.join("pod").join(format!("{key}.grsm"))
    }

    /// True once the entry is complete (its sidecar was written last).
    pub fn has_snapshots(&self, key: &str) -> bool {
        self.snapshot_path(key).with_extension("json").exists()
    }

    pub fn load_snapshots(&self, key: &str) -> Option<HdmRun> {
        if !self.has_snapshots(key) {
            return None;
        }
        read_snapshots(&self.snapshot_path(key))
            .ok()
            .map(|(run, _)| run)
    }

    pub fn store_snapshots(
        &self,
        key: &str,
        run: &HdmRun,
        meta: &SnapshotMetadata,
    ) -> grassmann_core::Result<()> {
        write_snapshots(&self.snapshot_path(key), run, meta)
    }

    pub fn load_pod(&self, key: &str) -> Option<PodBasis> {
        let path = self.pod_path(key);
        let sidecar: PodSidecar = io::read_json(&path.with_extension("json")).ok()?;
        let modes = io::read_matrix(&path).ok()?;
        let mean = io::read_vector(&mean_path(&path)).ok()?;
        PodBasis::from_parts(modes, Some(sidecar.eigenvalues), DVector::from_vec(mean)).ok()
    }

    pub fn store_pod(
        &self,
        key: &str,
        lambda: f64,
        basis: &PodBasis,
    ) -> grassmann_core::Result<()> {
        let path = self.pod_path(key);
        io::write_matrix(&path, basis.modes())?;
        io::write_vector(&mean_path(&path), basis.mean().as_slice())?;
        let sidecar = PodSidecar {
            kind: "pod".into(),
            lambda,
            modes: basis.rank(),
            eigenvalues: basis.eigenvalues().unwrap_or_default().to_vec(),
        };
        io::write_json(&path.with_extension("json"), &sidecar)
    }
}

fn mean_path(path: &Path) -> PathBuf {
    path.with_extension("mean.grsm")
}
