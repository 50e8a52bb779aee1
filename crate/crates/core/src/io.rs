//! Matrix exchange files.
//!
//! Binary layout: the five bytes `GRSM1`, `n` and `m` as little-endian
//! `u64`, then `n * m` little-endian `f64` values in column-major order.
//! Files whose extension is `.csv` hold one matrix row per line instead.
//! Every write goes to a temporary sibling first and is renamed into place.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use nalgebra::DMatrix;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 5] = b"GRSM1";

fn is_csv(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

pub fn encode_binary(m: &DMatrix<f64>) -> Vec<u8> {
    let mut out = Vec::with_capacity(21 + 8 * m.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(m.nrows() as u64).to_le_bytes());
    out.extend_from_slice(&(m.ncols() as u64).to_le_bytes());
    for v in m.as_slice() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_binary(bytes: &[u8]) -> Result<DMatrix<f64>> {
    if bytes.len() < 21 || &bytes[..5] != MAGIC {
        return Err(Error::Format("missing GRSM1 header".into()));
    }
    let word = |at: usize| u64::from_le_bytes(bytes[at..at + 8].try_into().expect("8 bytes"));
    let (n, m) = (word(5) as usize, word(13) as usize);
    let expected = n
        .checked_mul(m)
        .and_then(|c| c.checked_mul(8))
        .and_then(|c| c.checked_add(21))
        .ok_or_else(|| Error::Format("matrix dimensions overflow".into()))?;
    if bytes.len() != expected {
        return Err(Error::Format(format!(
            "{n}x{m} matrix needs {expected} bytes, file has {}",
            bytes.len()
        )));
    }
    let values = bytes[21..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect::<Vec<_>>();
    Ok(DMatrix::from_vec(n, m, values))
}

pub fn encode_csv(m: &DMatrix<f64>) -> String {
    let mut out = String::new();
    for row in m.row_iter() {
        let line: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn decode_csv(text: &str) -> Result<DMatrix<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Format(format!("line {}: {e}", k + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::Format(format!(
                    "line {}: {} fields, expected {}",
                    k + 1,
                    row.len(),
                    first.len()
                )));
            }
        }
        rows.push(row);
    }
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    Ok(DMatrix::from_fn(n, m, |i, j| rows[i][j]))
}

fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut tmp = PathBuf::from(path);
    let name = path
        .file_name()
        .and_then(|n| n.to_str())
        .unwrap_or("matrix");
    // unique per process and per call, so concurrent writers never share a temporary
    static COUNTER: AtomicU64 = AtomicU64::new(0);
    let serial = COUNTER.fetch_add(1, Ordering::Relaxed);
    tmp.set_file_name(format!(".{name}.{}.{serial}.tmp", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn write_matrix(path: &Path, m: &DMatrix<f64>) -> Result<()> {
    if is_csv(path) {
        atomic_write(path, encode_csv(m).as_bytes())
    } else {
        atomic_write(path, &encode_binary(m))
    }
}

pub fn read_matrix(path: &Path) -> Result<DMatrix<f64>> {
    if is_csv(path) {
        decode_csv(&fs::read_to_string(path)?)
    } else {
        decode_binary(&fs::read(path)?)
    }
}

/// Vectors are stored as single-column matrices.
pub fn write_vector(path: &Path, v: &[f64]) -> Result<()> {
    write_matrix(path, &DMatrix::from_column_slice(v.len(), 1, v))
}

pub fn read_vector(path: &Path) -> Result<Vec<f64>> {
    let m = read_matrix(path)?;
    if m.ncols() != 1 {
        return Err(Error::Format(format!(
            "expected a single column, found {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(m.as_slice().to_vec())
}

/// Eigenvalue spectrum as `index,value` CSV (1-based index).
pub fn write_spectrum(path: &Path, spectrum: &[f64]) -> Result<()> {
    let mut out = String::from("index,value\n");
    for (k, v) in spectrum.iter().enumerate() {
        out.push_str(&format!("{},{v:?}\n", k + 1));
    }
    atomic_write(path, out.as_bytes())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    atomic_write(path, text.as_bytes())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}
