//! Best-effort cache for large-table ground-truth oracles.
//!
//! Studies reuse one 10⁶-row oracle per (model, size, seed) cell; the
//! computed [`TrueEffects`] are stored in a small versioned binary blob
//! so repeated runs skip regeneration. Cache location comes from the
//! caller (the CLI wires it to the `MEDIMUX_CACHE_DIR` environment
//! variable).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::simlab::spec::SimulationModelSpec;
use crate::simlab::table::generate_counterfactual_table;
use crate::simlab::truth::{monte_carlo_truth, TrueEffects};

const MAGIC: &[u8; 5] = b"MDXT1";
const VERSION: u32 = 1;

fn cache_key(spec: &SimulationModelSpec, n_rows: usize, seed: u64) -> String {
    let mut hasher = Sha256::new();
    hasher.update(serde_json::to_vec(spec).expect("model specs always serialize"));
    hasher.update(n_rows.to_le_bytes());
    hasher.update(seed.to_le_bytes());
    let digest = hasher.finalize();
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

fn cache_path(dir: &Path, key: &str) -> PathBuf {
    dir.join(format!("truth-{key}.mdxt"))
}

fn read_cached(path: &Path) -> Option<TrueEffects> {
    let bytes = fs::read(path).ok()?;
    if bytes.len() < MAGIC.len() + 4 + 8 || &bytes[..5] != MAGIC {
        return None;
    }
    let version = u32::from_le_bytes(bytes[5..9].try_into().ok()?);
    if version != VERSION {
        return None;
    }
    let len = u64::from_le_bytes(bytes[9..17].try_into().ok()?) as usize;
    let payload = bytes.get(17..17 + len)?;
    serde_json::from_slice(payload).ok()
}

fn write_cached(path: &Path, truth: &TrueEffects) -> std::io::Result<()> {
    let payload = serde_json::to_vec(truth).expect("truth always serializes");
    let mut bytes = Vec::with_capacity(17 + payload.len());
    bytes.extend_from_slice(MAGIC);
    bytes.extend_from_slice(&VERSION.to_le_bytes());
    bytes.extend_from_slice(&(payload.len() as u64).to_le_bytes());
    bytes.extend_from_slice(&payload);
    let mut file = fs::File::create(path)?;
    file.write_all(&bytes)
}

/// Ground truth for `(spec, n_rows, seed)`, served from `cache_dir` when
/// a valid entry exists. Unreadable or stale entries are recomputed and
/// overwritten; cache write failures are ignored (the cache is an
/// optimization, not a correctness requirement).
pub fn cached_monte_carlo_truth(
    spec: &SimulationModelSpec,
    n_rows: usize,
    seed: u64,
    cache_dir: Option<&Path>,
) -> Result<TrueEffects> {
    let path = cache_dir.map(|dir| cache_path(dir, &cache_key(spec, n_rows, seed)));
    if let Some(path) = &path {
        if let Some(truth) = read_cached(path) {
            if truth.n_rows == n_rows {
                return Ok(truth);
            }
        }
    }
    let table = generate_counterfactual_table(spec, n_rows, seed)?;
    let truth = monte_carlo_truth(&table);
    if let Some(path) = &path {
        if let Some(dir) = path.parent() {
            let _ = fs::create_dir_all(dir);
        }
        let _ = write_cached(path, &truth);
    }
    Ok(truth)
}
