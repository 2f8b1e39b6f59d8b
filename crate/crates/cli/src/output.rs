//! CSV files, digests and the run log.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;

use cavity_entangle::dynamics::{trajectory_csv, Trajectory};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};
use crate::run::RunRecord;

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes `text` to `path` and returns its SHA-256.
pub fn write_text(text: &str, path: &Path) -> Result<String> {
    std::fs::write(path, text).map_err(CliError::io(path))?;
    Ok(sha256_hex(text.as_bytes()))
}

pub fn write_trajectory_csv(traj: &Trajectory, path: &Path) -> Result<String> {
    write_text(&trajectory_csv(traj), path)
}

/// Appends one JSON line.
pub fn append_record(path: &Path, record: &RunRecord) -> Result<()> {
    let mut line = serde_json::to_string(record)?;
    line.push('\n');
    let mut f = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(CliError::io(path))?;
    f.write_all(line.as_bytes()).map_err(CliError::io(path))
}
