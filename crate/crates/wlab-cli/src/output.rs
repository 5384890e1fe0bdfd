//! Error-to-exit-code mapping, atomic file output, and the run manifest.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use serde::Serialize;

/// Failure categories with distinct exit codes.
///
/// * 2 — the request itself is invalid (bad arguments or config);
/// * 4 — the environment failed us (filesystem, corrupt cache).
///
/// Exit code 3 is reserved for runs that complete but surface a
/// *finding* (disagreeing constants, an exhausted budget, a duplicate
/// angle); those return success from the command and set the code at
/// the end so outputs are still written.
#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Io(String),
}

impl CliError {
    pub fn validation(msg: impl Into<String>) -> Self {
        Self::Validation(msg.into())
    }

    pub fn io(msg: impl Into<String>) -> Self {
        Self::Io(msg.into())
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            Self::Validation(_) => ExitCode::from(2),
            Self::Io(_) => ExitCode::from(4),
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Self::Validation(m) | Self::Io(m) => m,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.message())
    }
}

impl std::error::Error for CliError {}

/// Write `bytes` to `dir/name` via a temporary file and rename, so readers
/// never observe a half-written result.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::io(format!("cannot create {}: {e}", dir.display())))?;
    let tmp = dir.join(format!(".{name}.tmp"));
    std::fs::write(&tmp, bytes)
        .map_err(|e| CliError::io(format!("cannot write {}: {e}", tmp.display())))?;
    let target = dir.join(name);
    std::fs::rename(&tmp, &target)
        .map_err(|e| CliError::io(format!("cannot move result into {}: {e}", target.display())))?;
    Ok(target)
}

/// Stream a large file through a buffered writer, then rename into place.
pub fn write_atomic_with(
    dir: &Path,
    name: &str,
    fill: impl FnOnce(&mut std::io::BufWriter<std::fs::File>) -> std::io::Result<()>,
) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::io(format!("cannot create {}: {e}", dir.display())))?;
    let tmp = dir.join(format!(".{name}.tmp"));
    let file = std::fs::File::create(&tmp)
        .map_err(|e| CliError::io(format!("cannot create {}: {e}", tmp.display())))?;
    let mut writer = std::io::BufWriter::new(file);
    fill(&mut writer)
        .and_then(|()| {
            use std::io::Write;
            writer.flush()
        })
        .map_err(|e| CliError::io(format!("cannot write {}: {e}", tmp.display())))?;
    drop(writer);
    let target = dir.join(name);
    std::fs::rename(&tmp, &target)
        .map_err(|e| CliError::io(format!("cannot move result into {}: {e}", target.display())))?;
    Ok(target)
}

/// Serialize `value` as pretty JSON and write it atomically.
pub fn write_json(dir: &Path, name: &str, value: &impl Serialize) -> Result<PathBuf, CliError> {
    let mut bytes = serde_json::to_vec_pretty(value)
        .map_err(|e| CliError::io(format!("cannot serialize {name}: {e}")))?;
    bytes.push(b'\n');
    write_atomic(dir, name, &bytes)
}

/// Snapshot of the canonical prime-square constant used by a run.
#[derive(Debug, Serialize)]
pub struct ManifestConstant {
    pub value: f64,
    pub error_bound: f64,
    pub method: String,
}

/// Every run drops `manifest.json` next to its outputs: enough to rerun the
/// command bit-for-bit and to detect when two runs used the same effective
/// configuration (`config_hash`).
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub config_hash: String,
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub prime_square_constant: ManifestConstant,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sieve_limit: Option<u64>,
    pub seed: u64,
    pub wall_time_ms: u64,
    pub outputs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub finding: Option<String>,
}
