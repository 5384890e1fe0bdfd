//! Layered run configuration: command-line flag > config file > default.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use sha2::{Digest, Sha256};

use wlab::Level;

use crate::output::CliError;

/// Optional defaults loadable from a JSON file via `--config`. Every field
/// mirrors a long option; unknown keys are rejected so typos surface.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub cache_dir: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub n_max: Option<u64>,
    pub level: Option<String>,
    pub epsilon: Option<f64>,
    pub budget: Option<u64>,
    pub euler_cutoff: Option<u64>,
    pub euler_depth: Option<u32>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::io(format!("cannot read config {}: {e}", path.display()))
        })?;
        serde_json::from_str(&text).map_err(|e| {
            CliError::validation(format!("config {} is not valid: {e}", path.display()))
        })
    }
}

/// First present value wins: flag, then config, then the built-in default.
pub fn pick<T>(flag: Option<T>, config: Option<T>, default: T) -> T {
    flag.or(config).unwrap_or(default)
}

/// Like [`pick`] without a default.
pub fn pick_opt<T>(flag: Option<T>, config: Option<T>) -> Option<T> {
    flag.or(config)
}

pub fn parse_level(text: &str) -> Result<Level, CliError> {
    if text.eq_ignore_ascii_case("lambda") {
        return Ok(Level::Lambda);
    }
    let m: u64 = text.parse().map_err(|_| {
        CliError::validation(format!(
            "level must be a positive integer or \"lambda\", got {text:?}"
        ))
    })?;
    Level::finite(m)
        .map_err(|e| CliError::validation(format!("level {text:?} rejected: {e}")))
}

/// SHA-256 over the sorted effective `key=value` pairs; stable across runs
/// with the same resolved parameters, independent of how they were supplied.
pub fn config_hash(effective: &BTreeMap<String, String>) -> String {
    let mut hasher = Sha256::new();
    for (k, v) in effective {
        hasher.update(k.as_bytes());
        hasher.update(b"=");
        hasher.update(v.as_bytes());
        hasher.update(b"\n");
    }
    let digest = hasher.finalize();
    let mut hex = String::with_capacity(64);
    for byte in digest {
        use std::fmt::Write;
        let _ = write!(hex, "{byte:02x}");
    }
    hex
}
