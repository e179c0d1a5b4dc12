//! Flat key=value run configuration. Flags beat config values, which beat
//! built-in defaults; unknown keys are rejected.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use maxkcut::{Error, Result};

const ALLOWED_KEYS: &[&str] = &[
    "input",
    "weights",
    "k",
    "method",
    "seed",
    "trials",
    "restarts",
    "max_iters",
    "eps_abs",
    "eps_rel",
    "rho",
    "adaptive_rho",
    "over_relaxation",
    "max_rounds",
    "vertex_tol",
    "step_tol",
    "out_assignments",
    "report",
    "trace_dir",
];

/// Parsed config file; values stay as strings until a typed getter runs.
#[derive(Debug, Default)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut values = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::invalid(format!(
                    "config line {}: expected key=value, found {line:?}",
                    idx + 1
                )));
            };
            let key = key.trim();
            let value = value.trim();
            if !ALLOWED_KEYS.contains(&key) {
                return Err(Error::invalid(format!(
                    "config line {}: unknown key {key:?}",
                    idx + 1
                )));
            }
            if values.insert(key.to_string(), value.to_string()).is_some() {
                return Err(Error::invalid(format!(
                    "config line {}: duplicate key {key:?}",
                    idx + 1
                )));
            }
        }
        Ok(RunConfig { values })
    }

    /// Typed lookup; `None` when the key is absent.
    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
                Error::invalid(format!("config key {key}: cannot parse value {raw:?}"))
            }),
        }
    }

    pub fn get_bool(&self, key: &str) -> Result<Option<bool>> {
        match self.values.get(key).map(String::as_str) {
            None => Ok(None),
            Some("true") | Some("1") => Ok(Some(true)),
            Some("false") | Some("0") => Ok(Some(false)),
            Some(other) => Err(Error::invalid(format!(
                "config key {key}: expected true/false, found {other:?}"
            ))),
        }
    }

    pub fn get_path(&self, key: &str) -> Option<PathBuf> {
        self.values.get(key).map(PathBuf::from)
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }
}
