//! Experiment configuration files.
//!
//! The on-disk format is flat TOML whose keys match [`ExperimentConfig`]
//! field names exactly. `n` and `p` are required; everything else has a
//! documented default:
//!
//! ```toml
//! n = 300
//! p = 0.05
//! lambda_grid = [0.5, 1.0, 1.5, 2.0, 2.5, 3.0]   # default shown
//! trials = 10000                                  # default
//! master_seed = 0                                 # default
//! eps_max = 0.2                                   # default
//! mode = "both"                                   # direct | iterated | both
//! threads = 0                                     # default: available cores
//! exact_stats_limit = 10000                       # default
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::montecarlo::{ExperimentConfig, Mode};

pub const DEFAULT_TRIALS: usize = 10_000;
pub const DEFAULT_EPS_MAX: f64 = 0.2;
pub const DEFAULT_EXACT_STATS_LIMIT: usize = 10_000;
pub const DEFAULT_LAMBDA_GRID: [f64; 6] = [0.5, 1.0, 1.5, 2.0, 2.5, 3.0];

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config file not found: {0}")]
    NotFound(PathBuf),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("invalid value for `{field}`: {reason}")]
    Field {
        field: &'static str,
        reason: String,
    },
}

/// Raw file schema: everything optional, unknown keys rejected.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    n: Option<u64>,
    p: Option<f64>,
    lambda_grid: Option<Vec<f64>>,
    trials: Option<u64>,
    // TOML integers are i64; seeds are reinterpreted as u64 bit patterns.
    master_seed: Option<i64>,
    eps_max: Option<f64>,
    mode: Option<String>,
    threads: Option<u64>,
    exact_stats_limit: Option<u64>,
}

/// Default thread count: available cores.
pub fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Parses and validates a config from TOML text.
pub fn parse_config_str(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;

    let n = raw.n.ok_or(ConfigError::Field {
        field: "n",
        reason: "required".into(),
    })? as usize;
    let p = raw.p.ok_or(ConfigError::Field {
        field: "p",
        reason: "required".into(),
    })?;
    let mode = match raw.mode.as_deref() {
        None | Some("both") => Mode::Both,
        Some("direct") => Mode::Direct,
        Some("iterated") => Mode::Iterated,
        Some(other) => {
            return Err(ConfigError::Field {
                field: "mode",
                reason: format!("`{other}` is not one of direct | iterated | both"),
            })
        }
    };
    let threads = match raw.threads {
        None | Some(0) => default_threads(),
        Some(t) => t as usize,
    };

    let cfg = ExperimentConfig {
        n,
        p,
        lambda_grid: raw
            .lambda_grid
            .unwrap_or_else(|| DEFAULT_LAMBDA_GRID.to_vec()),
        trials: raw.trials.map_or(DEFAULT_TRIALS, |t| t as usize),
        master_seed: raw.master_seed.map_or(0, |s| s as u64),
        eps_max: raw.eps_max.unwrap_or(DEFAULT_EPS_MAX),
        mode,
        threads,
        exact_stats_limit: raw
            .exact_stats_limit
            .map_or(DEFAULT_EXACT_STATS_LIMIT, |l| l as usize),
    };
    validate(&cfg)?;
    Ok(cfg)
}

/// Maps the library-level validation onto named-field diagnostics.
fn validate(cfg: &ExperimentConfig) -> Result<(), ConfigError> {
    cfg.validate().map_err(|e| match e {
        crate::Error::InvalidParameter { name, reason } => {
            ConfigError::Field { field: name, reason }
        }
        other => ConfigError::Parse(other.to_string()),
    })
}

/// Loads a config file from disk.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            ConfigError::NotFound(path.to_path_buf())
        } else {
            ConfigError::Io {
                path: path.to_path_buf(),
                source: e,
            }
        }
    })?;
    parse_config_str(&text)
}
