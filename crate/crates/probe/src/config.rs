use std::path::{Path, PathBuf};
use std::time::Duration;

use chrono::{DateTime, FixedOffset};
use serde::{Deserialize, Serialize};
use temporal_audit::scoring::{ScoringError, TaskSpec};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("invalid config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid task: {0}")]
    Task(#[from] ScoringError),
    #[error("invalid config: {0}")]
    Invalid(String),
}

fn default_temperature() -> f64 {
    1.0
}
fn default_replicates() -> u32 {
    10
}
fn default_interval() -> u64 {
    3 * 3600
}
fn default_timeout() -> u64 {
    120
}
fn default_retries() -> u32 {
    3
}
fn default_concurrency() -> usize {
    10
}
fn default_retry_base() -> u64 {
    2000
}
fn default_late() -> u64 {
    300
}

/// Probe settings, loaded from JSON. Credentials are not accepted here; the
/// API key comes from the environment only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfig {
    /// Base URL; requests go to `{endpoint_url}/chat/completions`.
    pub endpoint_url: String,
    pub model_snapshot: String,
    #[serde(default = "default_temperature")]
    pub temperature: f64,
    pub task: TaskSpec,
    #[serde(default = "default_replicates")]
    pub replicates_per_slot: u32,
    #[serde(default = "default_interval")]
    pub interval_secs: u64,
    pub start: DateTime<FixedOffset>,
    pub end: DateTime<FixedOffset>,
    #[serde(default = "default_timeout")]
    pub request_timeout_secs: u64,
    #[serde(default = "default_retries")]
    pub max_retries: u32,
    #[serde(default = "default_concurrency")]
    pub concurrency_limit: usize,
    /// First backoff delay; doubles per attempt and is jittered by ±50%.
    #[serde(default = "default_retry_base")]
    pub retry_base_ms: u64,
    /// A slot that cannot start within this many seconds of its time is missed.
    #[serde(default = "default_late")]
    pub late_tolerance_secs: u64,
    pub log_path: PathBuf,
}

impl ProbeConfig {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let value: serde_json::Value = serde_json::from_str(&text)?;
        if let Some(obj) = value.as_object() {
            if obj.keys().any(|k| k.to_lowercase().contains("key") || k.to_lowercase().contains("token")) {
                return Err(ConfigError::Invalid(format!(
                    "credentials are not read from config files; set {}",
                    crate::API_KEY_ENV
                )));
            }
        }
        let cfg: Self = serde_json::from_value(value)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: &str| Err(ConfigError::Invalid(m.to_string()));
        if !(self.endpoint_url.starts_with("http://") || self.endpoint_url.starts_with("https://")) {
            return bad("endpoint_url must be an http(s) URL");
        }
        if self.model_snapshot.trim().is_empty() {
            return bad("model_snapshot must not be empty");
        }
        if !(self.temperature >= 0.0 && self.temperature.is_finite()) {
            return bad("temperature must be >= 0");
        }
        if self.replicates_per_slot == 0 {
            return bad("replicates_per_slot must be >= 1");
        }
        if self.interval_secs < 60 {
            return bad("interval must be at least one minute");
        }
        if self.end < self.start {
            return bad("end precedes start");
        }
        if self.request_timeout_secs == 0 {
            return bad("request_timeout_secs must be positive");
        }
        if self.concurrency_limit == 0 {
            return bad("concurrency_limit must be >= 1");
        }
        self.task.validate()?;
        Ok(())
    }

    pub fn interval(&self) -> Duration {
        Duration::from_secs(self.interval_secs)
    }

    pub fn request_timeout(&self) -> Duration {
        Duration::from_secs(self.request_timeout_secs)
    }

    pub fn completions_url(&self) -> String {
        format!("{}/chat/completions", self.endpoint_url.trim_end_matches('/'))
    }
}
