//! Scheduled, replicated probing of an OpenAI-compatible chat-completions
//! endpoint.
//!
//! Every slot on the grid `start + i·interval` issues the same request
//! `replicates_per_slot` times, scores each reply with the task's answer key
//! and appends one JSONL line per outcome. Slots that cannot be run on time
//! are logged as missed and never retried later.

mod client;
mod config;
mod schedule;
mod sink;

pub use client::{ProbeClient, ProbeOutcome, API_KEY_ENV};
pub use config::{ConfigError, ProbeConfig};
pub use schedule::{run_schedule, slot_times, Clock, RunSummary, SystemClock, VirtualClock};
pub use sink::{LogSink, SinkError};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProbeError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("environment variable {API_KEY_ENV} is not set")]
    MissingApiKey,
    #[error("http client: {0}")]
    Client(#[from] reqwest::Error),
    #[error(transparent)]
    Sink(#[from] SinkError),
}
