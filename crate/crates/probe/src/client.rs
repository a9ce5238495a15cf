use std::time::{Duration, Instant};

use chrono::{DateTime, FixedOffset};
use rand::Rng;
use reqwest::header::{AUTHORIZATION, CONTENT_TYPE};
use reqwest::Client;
use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};
use temporal_audit::log::{LogEntry, Status};
use temporal_audit::scoring::parse_structured;

use crate::config::ProbeConfig;
use crate::ProbeError;

pub const API_KEY_ENV: &str = "TEMPORAL_AUDIT_API_KEY";

/// Result of one replicate request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeOutcome {
    pub slot_timestamp: DateTime<FixedOffset>,
    pub replicate_index: u32,
    pub status: Status,
    /// Present exactly when `status` is `Scored`.
    pub score: Option<f64>,
    pub latency_ms: u64,
    pub raw_response: String,
    pub attempt_count: u32,
    pub request_sha256: String,
}

impl ProbeOutcome {
    pub fn to_entry(&self, model: &str) -> LogEntry {
        LogEntry {
            ts: self.slot_timestamp,
            rep: Some(self.replicate_index),
            status: Some(self.status),
            score: self.score,
            latency_ms: Some(self.latency_ms),
            attempts: Some(self.attempt_count),
            raw: Some(self.raw_response.clone()),
            meta: [("model".to_string(), serde_json::Value::String(model.to_string()))].into(),
            request_sha256: Some(self.request_sha256.clone()),
        }
    }
}

#[derive(Deserialize)]
struct Completion {
    choices: Vec<Choice>,
}

#[derive(Deserialize)]
struct Choice {
    message: Message,
}

#[derive(Deserialize)]
struct Message {
    content: Option<String>,
}

enum Attempt {
    Body(String),
    Retryable(String),
    Fatal(String),
}

/// HTTP client bound to one probe configuration. The request body is
/// serialized once, so every replicate sends identical bytes.
pub struct ProbeClient {
    cfg: ProbeConfig,
    http: Client,
    api_key: String,
    body: Vec<u8>,
    body_sha256: String,
}

impl ProbeClient {
    pub fn new(cfg: ProbeConfig, api_key: String) -> Result<Self, ProbeError> {
        cfg.validate()?;
        let http = Client::builder().timeout(cfg.request_timeout()).build()?;
        let body = serde_json::to_vec(&json!({
            "model": cfg.model_snapshot,
            "temperature": cfg.temperature,
            "messages": [
                {"role": "system", "content": cfg.task.system_prompt},
                {"role": "user", "content": cfg.task.user_prompt},
            ],
            "response_format": {"type": "json_object"},
        }))
        .expect("request body serializes");
        let body_sha256 = hex::encode(Sha256::digest(&body));
        Ok(Self {
            cfg,
            http,
            api_key,
            body,
            body_sha256,
        })
    }

    /// Reads the key from `TEMPORAL_AUDIT_API_KEY`.
    pub fn from_env(cfg: ProbeConfig) -> Result<Self, ProbeError> {
        let key = std::env::var(API_KEY_ENV).map_err(|_| ProbeError::MissingApiKey)?;
        if key.trim().is_empty() {
            return Err(ProbeError::MissingApiKey);
        }
        Self::new(cfg, key)
    }

    pub fn config(&self) -> &ProbeConfig {
        &self.cfg
    }

    pub fn request_body(&self) -> &[u8] {
        &self.body
    }

    pub fn request_sha256(&self) -> &str {
        &self.body_sha256
    }

    async fn attempt(&self) -> Attempt {
        let sent = self
            .http
            .post(self.cfg.completions_url())
            .header(AUTHORIZATION, format!("Bearer {}", self.api_key))
            .header(CONTENT_TYPE, "application/json")
            .body(self.body.clone())
            .send()
            .await;
        let resp = match sent {
            Ok(r) => r,
            Err(e) => return Attempt::Retryable(e.to_string()),
        };
        let status = resp.status();
        let text = match resp.text().await {
            Ok(t) => t,
            Err(e) => return Attempt::Retryable(e.to_string()),
        };
        if status.is_server_error() {
            Attempt::Retryable(format!("HTTP {status}: {text}"))
        } else if !status.is_success() {
            Attempt::Fatal(format!("HTTP {status}: {text}"))
        } else {
            Attempt::Body(text)
        }
    }

    fn backoff(&self, attempt: u32) -> Duration {
        let base = self.cfg.retry_base_ms as f64 * 2f64.powi(attempt.saturating_sub(1) as i32);
        let jitter = rand::rng().random_range(0.5..1.5);
        Duration::from_secs_f64(base * jitter / 1000.0)
    }

    /// Sends one replicate request, retrying server errors and timeouts.
    pub async fn issue_request(&self, slot: DateTime<FixedOffset>, replicate_index: u32) -> ProbeOutcome {
        let started = Instant::now();
        let mut attempts = 0;
        let (status, score, raw) = loop {
            attempts += 1;
            match self.attempt().await {
                Attempt::Body(text) => break self.score(text),
                Attempt::Fatal(msg) => break (Status::TransportFailed, None, msg),
                Attempt::Retryable(msg) => {
                    if attempts > self.cfg.max_retries {
                        break (Status::TransportFailed, None, msg);
                    }
                    log::debug!("slot {slot} rep {replicate_index}: attempt {attempts} failed: {msg}");
                    tokio::time::sleep(self.backoff(attempts)).await;
                }
            }
        };
        ProbeOutcome {
            slot_timestamp: slot,
            replicate_index,
            status,
            score,
            latency_ms: started.elapsed().as_millis() as u64,
            raw_response: raw,
            attempt_count: attempts,
            request_sha256: self.body_sha256.clone(),
        }
    }

    fn score(&self, body: String) -> (Status, Option<f64>, String) {
        let content = serde_json::from_str::<Completion>(&body)
            .ok()
            .and_then(|c| c.choices.into_iter().next())
            .and_then(|c| c.message.content);
        let Some(content) = content else {
            return (Status::ParseFailed, None, body);
        };
        match parse_structured(&content, &self.cfg.task).and_then(|a| a.score(&self.cfg.task)) {
            Ok(s) => (Status::Scored, Some(s), content),
            Err(e) => {
                log::warn!("unparsable answer: {e}");
                (Status::ParseFailed, None, content)
            }
        }
    }
}
