use std::future::Future;
use std::pin::Pin;
use std::sync::{Arc, Mutex};

use chrono::{DateTime, Duration, FixedOffset, Utc};
use serde::{Deserialize, Serialize};
use temporal_audit::log::{LogEntry, Status};
use tokio::sync::Semaphore;
use tokio::task::JoinSet;

use crate::client::ProbeClient;
use crate::config::ProbeConfig;
use crate::sink::LogSink;
use crate::ProbeError;

pub type SleepFuture<'a> = Pin<Box<dyn Future<Output = ()> + Send + 'a>>;

/// Wall-clock source for slot alignment.
pub trait Clock: Send + Sync {
    fn now(&self) -> DateTime<FixedOffset>;
    fn sleep_until(&self, t: DateTime<FixedOffset>) -> SleepFuture<'_>;
}

pub struct SystemClock {
    tz: FixedOffset,
}

impl SystemClock {
    pub fn new(tz: FixedOffset) -> Self {
        Self { tz }
    }
}

impl Clock for SystemClock {
    fn now(&self) -> DateTime<FixedOffset> {
        Utc::now().with_timezone(&self.tz)
    }

    fn sleep_until(&self, t: DateTime<FixedOffset>) -> SleepFuture<'_> {
        Box::pin(async move {
            // Re-read the wall clock at least once a minute so a suspended
            // host does not push the slot late.
            loop {
                let left = t - self.now();
                if left <= Duration::zero() {
                    return;
                }
                let step = left.min(Duration::seconds(60)).to_std().unwrap_or_default();
                tokio::time::sleep(step).await;
            }
        })
    }
}

/// Manually driven clock; sleeping jumps straight to the target time.
pub struct VirtualClock {
    now: Mutex<DateTime<FixedOffset>>,
}

impl VirtualClock {
    pub fn new(start: DateTime<FixedOffset>) -> Self {
        Self { now: Mutex::new(start) }
    }

    pub fn set(&self, t: DateTime<FixedOffset>) {
        *self.now.lock().unwrap() = t;
    }
}

impl Clock for VirtualClock {
    fn now(&self) -> DateTime<FixedOffset> {
        *self.now.lock().unwrap()
    }

    fn sleep_until(&self, t: DateTime<FixedOffset>) -> SleepFuture<'_> {
        let mut now = self.now.lock().unwrap();
        if t > *now {
            *now = t;
        }
        Box::pin(async {})
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunSummary {
    pub slots_completed: usize,
    pub slots_missed: usize,
    /// Slots skipped because the log already had entries for them.
    pub slots_already_logged: usize,
    pub scored: usize,
    pub parse_failed: usize,
    pub transport_failed: usize,
}

impl RunSummary {
    /// True when requests were made and none reached the service.
    pub fn all_transport_failed(&self) -> bool {
        self.transport_failed > 0 && self.scored == 0 && self.parse_failed == 0
    }
}

/// Slot instants `start + i·interval` up to and including `end`.
pub fn slot_times(cfg: &ProbeConfig) -> Vec<DateTime<FixedOffset>> {
    let step = Duration::seconds(cfg.interval_secs as i64);
    let mut out = Vec::new();
    let mut t = cfg.start;
    while t <= cfg.end {
        out.push(t);
        t += step;
    }
    out
}

fn missed_marker(slot: DateTime<FixedOffset>, model: &str) -> LogEntry {
    LogEntry {
        ts: slot,
        rep: None,
        status: Some(Status::Missed),
        score: None,
        latency_ms: None,
        attempts: None,
        raw: None,
        meta: [("model".to_string(), serde_json::Value::String(model.to_string()))].into(),
        request_sha256: None,
    }
}

/// Runs every remaining slot of the schedule. Outcomes are appended as they
/// complete; a slot counts as done once all its replicates are in the log.
pub async fn run_schedule(
    client: Arc<ProbeClient>,
    sink: &mut LogSink,
    clock: &dyn Clock,
) -> Result<RunSummary, ProbeError> {
    let cfg = client.config().clone();
    let late = Duration::seconds(cfg.late_tolerance_secs as i64);
    let permits = Arc::new(Semaphore::new(cfg.concurrency_limit));
    let mut summary = RunSummary::default();

    for slot in slot_times(&cfg) {
        if sink.has_slot(slot) {
            summary.slots_already_logged += 1;
            continue;
        }
        if clock.now() > slot + late {
            log::warn!("slot {slot} missed");
            sink.append(&missed_marker(slot, &cfg.model_snapshot))?;
            summary.slots_missed += 1;
            continue;
        }
        clock.sleep_until(slot).await;
        log::info!("slot {slot}: issuing {} requests", cfg.replicates_per_slot);

        let mut tasks = JoinSet::new();
        for rep in 0..cfg.replicates_per_slot {
            let client = Arc::clone(&client);
            let permits = Arc::clone(&permits);
            tasks.spawn(async move {
                let _permit = permits.acquire_owned().await.expect("semaphore is never closed");
                client.issue_request(slot, rep).await
            });
        }
        while let Some(joined) = tasks.join_next().await {
            let outcome = joined.expect("request task panicked");
            match outcome.status {
                Status::Scored => summary.scored += 1,
                Status::ParseFailed => summary.parse_failed += 1,
                Status::TransportFailed | Status::Missed => summary.transport_failed += 1,
            }
            sink.append(&outcome.to_entry(&cfg.model_snapshot))?;
        }
        summary.slots_completed += 1;
    }
    Ok(summary)
}
