//! JSON-lines measurement log and CSV export.
//!
//! Each line is one object: `ts` (RFC 3339 with offset), `rep`, `score`,
//! optional `raw` and `meta`, plus the probe fields `status`, `latency_ms`,
//! `attempts` and `request_sha256`. Lines without a `status` are treated as
//! scored.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::Path;

use chrono::{DateTime, Duration, DurationRound, FixedOffset};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::series::{MeasurementRecord, SeriesError};

#[derive(Debug, Error)]
pub enum LogError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: {source}")]
    Record { line: usize, source: SeriesError },
    #[error("log contains no scored records")]
    Empty,
    #[error("cannot infer a sampling interval from fewer than two distinct timestamps")]
    NoInterval,
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Scored,
    ParseFailed,
    TransportFailed,
    /// A whole slot that was never probed.
    Missed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogEntry {
    pub ts: DateTime<FixedOffset>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rep: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub status: Option<Status>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub latency_ms: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attempts: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raw: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub meta: BTreeMap<String, serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub request_sha256: Option<String>,
}

impl LogEntry {
    pub fn from_record(r: &MeasurementRecord) -> Self {
        Self {
            ts: r.timestamp,
            rep: Some(r.replicate_index),
            status: Some(Status::Scored),
            score: Some(r.score),
            latency_ms: None,
            attempts: None,
            raw: r.raw_response.clone(),
            meta: r
                .metadata
                .iter()
                .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
                .collect(),
            request_sha256: None,
        }
    }

    pub fn effective_status(&self) -> Status {
        self.status.unwrap_or(Status::Scored)
    }

    fn to_record(&self, line: usize) -> Result<MeasurementRecord, LogError> {
        let malformed = |message: &str| LogError::Malformed {
            line,
            message: message.to_string(),
        };
        let rep = self.rep.ok_or_else(|| malformed("scored entry without `rep`"))?;
        let score = self.score.ok_or_else(|| malformed("scored entry without `score`"))?;
        let mut record =
            MeasurementRecord::new(self.ts, rep, score).map_err(|source| LogError::Record { line, source })?;
        record.raw_response = self.raw.clone();
        record.metadata = self
            .meta
            .iter()
            .map(|(k, v)| {
                let s = match v {
                    serde_json::Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                (k.clone(), s)
            })
            .collect();
        Ok(record)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LogContents {
    pub records: Vec<MeasurementRecord>,
    /// Timestamps of every entry, scored or not.
    pub all_timestamps: Vec<DateTime<FixedOffset>>,
    pub status_counts: BTreeMap<String, usize>,
    /// True when an unterminated, unparsable final line was ignored.
    pub truncated_tail: bool,
}

pub fn read_log_file(path: &Path) -> Result<LogContents, LogError> {
    read_log(File::open(path)?)
}

pub fn read_log<R: Read>(reader: R) -> Result<LogContents, LogError> {
    let mut reader = BufReader::new(reader);
    let mut out = LogContents::default();
    let mut counts: HashMap<Status, usize> = HashMap::new();
    let mut buf = String::new();
    let mut line_no = 0;
    loop {
        buf.clear();
        if reader.read_line(&mut buf)? == 0 {
            break;
        }
        line_no += 1;
        let terminated = buf.ends_with('\n');
        let text = buf.trim();
        if text.is_empty() {
            continue;
        }
        let entry: LogEntry = match serde_json::from_str(text) {
            Ok(e) => e,
            Err(_) if !terminated => {
                log::warn!("ignoring truncated final log line {line_no}");
                out.truncated_tail = true;
                break;
            }
            Err(e) => {
                return Err(LogError::Malformed {
                    line: line_no,
                    message: e.to_string(),
                })
            }
        };
        let status = entry.effective_status();
        *counts.entry(status).or_default() += 1;
        out.all_timestamps.push(entry.ts);
        if status == Status::Scored {
            out.records.push(entry.to_record(line_no)?);
        }
    }
    out.status_counts = counts
        .into_iter()
        .map(|(s, n)| (serde_json::to_value(s).unwrap().as_str().unwrap().to_string(), n))
        .collect();
    Ok(out)
}

pub fn write_entries<W: Write>(entries: &[LogEntry], mut w: W) -> Result<(), LogError> {
    for e in entries {
        serde_json::to_writer(&mut w, e).map_err(io::Error::from)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

/// CSV with header `ts,rep,score`.
pub fn write_csv<W: Write>(records: &[MeasurementRecord], w: W) -> Result<(), LogError> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(["ts", "rep", "score"])?;
    for r in records {
        csv.write_record([r.timestamp.to_rfc3339(), r.replicate_index.to_string(), r.score.to_string()])?;
    }
    csv.flush()?;
    Ok(())
}

/// Grid inferred from log timestamps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InferredGrid {
    pub t0: DateTime<FixedOffset>,
    pub dt: Duration,
    pub t_end: DateTime<FixedOffset>,
}

/// Timestamps closer than this are taken to belong to the same slot.
const CLUSTER_GAP_MINUTES: i64 = 5;

/// Groups timestamps into slots (consecutive stamps less than five minutes
/// apart) and takes `dt` as the most common gap between slot starts, rounded
/// to the minute. Shorter intervals must be given explicitly.
pub fn infer_grid(timestamps: &[DateTime<FixedOffset>]) -> Result<InferredGrid, LogError> {
    let minute = Duration::minutes(1);
    let mut sorted = timestamps.to_vec();
    sorted.sort();
    let mut starts: Vec<DateTime<FixedOffset>> = Vec::new();
    let mut prev: Option<DateTime<FixedOffset>> = None;
    for t in sorted {
        if prev.is_none_or(|p| t - p >= Duration::minutes(CLUSTER_GAP_MINUTES)) {
            starts.push(t.duration_round(minute).unwrap_or(t));
        }
        prev = Some(t);
    }
    if starts.len() < 2 {
        return Err(LogError::NoInterval);
    }
    let mut gaps: BTreeMap<i64, usize> = BTreeMap::new();
    for w in starts.windows(2) {
        *gaps.entry((w[1] - w[0]).num_minutes()).or_default() += 1;
    }
    // Ties go to the shorter gap.
    let (&minutes, _) = gaps
        .iter()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
        .expect("at least one gap");
    let ts = starts;
    Ok(InferredGrid {
        t0: ts[0],
        dt: Duration::minutes(minutes),
        t_end: *ts.last().unwrap(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(s: &str) -> DateTime<FixedOffset> {
        DateTime::parse_from_rfc3339(s).unwrap()
    }

    #[test]
    fn roundtrip_and_status_filtering() {
        let r = MeasurementRecord::new(ts("2024-05-01T09:00:00+02:00"), 3, 0.75).unwrap();
        let mut entries = vec![LogEntry::from_record(&r)];
        entries.push(LogEntry {
            status: Some(Status::ParseFailed),
            score: None,
            ..entries[0].clone()
        });
        let mut bytes = Vec::new();
        write_entries(&entries, &mut bytes).unwrap();
        let back = read_log(bytes.as_slice()).unwrap();
        assert_eq!(back.records, vec![r]);
        assert_eq!(back.all_timestamps.len(), 2);
        assert_eq!(back.status_counts["parse_failed"], 1);
        assert_eq!(back.status_counts["scored"], 1);
    }

    #[test]
    fn plain_lines_and_meta_stringification() {
        let text = r#"{"ts":"2024-05-01T00:00:00Z","rep":0,"score":1,"meta":{"temperature":1.0,"model":"m-1"}}
"#;
        let back = read_log(text.as_bytes()).unwrap();
        let rec = &back.records[0];
        assert_eq!(rec.metadata["temperature"], "1.0");
        assert_eq!(rec.metadata["model"], "m-1");
    }

    #[test]
    fn truncated_tail_is_ignored_but_inner_garbage_is_not() {
        let good = r#"{"ts":"2024-05-01T00:00:00Z","rep":0,"score":0.5}"#;
        let tail = format!("{good}\n{{\"ts\":\"2024-05");
        let back = read_log(tail.as_bytes()).unwrap();
        assert!(back.truncated_tail);
        assert_eq!(back.records.len(), 1);
        let inner = format!("{{oops\n{good}\n");
        assert!(matches!(read_log(inner.as_bytes()), Err(LogError::Malformed { line: 1, .. })));
    }

    #[test]
    fn out_of_range_score_is_rejected() {
        let text = "{\"ts\":\"2024-05-01T00:00:00Z\",\"rep\":0,\"score\":1.5}\n";
        assert!(matches!(read_log(text.as_bytes()), Err(LogError::Record { line: 1, .. })));
    }

    #[test]
    fn csv_export() {
        let r = MeasurementRecord::new(ts("2024-05-01T09:00:00+02:00"), 1, 0.25).unwrap();
        let mut out = Vec::new();
        write_csv(&[r], &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "ts,rep,score\n2024-05-01T09:00:00+02:00,1,0.25\n");
    }

    #[test]
    fn grid_inference_tolerates_jitter_and_gaps() {
        let base = ts("2024-05-01T00:00:00+02:00");
        let mut stamps = Vec::new();
        for i in 0..20i64 {
            if i == 7 || i == 8 {
                continue;
            }
            for r in 0..3i64 {
                stamps.push(base + Duration::hours(3 * i) + Duration::seconds(5 * r));
            }
        }
        let g = infer_grid(&stamps).unwrap();
        assert_eq!(g.dt, Duration::hours(3));
        assert_eq!(g.t0, base);
        assert_eq!(g.t_end, base + Duration::hours(57));
        assert!(matches!(infer_grid(&stamps[..1]), Err(LogError::NoInterval)));
    }
}
