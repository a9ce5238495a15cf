use std::collections::BTreeSet;
use std::fs::{File, OpenOptions};
use std::io::{Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, FixedOffset};
use temporal_audit::log::LogEntry;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SinkError {
    #[error("log {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("log {path} line {line} is not a log entry: {message}")]
    Corrupt { path: PathBuf, line: usize, message: String },
}

/// Append-only JSONL log. Each entry is written as one line and synced
/// before `append` returns.
pub struct LogSink {
    path: PathBuf,
    file: File,
    slots: BTreeSet<DateTime<FixedOffset>>,
    quarantined: Option<PathBuf>,
}

impl LogSink {
    /// Opens or creates the log. An unterminated final line left by a crash is
    /// moved to `<log>.quarantine` and cut from the log.
    pub fn open(path: &Path) -> Result<Self, SinkError> {
        let io = |source| SinkError::Io {
            path: path.to_path_buf(),
            source,
        };
        let mut file = OpenOptions::new()
            .read(true)
            .append(true)
            .create(true)
            .open(path)
            .map_err(io)?;
        let mut bytes = Vec::new();
        file.read_to_end(&mut bytes).map_err(io)?;

        let mut quarantined = None;
        let complete = match bytes.iter().rposition(|&b| b == b'\n') {
            Some(i) => i + 1,
            None => 0,
        };
        if complete < bytes.len() {
            let tail = &bytes[complete..];
            let q = quarantine_path(path);
            let mut qf = OpenOptions::new().create(true).append(true).open(&q).map_err(io)?;
            qf.write_all(tail).map_err(io)?;
            qf.write_all(b"\n").map_err(io)?;
            qf.sync_all().map_err(io)?;
            file.set_len(complete as u64).map_err(io)?;
            file.seek(SeekFrom::End(0)).map_err(io)?;
            file.sync_all().map_err(io)?;
            log::warn!("truncated final line of {} moved to {}", path.display(), q.display());
            quarantined = Some(q);
        }

        let mut slots = BTreeSet::new();
        for (i, line) in String::from_utf8_lossy(&bytes[..complete]).lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let entry: LogEntry = serde_json::from_str(line).map_err(|e| SinkError::Corrupt {
                path: path.to_path_buf(),
                line: i + 1,
                message: e.to_string(),
            })?;
            slots.insert(entry.ts);
        }
        Ok(Self {
            path: path.to_path_buf(),
            file,
            slots,
            quarantined,
        })
    }

    pub fn append(&mut self, entry: &LogEntry) -> Result<(), SinkError> {
        let mut line = serde_json::to_vec(entry).expect("log entry serializes");
        line.push(b'\n');
        let io = |source| SinkError::Io {
            path: self.path.clone(),
            source,
        };
        self.file.write_all(&line).map_err(io)?;
        self.file.sync_data().map_err(io)?;
        self.slots.insert(entry.ts);
        Ok(())
    }

    /// True if any entry for this slot timestamp is already in the log.
    pub fn has_slot(&self, ts: DateTime<FixedOffset>) -> bool {
        self.slots.contains(&ts)
    }

    pub fn quarantined(&self) -> Option<&Path> {
        self.quarantined.as_deref()
    }

    pub fn path(&self) -> &Path {
        &self.path
    }
}

fn quarantine_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".quarantine");
    path.with_file_name(name)
}
