//! Acquisition of hub model metadata.
//!
//! Offline dumps ([`read_dump`]) are the canonical input; [`fetch_live`]
//! harvests the hub's paginated model API with checkpointing so an
//! interrupted harvest resumes where it stopped. Both produce a
//! [`Snapshot`], which persists as sorted newline-delimited JSON.

mod dump;
mod live;
mod record;

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub use dump::{read_dump, read_dump_from, Strictness};
pub use live::{fetch_live, load_checkpoint, Checkpoint, FetchOptions, MAX_PAGE_SIZE};
pub use record::{normalize, ModelRecord, RejectReason};

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {reason}")]
    BadLine { line: usize, reason: String },
    #[error("invalid fetch options: {0}")]
    InvalidOptions(String),
    #[error("fetch aborted after {pages_completed} completed page(s): {reason}")]
    FetchAborted {
        pages_completed: usize,
        records_checkpointed: usize,
        reason: String,
    },
    #[error("corrupt checkpoint in {path}: {reason}")]
    Checkpoint { path: PathBuf, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SnapshotSource {
    LiveApi,
    OfflineDump,
}

/// Counters surfaced while assembling a snapshot.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestStats {
    pub rows_read: usize,
    /// Rows whose model id had already been seen; the later row replaced it.
    pub duplicates: usize,
    /// Rejected rows keyed by reason code.
    pub skipped: BTreeMap<String, usize>,
    /// Records created before the platform's earliest timestamp. Kept.
    pub before_platform_floor: usize,
    /// API pages whose body was not a JSON array of objects.
    pub malformed_pages: usize,
    pub pages_fetched: usize,
}

impl IngestStats {
    pub fn skipped_total(&self) -> usize {
        self.skipped.values().sum()
    }

    pub(crate) fn skip(&mut self, code: &str) {
        *self.skipped.entry(code.to_string()).or_default() += 1;
    }
}

/// Normalized records keyed by model id.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub records: BTreeMap<String, ModelRecord>,
    pub retrieved_at: i64,
    pub source: SnapshotSource,
    pub stats: IngestStats,
}

impl Snapshot {
    pub fn empty(source: SnapshotSource) -> Self {
        Snapshot {
            records: BTreeMap::new(),
            retrieved_at: crate::time::now(),
            source,
            stats: IngestStats::default(),
        }
    }

    /// Builds a snapshot from records in arrival order; a repeated model id
    /// replaces the earlier row and is counted as a duplicate.
    pub fn from_records<I>(records: I, source: SnapshotSource) -> Self
    where
        I: IntoIterator<Item = ModelRecord>,
    {
        let mut snap = Snapshot::empty(source);
        for rec in records {
            snap.stats.rows_read += 1;
            snap.insert(rec);
        }
        snap
    }

    pub(crate) fn insert(&mut self, rec: ModelRecord) {
        if rec.before_platform_floor() {
            log::warn!(
                "{} created before the platform floor ({})",
                rec.model_id,
                crate::time::format_timestamp(rec.created_at)
            );
            self.stats.before_platform_floor += 1;
        }
        if let Some(old) = self.records.insert(rec.model_id.clone(), rec) {
            self.stats.duplicates += 1;
            if old.before_platform_floor() {
                self.stats.before_platform_floor -= 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, model_id: &str) -> Option<&ModelRecord> {
        self.records.get(model_id)
    }

    pub fn iter(&self) -> impl Iterator<Item = &ModelRecord> {
        self.records.values()
    }

    /// Writes the records as newline-delimited JSON sorted by model id.
    pub fn write_to<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for rec in self.records.values() {
            out.write_all(rec.to_json_line().as_bytes())?;
            out.write_all(b"\n")?;
        }
        out.flush()
    }

    pub fn persist(&self, path: &Path) -> Result<(), IngestError> {
        let file = File::create(path).map_err(|source| IngestError::Write {
            path: path.to_path_buf(),
            source,
        })?;
        self.write_to(BufWriter::new(file))
            .map_err(|source| IngestError::Write {
                path: path.to_path_buf(),
                source,
            })
    }
}
