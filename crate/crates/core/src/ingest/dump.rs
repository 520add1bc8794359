use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{normalize, IngestError, Snapshot, SnapshotSource};

/// How [`read_dump`] treats rows it cannot normalize.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Strictness {
    /// The first bad line is fatal and reported with its line number.
    Strict,
    /// Bad lines are skipped and counted by reason.
    #[default]
    Lenient,
}

/// Reads a newline-delimited JSON dump, one metadata object per line.
/// Blank lines are ignored.
pub fn read_dump(path: &Path, strictness: Strictness) -> Result<Snapshot, IngestError> {
    let file = File::open(path).map_err(|source| IngestError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    read_dump_from(BufReader::new(file), strictness).map_err(|err| match err {
        IngestError::Read { source, .. } => IngestError::Read {
            path: path.to_path_buf(),
            source,
        },
        other => other,
    })
}

pub fn read_dump_from<R: BufRead>(
    reader: R,
    strictness: Strictness,
) -> Result<Snapshot, IngestError> {
    let mut snap = Snapshot::empty(SnapshotSource::OfflineDump);
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|source| IngestError::Read {
            path: Default::default(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        snap.stats.rows_read += 1;
        let parsed = serde_json::from_str::<Value>(&line)
            .map_err(|_| "invalid_json")
            .and_then(|value| normalize(&value).map_err(|r| r.code()));
        match parsed {
            Ok(rec) => snap.insert(rec),
            Err(code) if strictness == Strictness::Strict => {
                return Err(IngestError::BadLine {
                    line: line_no,
                    reason: code.to_string(),
                })
            }
            Err(code) => {
                log::warn!("skipping dump line {line_no}: {code}");
                snap.stats.skip(code);
            }
        }
    }
    Ok(snap)
}
