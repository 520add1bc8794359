use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{normalize, IngestError, Snapshot, SnapshotSource};

/// Largest page the hub's model listing accepts.
pub const MAX_PAGE_SIZE: usize = 1000;

const CURSOR_FILE: &str = "cursor.json";
const RECORDS_FILE: &str = "records.jsonl";

#[derive(Debug, Clone)]
pub struct FetchOptions {
    /// Model listing endpoint, e.g. `https://huggingface.co/api/models`.
    pub endpoint_url: String,
    pub page_size: usize,
    /// Requests per second; `<= 0` disables throttling.
    pub rate_limit: f64,
    /// Stop after this many distinct records.
    pub max_records: Option<usize>,
    /// Extra attempts per page after a retryable failure.
    pub retries: u32,
    /// Delay before the first retry; doubles on each subsequent one.
    pub retry_backoff: Duration,
    pub timeout: Duration,
    /// Page URL to start from instead of the endpoint's first page.
    pub resume_cursor: Option<String>,
    /// Where page checkpoints are written. Without one, nothing is durable.
    pub checkpoint_dir: Option<PathBuf>,
    /// Continue from the checkpoint in `checkpoint_dir` if one exists.
    pub resume: bool,
}

impl FetchOptions {
    pub fn new(endpoint_url: impl Into<String>) -> Self {
        FetchOptions {
            endpoint_url: endpoint_url.into(),
            page_size: MAX_PAGE_SIZE,
            rate_limit: 5.0,
            max_records: None,
            retries: 2,
            retry_backoff: Duration::from_millis(500),
            timeout: Duration::from_secs(60),
            resume_cursor: None,
            checkpoint_dir: None,
            resume: false,
        }
    }

    fn first_page_url(&self) -> String {
        let sep = if self.endpoint_url.contains('?') { '&' } else { '?' };
        format!(
            "{}{}limit={}&full=true&config=true&cardData=true",
            self.endpoint_url, sep, self.page_size
        )
    }
}

/// Durable progress of a harvest.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    /// Next page to request; `None` once pagination is exhausted.
    pub next_url: Option<String>,
    pub pages_completed: usize,
    pub rows_read: usize,
    pub malformed_pages: usize,
    pub skipped: std::collections::BTreeMap<String, usize>,
    /// Normalized records from completed pages, in arrival order.
    #[serde(skip)]
    pub records: Vec<super::ModelRecord>,
}

/// Loads the checkpoint stored in `dir`, or `None` if there is none.
pub fn load_checkpoint(dir: &Path) -> Result<Option<Checkpoint>, IngestError> {
    let cursor_path = dir.join(CURSOR_FILE);
    if !cursor_path.exists() {
        return Ok(None);
    }
    let corrupt = |reason: String| IngestError::Checkpoint {
        path: dir.to_path_buf(),
        reason,
    };
    let text = fs::read_to_string(&cursor_path).map_err(|source| IngestError::Read {
        path: cursor_path.clone(),
        source,
    })?;
    let mut checkpoint: Checkpoint =
        serde_json::from_str(&text).map_err(|e| corrupt(e.to_string()))?;

    let records_path = dir.join(RECORDS_FILE);
    if records_path.exists() {
        let file = File::open(&records_path).map_err(|source| IngestError::Read {
            path: records_path.clone(),
            source,
        })?;
        for (idx, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|source| IngestError::Read {
                path: records_path.clone(),
                source,
            })?;
            if line.is_empty() {
                continue;
            }
            let value: Value = serde_json::from_str(&line)
                .map_err(|e| corrupt(format!("records line {}: {e}", idx + 1)))?;
            let rec = normalize(&value)
                .map_err(|r| corrupt(format!("records line {}: {r}", idx + 1)))?;
            checkpoint.records.push(rec);
        }
    }
    Ok(Some(checkpoint))
}

struct CheckpointWriter {
    dir: PathBuf,
}

impl CheckpointWriter {
    fn create(dir: &Path, fresh: bool) -> Result<Self, IngestError> {
        let write_err = |source| IngestError::Write {
            path: dir.to_path_buf(),
            source,
        };
        fs::create_dir_all(dir).map_err(write_err)?;
        if fresh {
            File::create(dir.join(RECORDS_FILE)).map_err(write_err)?;
            let _ = fs::remove_file(dir.join(CURSOR_FILE));
        }
        Ok(CheckpointWriter {
            dir: dir.to_path_buf(),
        })
    }

    /// Appends a page's records, then atomically replaces the cursor. A crash
    /// between the two steps re-fetches that page on resume, and replaying it
    /// is harmless because later rows replace earlier ones by model id.
    fn commit(&self, lines: &[String], cursor: &Checkpoint) -> Result<(), IngestError> {
        let records_path = self.dir.join(RECORDS_FILE);
        let write_err = |path: &Path| {
            let path = path.to_path_buf();
            move |source| IngestError::Write { path, source }
        };
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&records_path)
            .map_err(write_err(&records_path))?;
        for line in lines {
            writeln!(file, "{line}").map_err(write_err(&records_path))?;
        }
        file.sync_data().map_err(write_err(&records_path))?;

        let tmp = self.dir.join(format!("{CURSOR_FILE}.tmp"));
        let body = serde_json::to_vec_pretty(cursor).expect("cursor serializes");
        fs::write(&tmp, body).map_err(write_err(&tmp))?;
        let cursor_path = self.dir.join(CURSOR_FILE);
        fs::rename(&tmp, &cursor_path).map_err(write_err(&cursor_path))
    }
}

struct Page {
    body: String,
    next_url: Option<String>,
}

/// Harvests the paginated model listing.
///
/// Pages are requested one after another (each page names its successor in
/// a `Link: <...>; rel="next"` header). A page whose body is not a JSON
/// array is skipped and counted. A page that still fails after
/// `retries` extra attempts aborts the harvest; everything committed before
/// it stays in the checkpoint.
pub fn fetch_live(opts: &FetchOptions) -> Result<Snapshot, IngestError> {
    if opts.page_size == 0 || opts.page_size > MAX_PAGE_SIZE {
        return Err(IngestError::InvalidOptions(format!(
            "page size must be in 1..={MAX_PAGE_SIZE}, got {}",
            opts.page_size
        )));
    }
    if opts.resume && opts.checkpoint_dir.is_none() {
        return Err(IngestError::InvalidOptions(
            "resume requires a checkpoint directory".into(),
        ));
    }

    let mut snap = Snapshot::empty(SnapshotSource::LiveApi);
    let mut cursor = Checkpoint {
        next_url: Some(
            opts.resume_cursor
                .clone()
                .unwrap_or_else(|| opts.first_page_url()),
        ),
        ..Checkpoint::default()
    };

    let mut resumed = false;
    if opts.resume {
        if let Some(saved) = load_checkpoint(opts.checkpoint_dir.as_deref().unwrap())? {
            log::info!(
                "resuming after {} page(s), {} record(s)",
                saved.pages_completed,
                saved.records.len()
            );
            for rec in saved.records.iter().cloned() {
                snap.insert(rec);
            }
            cursor = Checkpoint {
                records: Vec::new(),
                ..saved
            };
            if let Some(url) = &opts.resume_cursor {
                cursor.next_url = Some(url.clone());
            }
            resumed = true;
        }
    }
    let writer = opts
        .checkpoint_dir
        .as_deref()
        .map(|dir| CheckpointWriter::create(dir, !resumed))
        .transpose()?;

    let agent = ureq::AgentBuilder::new().timeout(opts.timeout).build();
    let min_interval = (opts.rate_limit > 0.0).then(|| Duration::from_secs_f64(1.0 / opts.rate_limit));
    let mut last_request: Option<Instant> = None;
    let cap_reached = |snap: &Snapshot| opts.max_records.is_some_and(|cap| snap.len() >= cap);

    while let Some(url) = cursor.next_url.clone() {
        if cap_reached(&snap) {
            break;
        }
        let page = fetch_page(&agent, &url, opts, min_interval, &mut last_request).map_err(
            |reason| IngestError::FetchAborted {
                pages_completed: cursor.pages_completed,
                records_checkpointed: if writer.is_some() { snap.len() } else { 0 },
                reason,
            },
        )?;

        let mut lines = Vec::new();
        match serde_json::from_str::<Value>(&page.body) {
            Ok(Value::Array(rows)) => {
                for row in rows {
                    cursor.rows_read += 1;
                    match normalize(&row) {
                        Ok(rec) => {
                            let is_new = !snap.records.contains_key(&rec.model_id);
                            if is_new && cap_reached(&snap) {
                                break;
                            }
                            lines.push(rec.to_json_line());
                            snap.insert(rec);
                        }
                        Err(reason) => {
                            *cursor.skipped.entry(reason.code().to_string()).or_default() += 1
                        }
                    }
                }
            }
            _ => {
                log::warn!("skipping malformed page {url}");
                cursor.malformed_pages += 1;
            }
        }
        cursor.pages_completed += 1;
        cursor.next_url = page.next_url;
        if let Some(writer) = &writer {
            writer.commit(&lines, &cursor)?;
        }
    }

    snap.stats.rows_read = cursor.rows_read;
    snap.stats.skipped = cursor.skipped;
    snap.stats.malformed_pages = cursor.malformed_pages;
    snap.stats.pages_fetched = cursor.pages_completed;
    Ok(snap)
}

fn fetch_page(
    agent: &ureq::Agent,
    url: &str,
    opts: &FetchOptions,
    min_interval: Option<Duration>,
    last_request: &mut Option<Instant>,
) -> Result<Page, String> {
    let mut backoff = opts.retry_backoff;
    let mut attempt = 0;
    loop {
        if let (Some(interval), Some(last)) = (min_interval, *last_request) {
            let elapsed = last.elapsed();
            if elapsed < interval {
                thread::sleep(interval - elapsed);
            }
        }
        *last_request = Some(Instant::now());

        let failure = match agent.get(url).call() {
            Ok(resp) => {
                let next_url = resp
                    .header("link")
                    .and_then(parse_next_link)
                    .map(|next| resolve(url, &next));
                match resp.into_string() {
                    Ok(body) => return Ok(Page { body, next_url }),
                    Err(e) => format!("reading body of {url}: {e}"),
                }
            }
            Err(ureq::Error::Status(code, _)) if code == 429 || code >= 500 => {
                format!("{url} returned HTTP {code}")
            }
            Err(ureq::Error::Status(code, _)) => {
                return Err(format!("{url} returned HTTP {code}"));
            }
            Err(ureq::Error::Transport(t)) => format!("{url}: {t}"),
        };
        if attempt >= opts.retries {
            return Err(format!("{failure} (after {} attempt(s))", attempt + 1));
        }
        log::warn!("{failure}; retrying");
        attempt += 1;
        thread::sleep(backoff);
        backoff *= 2;
    }
}

/// Extracts the `rel="next"` target from an RFC 8288 `Link` header.
fn parse_next_link(header: &str) -> Option<String> {
    header.split(',').find_map(|part| {
        let mut pieces = part.split(';');
        let target = pieces.next()?.trim();
        let is_next = pieces.any(|p| {
            let p = p.trim();
            p == "rel=\"next\"" || p == "rel=next"
        });
        (is_next && target.starts_with('<') && target.ends_with('>'))
            .then(|| target[1..target.len() - 1].to_string())
    })
}

fn resolve(base: &str, next: &str) -> String {
    match url::Url::parse(base).and_then(|b| b.join(next)) {
        Ok(u) => u.to_string(),
        Err(_) => next.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn next_link_is_found_among_others() {
        let header = r#"<https://hub/api/models?cursor=abc>; rel="next", <https://hub/api/models>; rel="first""#;
        assert_eq!(
            parse_next_link(header).as_deref(),
            Some("https://hub/api/models?cursor=abc")
        );
        assert_eq!(parse_next_link(r#"<https://x>; rel="prev""#), None);
    }

    #[test]
    fn relative_links_resolve_against_page() {
        assert_eq!(
            resolve("http://127.0.0.1:9/api/models?limit=2", "/api/models?cursor=2"),
            "http://127.0.0.1:9/api/models?cursor=2"
        );
    }

    #[test]
    fn page_size_bounds_are_enforced() {
        let mut opts = FetchOptions::new("http://127.0.0.1:9/api/models");
        opts.page_size = 0;
        assert!(matches!(fetch_live(&opts), Err(IngestError::InvalidOptions(_))));
        opts.page_size = MAX_PAGE_SIZE + 1;
        assert!(matches!(fetch_live(&opts), Err(IngestError::InvalidOptions(_))));
    }

    #[test]
    fn first_page_url_appends_query() {
        let mut opts = FetchOptions::new("http://h/api/models");
        opts.page_size = 2;
        assert_eq!(
            opts.first_page_url(),
            "http://h/api/models?limit=2&full=true&config=true&cardData=true"
        );
    }
}
