//! Harvest a paginated model listing with checkpointing. A local server
//! stands in for the hub; its second page fails once, the client retries,
//! and the result carries every record from all three pages.

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::Duration;

use hub_lineage::ingest::{fetch_live, load_checkpoint, FetchOptions, Snapshot};
use serde_json::json;

fn serve(server: Arc<tiny_http::Server>) {
    let failed_once = AtomicBool::new(false);
    for req in server.incoming_requests() {
        let page: usize = req
            .url()
            .split("page=")
            .nth(1)
            .and_then(|p| p.parse().ok())
            .unwrap_or(0);
        if page == 1 && !failed_once.swap(true, Ordering::SeqCst) {
            let _ = req.respond(tiny_http::Response::from_string("busy").with_status_code(503));
            continue;
        }
        let rows: Vec<_> = (0..2)
            .map(|i| {
                let n = page * 2 + i;
                json!({
                    "id": format!("demo/model-{n}"),
                    "createdAt": format!("2024-05-{:02}T12:00:00.000Z", n + 1),
                    "tags": if n == 0 { vec![] } else { vec![format!("base_model:finetune:demo/model-{}", n - 1)] },
                })
            })
            .collect();
        let mut resp = tiny_http::Response::from_string(json!(rows).to_string());
        if page < 2 {
            let link = format!("</api/models?page={}>; rel=\"next\"", page + 1);
            resp = resp.with_header(tiny_http::Header::from_bytes("Link", link).unwrap());
        }
        let _ = req.respond(resp);
    }
}

pub fn run_example() -> Snapshot {
    let server = Arc::new(tiny_http::Server::http("127.0.0.1:0").expect("bind"));
    let port = server.server_addr().to_ip().unwrap().port();
    let handle = {
        let server = Arc::clone(&server);
        std::thread::spawn(move || serve(server))
    };

    let checkpoints = tempfile::tempdir().expect("temp dir");
    let mut opts = FetchOptions::new(format!("http://127.0.0.1:{port}/api/models"));
    opts.page_size = 2;
    opts.rate_limit = 50.0;
    opts.retry_backoff = Duration::from_millis(10);
    opts.checkpoint_dir = Some(checkpoints.path().to_path_buf());

    let snap = fetch_live(&opts).expect("harvest completes after one retry");
    println!("harvested {} records over {} pages", snap.len(), snap.stats.pages_fetched);
    let saved = load_checkpoint(checkpoints.path()).unwrap().expect("checkpoint written");
    println!(
        "checkpoint: {} pages, {} records, next page {:?}",
        saved.pages_completed,
        saved.records.len(),
        saved.next_url
    );

    server.unblock();
    handle.join().unwrap();
    snap
}

#[allow(dead_code)]
fn main() {
    run_example();
}
