//! Helpers shared by the integration tests: fixture paths, a mock model
//! listing server, seeded random snapshots and brute-force oracles.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::{self, JoinHandle};

use hub_lineage::analytics::ScaleBucket;
use hub_lineage::ingest::Snapshot;
use hub_lineage::lineage::LineageGraph;
use hub_lineage::synth::{generate, Attachment, SynthOptions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zeta};
use serde_json::Value;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

/// Paginated listing served from memory. Page `k` lives at
/// `/api/models?page=k`; the first request carries no page parameter.
pub struct MockHub {
    pub url: String,
    pub requests: Arc<AtomicUsize>,
    /// Remaining forced failures per page index.
    pub failures: Arc<Mutex<HashMap<usize, (u16, usize)>>>,
    server: Arc<tiny_http::Server>,
    handle: Option<JoinHandle<()>>,
}

impl MockHub {
    pub fn start(pages: Vec<Value>) -> Self {
        let server = Arc::new(tiny_http::Server::http("127.0.0.1:0").expect("bind mock server"));
        let port = server.server_addr().to_ip().expect("ip listener").port();
        let requests = Arc::new(AtomicUsize::new(0));
        let failures: Arc<Mutex<HashMap<usize, (u16, usize)>>> = Arc::default();

        let handle = {
            let server = Arc::clone(&server);
            let requests = Arc::clone(&requests);
            let failures = Arc::clone(&failures);
            thread::spawn(move || {
                for req in server.incoming_requests() {
                    requests.fetch_add(1, Ordering::SeqCst);
                    let page = page_of(req.url());
                    let forced = {
                        let mut f = failures.lock().unwrap();
                        match f.get_mut(&page) {
                            Some((code, left)) if *left > 0 => {
                                *left -= 1;
                                Some(*code)
                            }
                            _ => None,
                        }
                    };
                    let resp = if let Some(code) = forced {
                        tiny_http::Response::from_string("unavailable").with_status_code(code)
                    } else if let Some(body) = pages.get(page) {
                        let mut resp = tiny_http::Response::from_string(body.to_string());
                        if page + 1 < pages.len() {
                            let link = format!("</api/models?page={}>; rel=\"next\"", page + 1);
                            resp = resp.with_header(
                                tiny_http::Header::from_bytes("Link", link.as_bytes()).unwrap(),
                            );
                        }
                        resp
                    } else {
                        tiny_http::Response::from_string("no such page").with_status_code(404)
                    };
                    let _ = req.respond(resp);
                }
            })
        };

        MockHub {
            url: format!("http://127.0.0.1:{port}/api/models"),
            requests,
            failures,
            server,
            handle: Some(handle),
        }
    }

    pub fn fail_page(&self, page: usize, status: u16, times: usize) {
        self.failures.lock().unwrap().insert(page, (status, times));
    }

    pub fn request_count(&self) -> usize {
        self.requests.load(Ordering::SeqCst)
    }
}

impl Drop for MockHub {
    fn drop(&mut self) {
        self.server.unblock();
        if let Some(h) = self.handle.take() {
            let _ = h.join();
        }
    }
}

fn page_of(url: &str) -> usize {
    url.split_once('?')
        .into_iter()
        .flat_map(|(_, q)| q.split('&'))
        .find_map(|kv| kv.strip_prefix("page="))
        .and_then(|v| v.parse().ok())
        .unwrap_or(0)
}

/// API-shaped rows, `per_page` to a page.
pub fn api_pages(pages: usize, per_page: usize) -> Vec<Value> {
    (0..pages)
        .map(|p| {
            Value::Array(
                (0..per_page)
                    .map(|i| {
                        let n = p * per_page + i;
                        let mut tags = vec!["transformers".to_string()];
                        if n > 0 {
                            tags.push(format!("base_model:finetune:org/model-{}", n - 1));
                        }
                        serde_json::json!({
                            "id": format!("org/model-{n}"),
                            "createdAt": format!("2024-03-{:02}T00:00:00.000Z", n + 1),
                            "tags": tags,
                        })
                    })
                    .collect(),
            )
        })
        .collect()
}

/// Seeded synthetic snapshot; odd seeds attach uniformly, even seeds
/// preferentially, and the arrival rate varies so windows cut differently.
pub fn random_snapshot(seed: u64, nodes: usize) -> Snapshot {
    let mut opts = SynthOptions::new(nodes, seed);
    opts.attachment = if seed % 2 == 0 {
        Attachment::Preferential
    } else {
        Attachment::Uniform
    };
    opts.mean_gap_days = [0.1, 0.4, 1.0][(seed % 3) as usize];
    opts.base_fraction = 0.05 + 0.05 * (seed % 4) as f64;
    generate(&opts)
}

/// Component partition by breadth-first search over the undirected edges.
pub fn bfs_partition(graph: &LineageGraph) -> BTreeSet<BTreeSet<usize>> {
    let n = graph.node_count();
    let mut adj = vec![Vec::new(); n];
    for e in graph.edges() {
        adj[e.child].push(e.parent);
        adj[e.parent].push(e.child);
    }
    let mut seen = vec![false; n];
    let mut parts = BTreeSet::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut comp = BTreeSet::new();
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            comp.insert(v);
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        parts.insert(comp);
    }
    parts
}

/// Groups node indices by label.
pub fn partition_of(labels: &[usize]) -> BTreeSet<BTreeSet<usize>> {
    let mut groups: HashMap<usize, BTreeSet<usize>> = HashMap::new();
    for (i, &l) in labels.iter().enumerate() {
        groups.entry(l).or_default().insert(i);
    }
    groups.into_values().collect()
}

/// Draws from `P(k) ∝ k^-alpha` for `k >= x_min` by rejection from a zeta
/// distribution.
pub fn discrete_power_law(n: usize, alpha: f64, x_min: u64, seed: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let zeta = Zeta::new(alpha).expect("alpha > 1");
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let k = zeta.sample(&mut rng);
        if k >= x_min as f64 && k < u64::MAX as f64 {
            out.push(k as u64);
        }
    }
    out
}

/// `(id, parameters, bucket, ambiguous)`.
pub const SCALE_CASES: [(&str, Option<f64>, ScaleBucket, bool); 22] = [
    ("Qwen/Qwen2.5-14B-Instruct", Some(14e9), ScaleBucket::Large, false),
    ("org/tiny-350M-chat", Some(3.5e8), ScaleBucket::Small, false),
    ("org/llama-v2-base", None, ScaleBucket::Unknown, false),
    ("org/model-1B", Some(1e9), ScaleBucket::Medium, false),
    ("org/model-10B", Some(1e10), ScaleBucket::Medium, false),
    ("org/model-10.5B", Some(1.05e10), ScaleBucket::Large, false),
    ("Qwen/Qwen2.5-0.5B", Some(5e8), ScaleBucket::Small, false),
    ("EleutherAI/gpt-neo-2.7b", Some(2.7e9), ScaleBucket::Medium, false),
    ("meta-llama/Llama-2-70b-chat-hf", Some(7e10), ScaleBucket::Large, false),
    ("org/llama-7B-gguf-4B-quant", Some(4e9), ScaleBucket::Medium, true),
    ("org/model-F16", None, ScaleBucket::Unknown, false),
    ("org/B16-model", None, ScaleBucket::Unknown, false),
    ("org/x7B", None, ScaleBucket::Unknown, false),
    ("org/7Bx", None, ScaleBucket::Unknown, false),
    ("org/phi_1.5B", Some(1.5e9), ScaleBucket::Medium, false),
    ("org/bert-110M-uncased", Some(1.1e8), ScaleBucket::Small, false),
    ("7B", Some(7e9), ScaleBucket::Medium, false),
    ("org/model-999M", Some(9.99e8), ScaleBucket::Small, false),
    ("org/model-1000M", Some(1e9), ScaleBucket::Medium, false),
    ("TheBloke/Mixtral-8x7B-v0.1-GGUF", None, ScaleBucket::Unknown, false),
    ("org/Model-0B", None, ScaleBucket::Unknown, false),
    ("org/model-13b.Q4_K_M", Some(1.3e10), ScaleBucket::Large, false),
];
