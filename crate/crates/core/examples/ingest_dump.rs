//! Read an offline metadata dump into a snapshot, leniently skipping rows
//! that lack a creation time, then persist it in canonical form.

use std::path::Path;

use hub_lineage::ingest::{read_dump, Snapshot, Strictness};

pub fn run_example() -> Snapshot {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");

    let snap = read_dump(&fixtures.join("mini.jsonl"), Strictness::Strict).expect("fixture reads");
    println!("mini.jsonl: {} records", snap.len());
    for rec in snap.iter().take(3) {
        println!("  {} ({} tags)", rec.model_id, rec.tags.len());
    }

    let partial = read_dump(&fixtures.join("missing_created.jsonl"), Strictness::Lenient)
        .expect("lenient read never fails on bad rows");
    println!(
        "missing_created.jsonl: kept {}, skipped {:?}",
        partial.len(),
        partial.stats.skipped
    );

    let out = tempfile::tempdir().expect("temp dir");
    let path = out.path().join("snapshot.jsonl");
    snap.persist(&path).expect("snapshot writes");
    println!("wrote {}", path.display());
    snap
}

#[allow(dead_code)]
fn main() {
    run_example();
}
