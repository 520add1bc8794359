//! The command-line pipeline end to end: generate a synthetic snapshot,
//! then analyze it into CSV tables and a JSON report bundle.

use hub_lineage::cli;

/// Exit codes of the two commands and the files written.
pub fn run_example() -> (i32, i32, Vec<String>) {
    let dir = tempfile::tempdir().expect("temp dir");
    let snapshot = dir.path().join("synth.jsonl");
    let out = dir.path().join("analysis");

    let synth = cli::run([
        "hub-lineage", "synth", "--nodes", "3000", "--seed", "7", "--out", snapshot.to_str().unwrap(),
    ]);
    let analyze = cli::run([
        "hub-lineage", "analyze", "--snapshot", snapshot.to_str().unwrap(),
        "--out-dir", out.to_str().unwrap(), "--windows", "30,90,180",
    ]);

    let mut files: Vec<String> = std::fs::read_dir(&out)
        .map(|entries| entries.map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect())
        .unwrap_or_default();
    files.sort();
    println!("synth exited {synth}, analyze exited {analyze}");
    println!("wrote {}", files.join(", "));
    (synth, analyze, files)
}

#[allow(dead_code)]
fn main() {
    run_example();
}
