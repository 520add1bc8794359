mod common;

use common::fixture;
use hub_lineage::ingest::{normalize, read_dump, read_dump_from, IngestError, ModelRecord, Strictness};
use proptest::prelude::*;

#[test]
fn mini_dump_reads_every_row() {
    let snap = read_dump(&fixture("mini.jsonl"), Strictness::Strict).unwrap();
    assert_eq!(snap.len(), 10);
    assert_eq!(snap.stats.skipped_total(), 0);
    let lora = snap.get("someone/llama-8B-sql-lora").unwrap();
    assert_eq!(lora.peft_base.as_deref(), Some("meta-llama/Llama-3.1-8B-Instruct"));
    let tiny = snap.get("student/qwen-0.5B-tiny").unwrap();
    assert_eq!(tiny.card_data_base_model, ["Qwen/Qwen2.5-0.5B-Instruct"]);
}

#[test]
fn missing_creation_time_lenient_and_strict() {
    let path = fixture("missing_created.jsonl");
    let snap = read_dump(&path, Strictness::Lenient).unwrap();
    assert_eq!(snap.len(), 2);
    assert_eq!(snap.stats.skipped["missing_created_at"], 1);

    match read_dump(&path, Strictness::Strict) {
        Err(IngestError::BadLine { line, reason }) => {
            assert_eq!(line, 2);
            assert_eq!(reason, "missing_created_at");
        }
        other => panic!("expected a bad line, got {other:?}"),
    }
}

#[test]
fn missing_file_is_a_read_error() {
    assert!(matches!(
        read_dump(&fixture("does-not-exist.jsonl"), Strictness::Lenient),
        Err(IngestError::Read { .. })
    ));
}

#[test]
fn duplicates_keep_the_last_row() {
    let text = concat!(
        "{\"id\":\"a/b\",\"createdAt\":\"2024-01-01\",\"tags\":[\"x\"]}\n",
        "\n",
        "not json\n",
        "{\"id\":\"a/b\",\"createdAt\":\"2024-01-02\",\"tags\":[\"y\"]}\n",
    );
    let snap = read_dump_from(text.as_bytes(), Strictness::Lenient).unwrap();
    assert_eq!(snap.len(), 1);
    assert_eq!(snap.stats.duplicates, 1);
    assert_eq!(snap.stats.skipped["invalid_json"], 1);
    assert_eq!(snap.get("a/b").unwrap().tags, ["y"]);
}

#[test]
fn persisted_snapshot_reads_back_identically() {
    let snap = read_dump(&fixture("mini.jsonl"), Strictness::Strict).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("snap.jsonl");
    snap.persist(&path).unwrap();
    let again = read_dump(&path, Strictness::Strict).unwrap();
    assert_eq!(snap.records, again.records);

    let path2 = dir.path().join("snap2.jsonl");
    again.persist(&path2).unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&path2).unwrap());
}

fn id() -> impl Strategy<Value = String> {
    "[a-zA-Z0-9_-]{1,8}/[a-zA-Z0-9._-]{1,12}"
}

prop_compose! {
    fn record()(
        model_id in id(),
        created_at in 1_500_000_000i64..1_800_000_000,
        tags in proptest::collection::vec("[a-z:/0-9._-]{1,20}", 0..5),
        peft in proptest::option::of(id()),
        card in proptest::collection::vec(id(), 0..3),
        card_data in proptest::collection::vec(id(), 0..3),
        raw_field_count in 1usize..40,
    ) -> ModelRecord {
        let mut uniq: Vec<String> = Vec::new();
        for t in tags {
            if !uniq.contains(&t) {
                uniq.push(t);
            }
        }
        ModelRecord {
            model_id,
            created_at,
            tags: uniq,
            peft_base: peft,
            card_base_model: card,
            card_data_base_model: card_data,
            raw_field_count,
        }
    }
}

proptest! {
    #[test]
    fn canonical_line_round_trips(rec in record()) {
        let value: serde_json::Value = serde_json::from_str(&rec.to_json_line()).unwrap();
        prop_assert_eq!(normalize(&value).unwrap(), rec);
    }
}
