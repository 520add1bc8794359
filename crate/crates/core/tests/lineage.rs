mod common;

use std::collections::BTreeSet;

use common::{fixture, random_snapshot};
use hub_lineage::ingest::{read_dump, ModelRecord, Snapshot, SnapshotSource, Strictness};
use hub_lineage::lineage::export::{read_exports, write_edge_list, write_exports};
use hub_lineage::lineage::{build_graph, Role, RelationType};
use proptest::prelude::*;

fn load(name: &str) -> Snapshot {
    read_dump(&fixture(name), Strictness::Strict).unwrap()
}

#[test]
fn figure1_edges_and_census() {
    let (graph, report) = build_graph(&load("figure1.jsonl"));
    let mut edges = Vec::new();
    write_edge_list(&graph, &mut edges).unwrap();
    let expected = std::fs::read_to_string(fixture("figure1.edges.tsv")).unwrap();
    assert_eq!(String::from_utf8(edges).unwrap(), expected);

    let census = graph.census();
    assert_eq!(
        (census.nodes, census.edges, census.base, census.finetuned, census.quantized, census.merged),
        (5, 4, 2, 1, 1, 1)
    );
    assert_eq!(census.adapter, 0);
    assert!((census.mean_degree - 1.6).abs() < 1e-12);
    // the card field repeats the tag and is never consulted
    assert_eq!(report.card_links_dropped, 0);
    assert!(report.reconciles());

    let instruct = graph.node_roles("Qwen/Qwen2.5-7B-Instruct").unwrap();
    assert!(instruct.contains(Role::Finetuned));
    assert_eq!(instruct.len(), 1);
    let eagle = graph.node_roles("nvidia/Eagle2.5-8B").unwrap();
    assert!(eagle.contains(Role::Merged));
}

#[test]
fn adversarial_cleaning_counts() {
    let (graph, report) = build_graph(&load("adversarial.jsonl"));
    assert_eq!(report.raw_links, 12);
    assert_eq!(report.dropped.empty_parent, 1);
    assert_eq!(report.dropped.self_loop, 1);
    assert_eq!(report.dropped.unspecified, 2);
    assert_eq!(report.card_links_dropped, 1);
    assert_eq!(report.dropped.duplicate, 1);
    assert_eq!(report.relation_conflicts, 1);
    assert_eq!(report.dropped.cycle_break, 1);
    assert_eq!(report.stub_nodes, 1);
    assert_eq!(report.parentless_after_cleaning, 2);
    assert_eq!(report.edges, 6);
    assert_eq!(graph.edge_count(), report.raw_links - report.dropped.total());
    assert!(graph.topological_order().is_some());

    // the cycle loses the edge of its earlier child
    let a = graph.index_of("org/cycle-a").unwrap();
    let b = graph.index_of("org/cycle-b").unwrap();
    assert!(!graph.has_edge(a, b));
    assert!(graph.has_edge(b, a));

    let dup = graph.index_of("org/duplicate").unwrap();
    assert_eq!(graph.parents_of(dup)[0].1, RelationType::Finetune);
    let stub = graph.index_of("missing/upstream").unwrap();
    assert!(graph.node(stub).stub);
    assert_eq!(graph.node(stub).created_at, None);
}

#[test]
fn empty_snapshot_builds_empty_graph() {
    let (graph, report) = build_graph(&load("empty.jsonl"));
    assert!(graph.is_empty());
    assert_eq!(report.edges, 0);
    assert!(report.reconciles());
}

#[test]
fn exports_round_trip() {
    for snap in [load("mini.jsonl"), load("adversarial.jsonl"), random_snapshot(4, 400)] {
        let (graph, _) = build_graph(&snap);
        let dir = tempfile::tempdir().unwrap();
        write_exports(&graph, dir.path()).unwrap();
        let again = read_exports(dir.path()).unwrap();
        assert_eq!(again.nodes(), graph.nodes());
        assert_eq!(again.edges(), graph.edges());
    }
}

#[test]
fn corrupt_export_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("nodes.tsv"), "a\t2024-01-01T00:00:00Z\t\t\n").unwrap();
    std::fs::write(dir.path().join("edges.tsv"), "a\tb\tfinetune\n").unwrap();
    assert!(read_exports(dir.path()).is_err());
    std::fs::write(dir.path().join("edges.tsv"), "a\ta\n").unwrap();
    assert!(read_exports(dir.path()).is_err());
}

const POOL: usize = 12;

fn pool_id(i: usize) -> String {
    format!("org/m{i}")
}

prop_compose! {
    fn messy_record(i: usize)(
        created in 0i64..400,
        parents in proptest::collection::vec((0usize..POOL + 3, 0usize..7), 0..4),
    ) -> ModelRecord {
        let tags = parents
            .into_iter()
            .map(|(p, kind)| {
                // indices past the pool are missing parents or empty ids
                let parent = match p {
                    p if p < POOL => pool_id(p),
                    p if p == POOL => String::new(),
                    p => format!("gone/x{p}"),
                };
                match kind {
                    0 => format!("base_model:{parent}"),
                    1 => format!("base_model:bogus:{parent}"),
                    k => format!("base_model:{}:{parent}", RelationType::TYPED[k % 4].as_str()),
                }
            })
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        ModelRecord {
            model_id: pool_id(i),
            created_at: 1_700_000_000 + created * 86_400,
            tags,
            peft_base: None,
            card_base_model: vec![],
            card_data_base_model: vec![],
            raw_field_count: 3,
        }
    }
}

fn messy_snapshot() -> impl Strategy<Value = Snapshot> {
    (0..POOL)
        .map(messy_record)
        .collect::<Vec<_>>()
        .prop_map(|recs| Snapshot::from_records(recs, SnapshotSource::OfflineDump))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn cleaned_graph_is_a_reconciled_dag(snap in messy_snapshot()) {
        let (graph, report) = build_graph(&snap);
        prop_assert!(graph.topological_order().is_some());
        prop_assert!(report.reconciles());
        prop_assert_eq!(report.edges, graph.edge_count());
        let mut pairs = BTreeSet::new();
        for e in graph.edges() {
            prop_assert_ne!(e.child, e.parent);
            prop_assert_ne!(e.relation, RelationType::Unspecified);
            prop_assert!(pairs.insert((e.child, e.parent)));
            prop_assert!(!graph.node(e.child).stub);
        }
        let stubs = graph.nodes().iter().filter(|n| n.stub).count();
        prop_assert_eq!(stubs, report.stub_nodes);
        prop_assert_eq!(graph.node_count(), snap.len() + stubs);
    }
}

#[test]
fn synthetic_snapshots_are_reconciled_dags() {
    for seed in 0..10 {
        let (graph, report) = build_graph(&random_snapshot(seed, 1000));
        assert!(graph.topological_order().is_some());
        assert!(report.reconciles(), "seed {seed}");
    }
}
