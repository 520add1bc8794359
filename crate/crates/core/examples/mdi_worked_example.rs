//! MDI of a single intermediate model. Within 90 days of its release it
//! gets three derivatives of its own, one merge that also uses its parent,
//! and its parent gets two more derivatives that bypass it.

use std::path::Path;

use hub_lineage::disruption::{classify_subsequent, evaluate, MdiResult, DEFAULT_EPSILON};
use hub_lineage::ingest::{read_dump, Strictness};
use hub_lineage::lineage::build_graph;

pub fn run_example() -> MdiResult {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/figure2.jsonl");
    let (graph, _) = build_graph(&read_dump(&path, Strictness::Strict).unwrap());
    let focal = "lab/focal-7B-instruct";

    let classes = classify_subsequent(&graph, focal, 90).unwrap();
    for (label, members) in [("X", &classes.x), ("Y", &classes.y), ("Z", &classes.z)] {
        let ids: Vec<&str> = members.iter().map(|&i| graph.node(i).model_id.as_str()).collect();
        println!("{label}: {ids:?}");
    }
    let result = evaluate(&graph, focal, 90, DEFAULT_EPSILON).unwrap();
    println!(
        "MDI = ({} - {}) / ({} + {} + {} + eps) = {:.3}",
        result.x_count, result.z_count, result.x_count, result.y_count, result.z_count, result.mdi
    );
    result
}

#[allow(dead_code)]
fn main() {
    run_example();
}
