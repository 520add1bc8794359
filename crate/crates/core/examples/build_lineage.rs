//! Build the lineage graph of a small hub neighbourhood: a base model, its
//! instruct finetune, a quantized build of that, and a multimodal merge.

use std::path::Path;

use hub_lineage::ingest::{read_dump, Strictness};
use hub_lineage::lineage::export::write_edge_list;
use hub_lineage::lineage::{build_graph, Census};

pub fn run_example() -> Census {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/figure1.jsonl");
    let snapshot = read_dump(&path, Strictness::Strict).expect("fixture reads");
    let (graph, report) = build_graph(&snapshot);

    let mut edges = Vec::new();
    write_edge_list(&graph, &mut edges).unwrap();
    print!("{}", String::from_utf8(edges).unwrap());

    for node in graph.nodes() {
        let idx = graph.index_of(&node.model_id).unwrap();
        println!(
            "{:<40} children {}  parents {}  roles {}",
            node.model_id,
            graph.in_degree(idx),
            graph.out_degree(idx),
            graph.roles(idx)
        );
    }
    let census = graph.census();
    println!("{census:?}");
    println!("raw links {}, dropped {:?}", report.raw_links, report.dropped);
    census
}

#[allow(dead_code)]
fn main() {
    run_example();
}
