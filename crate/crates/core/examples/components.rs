//! Weakly connected components: families of models linked by any chain of
//! derivations, regardless of direction.

use hub_lineage::lineage::build_graph;
use hub_lineage::structure::{weakly_connected_components, WccSummary};
use hub_lineage::synth::{generate, SynthOptions};

pub fn run_example() -> WccSummary {
    let (graph, _) = build_graph(&generate(&SynthOptions::new(10_000, 21)));
    let wcc = weakly_connected_components(&graph);
    println!(
        "{} components; the largest holds {} models ({:.1}%) and {} edges",
        wcc.component_count,
        wcc.component_sizes[0],
        100.0 * wcc.largest_share,
        wcc.largest_component_edges
    );
    println!("ten largest: {:?}", &wcc.component_sizes[..wcc.component_sizes.len().min(10)]);
    let singletons = wcc.component_sizes.iter().filter(|&&s| s == 1).count();
    println!("isolated models: {singletons}");
    wcc
}

#[allow(dead_code)]
fn main() {
    run_example();
}
