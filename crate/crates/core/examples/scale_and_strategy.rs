//! Parameter scale read from model ids, and MDI summarized by scale bucket
//! and by derivation strategy.

use hub_lineage::analytics::{extract_param_scale, group_summaries, GroupSummaries};
use hub_lineage::disruption::{mdi_sweep, DEFAULT_EPSILON, MAIN_WINDOW_DAYS};
use hub_lineage::lineage::build_graph;
use hub_lineage::synth::{generate, SynthOptions};

pub fn run_example() -> GroupSummaries {
    for id in [
        "Qwen/Qwen2.5-14B-Instruct",
        "Qwen/Qwen2.5-0.5B",
        "EleutherAI/gpt-neo-2.7b",
        "org/llama-7B-gguf-4B-quant",
        "TheBloke/Mixtral-8x7B-v0.1-GGUF",
    ] {
        let s = extract_param_scale(id);
        println!("{id:<34} {:?} -> {}{}", s.raw, s.bucket.as_str(), if s.is_ambiguous() { " (ambiguous)" } else { "" });
    }

    let (graph, _) = build_graph(&generate(&SynthOptions::new(6000, 9)));
    let rows = mdi_sweep(&graph, &[MAIN_WINDOW_DAYS], DEFAULT_EPSILON).unwrap();
    let groups = group_summaries(&rows, &graph);
    for s in groups.by_scale.iter().chain(&groups.by_relation) {
        println!(
            "{:<10} n {:>5}  median {:+.4}  positive {:.3}",
            s.label,
            s.n,
            s.median.unwrap_or(f64::NAN),
            s.positive_fraction.unwrap_or(f64::NAN)
        );
    }
    groups
}

#[allow(dead_code)]
fn main() {
    run_example();
}
