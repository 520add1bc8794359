//! MDI for every intermediate model of a synthetic hub, across observation
//! windows from one to six months. Longer windows see more derivatives of
//! both the focal models and their parents.

use hub_lineage::analytics::mdi_overview;
use hub_lineage::disruption::{mdi_sweep, DEFAULT_EPSILON, SENSITIVITY_WINDOWS};
use hub_lineage::lineage::build_graph;
use hub_lineage::synth::{generate, SynthOptions};

/// `(window, x, y, z)` totals.
pub fn run_example() -> Vec<(u32, u64, u64, u64)> {
    let (graph, _) = build_graph(&generate(&SynthOptions::new(4000, 11)));
    let rows = mdi_sweep(&graph, &SENSITIVITY_WINDOWS, DEFAULT_EPSILON).unwrap();

    let mut totals = Vec::new();
    for w in SENSITIVITY_WINDOWS {
        let (mut x, mut y, mut z) = (0, 0, 0);
        for r in rows.iter().filter(|r| r.window_days == w) {
            x += r.x_count;
            y += r.y_count;
            z += r.z_count;
        }
        let o = mdi_overview(&rows, w);
        println!(
            "{w:>3} days: x {x:>5} y {y:>4} z {z:>6}  mean MDI {:+.3}  empty windows {}",
            o.summary.mean.unwrap_or(0.0),
            o.empty_window
        );
        totals.push((w, x, y, z));
    }
    totals
}

#[allow(dead_code)]
fn main() {
    run_example();
}
