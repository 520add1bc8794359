//! Release volume and the share of disruptive models per month, MDI by
//! period between major releases, and sensitivity to the window length.

use hub_lineage::analytics::{default_period_boundaries, temporal_report, TemporalReport};
use hub_lineage::disruption::{mdi_sweep, DEFAULT_EPSILON, MAIN_WINDOW_DAYS, SENSITIVITY_WINDOWS};
use hub_lineage::lineage::build_graph;
use hub_lineage::synth::{generate, SynthOptions};

pub fn run_example() -> TemporalReport {
    let (graph, _) = build_graph(&generate(&SynthOptions::new(5000, 13)));
    let rows = mdi_sweep(&graph, &SENSITIVITY_WINDOWS, DEFAULT_EPSILON).unwrap();
    let report = temporal_report(&rows, &graph, &default_period_boundaries(), MAIN_WINDOW_DAYS)
        .expect("default boundaries are sorted");

    for m in report.monthly.iter().step_by(6) {
        println!(
            "{}  new {:>4}  eligible {:>4}  positive share {}",
            m.month,
            m.new_models,
            m.eligible,
            m.positive_fraction.map_or("-".to_string(), |f| format!("{f:.3}"))
        );
    }
    for p in &report.periods {
        println!("{:<26} n {:>5}  mean {:?}", p.summary.label, p.summary.n, p.summary.mean);
    }
    for w in &report.windows {
        println!("{:>3} days  median {:?}", w.window_days, w.summary.median);
    }
    report
}

#[allow(dead_code)]
fn main() {
    run_example();
}
