//! How MDI varies with a model's number of direct derivatives: Spearman's
//! rank correlation and a LOWESS curve, with the in-degree where the curve
//! turns positive.

use hub_lineage::analytics::{in_degree_trend, TrendFit, TrendOptions};
use hub_lineage::disruption::{mdi_sweep, DEFAULT_EPSILON, MAIN_WINDOW_DAYS};
use hub_lineage::lineage::build_graph;
use hub_lineage::synth::{generate, SynthOptions};

pub fn run_example() -> TrendFit {
    let (graph, _) = build_graph(&generate(&SynthOptions::new(8000, 4)));
    let rows = mdi_sweep(&graph, &[MAIN_WINDOW_DAYS], DEFAULT_EPSILON).unwrap();
    let fit = in_degree_trend(&rows, &graph, TrendOptions::default()).expect("enough models");

    println!("{} models, Spearman rho {:?}", fit.n, fit.spearman_rho);
    for p in fit.points.iter().step_by((fit.points.len() / 8).max(1)) {
        println!("  in-degree {:>4}: smoothed MDI {:+.3}", p.in_degree, p.smoothed_mdi);
    }
    match fit.zero_crossing {
        Some(x) => println!("curve turns positive near in-degree {x:.1}"),
        None => println!("curve never turns positive"),
    }

    let log = in_degree_trend(&rows, &graph, TrendOptions { log_x: true, ..TrendOptions::default() })
        .unwrap();
    println!("log-x zero crossing: {:?}", log.zero_crossing);
    fit
}

#[allow(dead_code)]
fn main() {
    run_example();
}
