//! In-degree distributions of a synthetic hub, overall and per relation
//! type, with a discrete power-law fit of each tail.

use hub_lineage::lineage::build_graph;
use hub_lineage::structure::{fit_power_law, in_degrees, DegreeScope, FitError, PowerLawFit};
use hub_lineage::synth::{generate, SynthOptions};

pub fn run_example() -> Result<PowerLawFit, FitError> {
    let (graph, _) = build_graph(&generate(&SynthOptions::new(20_000, 5)));

    let mut overall = None;
    for scope in DegreeScope::ALL {
        let dist = in_degrees(&graph, scope);
        let fit = fit_power_law(&dist, None);
        match &fit {
            Ok(f) => println!(
                "{:<9} max degree {:>4}  alpha {:.3} ± {:.3}  x_min {}  D {:.4}  tail {}",
                scope.as_str(),
                dist.max_degree().unwrap_or(0),
                f.alpha,
                f.alpha_std_err,
                f.x_min,
                f.ks_d,
                f.n_tail
            ),
            Err(e) => println!("{:<9} no fit: {e}", scope.as_str()),
        }
        if scope == DegreeScope::Overall {
            overall = Some(fit);
        }
    }
    overall.expect("overall scope is listed")
}

#[allow(dead_code)]
fn main() {
    run_example().ok();
}
