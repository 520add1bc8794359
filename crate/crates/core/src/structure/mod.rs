//! Structural statistics of the lineage network: in-degree distributions,
//! power-law fits and weakly connected components.

mod degree;
mod powerlaw;
mod wcc;

pub use degree::{in_degrees, DegreeDistribution, DegreeScope};
pub use powerlaw::{fit_power_law, fit_power_law_samples, FitError, PowerLawFit, MIN_TAIL};
pub use wcc::{component_labels, weakly_connected_components, WccSummary};
