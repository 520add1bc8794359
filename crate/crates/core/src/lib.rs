//! Model lineage networks reconstructed from hub metadata, and the Model
//! Disruption Index (MDI) computed over them.
//!
//! The pipeline runs in stages that compose through files:
//!
//! 1. [`ingest`] reads model metadata from a newline-delimited dump or the
//!    hub's paginated model API and produces a [`ingest::Snapshot`].
//! 2. [`lineage`] extracts typed parent links from each record, cleans them
//!    and assembles an immutable [`lineage::LineageGraph`] (a DAG whose edges
//!    point from a derived model to the model it was built from).
//! 3. [`structure`] computes in-degree distributions, a discrete power-law
//!    fit and the weakly connected component census.
//! 4. [`disruption`] classifies the subsequent models of every intermediate
//!    model inside an observation window and computes
//!    `MDI = (X - Z) / (X + Y + Z + eps)`.
//! 5. [`analytics`] summarizes MDI values by in-degree, parameter scale,
//!    derivation strategy and time.
//!
//! [`cli`] wires the stages into subcommands; [`synth`] generates seeded
//! synthetic snapshots for testing at desk scale.

pub mod analytics;
pub mod cli;
pub mod disruption;
pub mod ingest;
pub mod lineage;
pub mod structure;
pub mod synth;
pub mod time;

pub use disruption::{compute_mdi, MdiResult, DEFAULT_EPSILON, MAIN_WINDOW_DAYS};
pub use ingest::{ModelRecord, Snapshot};
pub use lineage::{build_graph, CleaningReport, LineageGraph, RelationType};
