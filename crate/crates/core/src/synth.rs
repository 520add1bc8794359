//! Seeded synthetic snapshots with a hub-like lineage structure.
//!
//! Models arrive one at a time at exponentially distributed intervals.
//! Each is either a new base model or derives from earlier models, with
//! parents drawn by preferential attachment (probability proportional to
//! `in_degree + smoothing`) or uniformly. The same seed always yields the
//! same snapshot.

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ingest::{ModelRecord, Snapshot, SnapshotSource};
use crate::lineage::RelationType;
use crate::time::{PLATFORM_FLOOR, SECONDS_PER_DAY};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Attachment {
    Preferential,
    Uniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthOptions {
    pub nodes: usize,
    pub seed: u64,
    pub attachment: Attachment,
    /// Share of models (after the first) that are new base models.
    pub base_fraction: f64,
    /// Added to every in-degree when drawing preferentially.
    pub smoothing: f64,
    /// Mean spacing between consecutive creation times.
    pub mean_gap_days: f64,
    /// Relative weights of finetune, adapter, quantized and merge.
    pub relation_weights: [f64; 4],
    /// Share of adapters declared only through the PEFT config.
    pub peft_only_adapters: f64,
    /// Share of derived models declared only through an untyped card field.
    pub card_only: f64,
}

impl SynthOptions {
    pub fn new(nodes: usize, seed: u64) -> Self {
        SynthOptions {
            nodes,
            seed,
            attachment: Attachment::Preferential,
            base_fraction: 0.08,
            smoothing: 1.0,
            mean_gap_days: 0.5,
            relation_weights: [0.5, 0.2, 0.22, 0.08],
            peft_only_adapters: 0.3,
            card_only: 0.02,
        }
    }
}

const ORGS: [&str; 12] = [
    "acme", "bartowski", "TheBloke", "unsloth", "mlx-community", "nlp-lab", "qwen-fans",
    "open-llm", "sd-hub", "lora-works", "merge-kit", "tiny-models",
];
const FAMILIES: [&str; 6] = ["llama", "qwen", "mistral", "phi", "gemma", "falcon"];
const SIZES: [&str; 7] = ["350M", "1.5B", "3B", "7B", "14B", "70B", ""];

/// Generates a snapshot of `options.nodes` records.
pub fn generate(options: &SynthOptions) -> Snapshot {
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let relation_dist =
        WeightedIndex::new(options.relation_weights).expect("relation weights must be positive");

    let mut ids: Vec<String> = Vec::with_capacity(options.nodes);
    let mut sizes: Vec<&str> = Vec::with_capacity(options.nodes);
    let mut first_parent: Vec<Option<usize>> = Vec::with_capacity(options.nodes);
    // One entry per typed edge target; a uniform pick from it is a pick
    // proportional to in-degree.
    let mut targets: Vec<usize> = Vec::new();
    let mut records = Vec::with_capacity(options.nodes);
    let mut t = PLATFORM_FLOOR as f64 + SECONDS_PER_DAY as f64;

    for i in 0..options.nodes {
        let u: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
        t += -u.ln() * options.mean_gap_days * SECONDS_PER_DAY as f64;
        let created_at = t as i64;

        let is_base = i == 0 || rng.gen_bool(options.base_fraction);
        let mut tags = vec!["transformers".to_string()];
        let mut peft_base = None;
        let mut card = Vec::new();
        let org = ORGS[rng.gen_range(0..ORGS.len())];

        let (id, size, parent) = if is_base {
            let family = FAMILIES[rng.gen_range(0..FAMILIES.len())];
            let size = SIZES[rng.gen_range(0..SIZES.len())];
            (name(org, family, size, "base", i), size, None)
        } else {
            let relation = RelationType::TYPED[relation_dist.sample(&mut rng)];
            let p = draw_parent(&mut rng, options, i, &targets);
            let size = if rng.gen_bool(0.85) {
                sizes[p]
            } else {
                SIZES[rng.gen_range(0..SIZES.len())]
            };
            let family = FAMILIES[i % FAMILIES.len()];
            let id = name(org, family, size, suffix(relation), i);

            let mut parents = vec![p];
            if relation == RelationType::Merge {
                let second = match first_parent[p] {
                    Some(gp) if rng.gen_bool(0.5) => gp,
                    _ => draw_parent(&mut rng, options, i, &targets),
                };
                if second != p {
                    parents.push(second);
                }
            }

            if rng.gen_bool(options.card_only) {
                card.push(ids[p].clone());
                (id, size, None)
            } else if relation == RelationType::Adapter && rng.gen_bool(options.peft_only_adapters) {
                peft_base = Some(ids[p].clone());
                targets.push(p);
                (id, size, Some(p))
            } else {
                for &q in &parents {
                    tags.push(format!("base_model:{}:{}", relation.as_str(), ids[q]));
                    targets.push(q);
                }
                (id, size, Some(p))
            }
        };

        records.push(ModelRecord {
            model_id: id.clone(),
            created_at,
            tags,
            peft_base,
            card_base_model: Vec::new(),
            card_data_base_model: card,
            raw_field_count: 6,
        });
        ids.push(id);
        sizes.push(size);
        first_parent.push(parent);
    }

    let mut snap = Snapshot::from_records(records, SnapshotSource::OfflineDump);
    snap.retrieved_at = t as i64 + SECONDS_PER_DAY;
    snap
}

fn draw_parent<R: Rng>(rng: &mut R, options: &SynthOptions, i: usize, targets: &[usize]) -> usize {
    match options.attachment {
        Attachment::Uniform => rng.gen_range(0..i),
        Attachment::Preferential => {
            let flat = options.smoothing * i as f64;
            if targets.is_empty() || rng.gen_bool(flat / (flat + targets.len() as f64)) {
                rng.gen_range(0..i)
            } else {
                targets[rng.gen_range(0..targets.len())]
            }
        }
    }
}

fn suffix(relation: RelationType) -> &'static str {
    match relation {
        RelationType::Finetune => "instruct",
        RelationType::Adapter => "lora",
        RelationType::Quantized => "GGUF",
        RelationType::Merge => "merged",
        RelationType::Unspecified => "derived",
    }
}

fn name(org: &str, family: &str, size: &str, kind: &str, i: usize) -> String {
    if size.is_empty() {
        format!("{org}/{family}-{kind}-{i:06}")
    } else {
        format!("{org}/{family}-{size}-{kind}-{i:06}")
    }
}
