use serde::{Deserialize, Serialize};

use super::RelationType;
use crate::ingest::ModelRecord;

/// Metadata field a parent link was read from, in extraction priority order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkSource {
    Tag,
    PeftConfig,
    CardBaseModel,
    CardDataBaseModel,
}

impl LinkSource {
    pub fn as_str(self) -> &'static str {
        match self {
            LinkSource::Tag => "tag",
            LinkSource::PeftConfig => "peft_config",
            LinkSource::CardBaseModel => "card_base_model",
            LinkSource::CardDataBaseModel => "card_data_base_model",
        }
    }
}

/// A candidate derivation edge, child → parent, before cleaning.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ParentLink {
    pub child_id: String,
    pub parent_id: String,
    pub relation: RelationType,
    pub source: LinkSource,
}

/// Links from one record plus the number of `base_model:*` tags that did
/// not fit the grammar.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Extraction {
    pub links: Vec<ParentLink>,
    pub ignored_tags: usize,
}

const TAG_PREFIX: &str = "base_model:";

/// Parent links declared by one record.
pub fn extract_links(record: &ModelRecord) -> Vec<ParentLink> {
    extract(record).links
}

/// Phased extraction. Tags are read first (`base_model:<relation>:<id>` or
/// the untyped `base_model:<id>`); only when they yield nothing are the
/// fallback fields consulted, in order: the PEFT config's base model
/// (an adapter), then `card_base_model`, then `card_data.base_model` (both
/// untyped). The first phase that yields a link ends the search.
pub fn extract(record: &ModelRecord) -> Extraction {
    let mut out = Extraction::default();
    let link = |parent: &str, relation, source| ParentLink {
        child_id: record.model_id.clone(),
        parent_id: parent.trim().to_string(),
        relation,
        source,
    };

    for tag in &record.tags {
        let Some(rest) = tag.strip_prefix(TAG_PREFIX) else {
            continue;
        };
        match rest.split_once(':') {
            Some((head, parent)) => match RelationType::from_tag(head) {
                Some(rel) if rel != RelationType::Unspecified => {
                    out.links.push(link(parent, rel, LinkSource::Tag))
                }
                _ => out.ignored_tags += 1,
            },
            None => out
                .links
                .push(link(rest, RelationType::Unspecified, LinkSource::Tag)),
        }
    }
    if !out.links.is_empty() {
        return out;
    }

    if let Some(peft) = &record.peft_base {
        out.links
            .push(link(peft, RelationType::Adapter, LinkSource::PeftConfig));
        return out;
    }

    for (values, source) in [
        (&record.card_base_model, LinkSource::CardBaseModel),
        (&record.card_data_base_model, LinkSource::CardDataBaseModel),
    ] {
        if !values.is_empty() {
            out.links.extend(
                values
                    .iter()
                    .map(|v| link(v, RelationType::Unspecified, source)),
            );
            return out;
        }
    }
    out
}
