use serde::Serialize;
use serde_json::{Map, Value};

use crate::time::{format_timestamp, parse_timestamp, PLATFORM_FLOOR};

/// One hub model's metadata row, reduced to the fields lineage extraction
/// needs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelRecord {
    pub model_id: String,
    /// Seconds since the Unix epoch, UTC.
    pub created_at: i64,
    pub tags: Vec<String>,
    /// `config_peft_base_model_name_or_path`.
    pub peft_base: Option<String>,
    /// Values found under `card_base_model`, lifted to a list.
    pub card_base_model: Vec<String>,
    /// Values found under `card_data.base_model`, lifted to a list.
    pub card_data_base_model: Vec<String>,
    /// Number of metadata fields present in the source row.
    pub raw_field_count: usize,
}

impl ModelRecord {
    /// Union of both card fields, first occurrence wins.
    pub fn card_base(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for value in self.card_base_model.iter().chain(&self.card_data_base_model) {
            if !out.contains(&value.as_str()) {
                out.push(value);
            }
        }
        out
    }

    pub fn before_platform_floor(&self) -> bool {
        self.created_at < PLATFORM_FLOOR
    }

    /// Canonical JSON line, the format snapshot files are written in. Reading
    /// it back through [`normalize`] yields an identical record.
    pub fn to_json_line(&self) -> String {
        #[derive(Serialize)]
        struct CardData<'a> {
            base_model: &'a [String],
        }
        #[derive(Serialize)]
        struct Line<'a> {
            model_id: &'a str,
            created_at: String,
            tags: &'a [String],
            #[serde(skip_serializing_if = "Option::is_none")]
            config_peft_base_model_name_or_path: Option<&'a str>,
            #[serde(skip_serializing_if = "<[String]>::is_empty")]
            card_base_model: &'a [String],
            #[serde(skip_serializing_if = "Option::is_none")]
            card_data: Option<CardData<'a>>,
            raw_field_count: usize,
        }
        let line = Line {
            model_id: &self.model_id,
            created_at: format_timestamp(self.created_at),
            tags: &self.tags,
            config_peft_base_model_name_or_path: self.peft_base.as_deref(),
            card_base_model: &self.card_base_model,
            card_data: (!self.card_data_base_model.is_empty()).then_some(CardData {
                base_model: &self.card_data_base_model,
            }),
            raw_field_count: self.raw_field_count,
        };
        serde_json::to_string(&line).expect("record serialization cannot fail")
    }
}

/// Why a raw row could not become a [`ModelRecord`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RejectReason {
    NotAnObject,
    MissingModelId,
    MissingCreatedAt,
    BadTimestamp,
}

impl RejectReason {
    pub fn code(self) -> &'static str {
        match self {
            RejectReason::NotAnObject => "not_an_object",
            RejectReason::MissingModelId => "missing_model_id",
            RejectReason::MissingCreatedAt => "missing_created_at",
            RejectReason::BadTimestamp => "bad_timestamp",
        }
    }
}

impl std::fmt::Display for RejectReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.code())
    }
}

const ID_KEYS: &[&str] = &["model_id", "id", "modelId"];
const CREATED_KEYS: &[&str] = &["created_at", "createdAt", "created"];

/// Normalizes one raw metadata row.
///
/// Accepts both the flat dump layout (`model_id`, `created_at`,
/// `config_peft_base_model_name_or_path`, `card_base_model`, `card_data`)
/// and the hub API's native layout (`id`, `createdAt`, `config.peft`,
/// `cardData`).
pub fn normalize(row: &Value) -> Result<ModelRecord, RejectReason> {
    let obj = row.as_object().ok_or(RejectReason::NotAnObject)?;

    let model_id = first_string(obj, ID_KEYS)
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .ok_or(RejectReason::MissingModelId)?
        .to_string();

    let created_raw = first_string(obj, CREATED_KEYS).ok_or_else(|| {
        if CREATED_KEYS.iter().any(|k| obj.contains_key(*k)) {
            RejectReason::BadTimestamp
        } else {
            RejectReason::MissingCreatedAt
        }
    })?;
    let created_at = parse_timestamp(created_raw).ok_or(RejectReason::BadTimestamp)?;

    let mut tags: Vec<String> = Vec::new();
    if let Some(Value::Array(items)) = obj.get("tags") {
        for tag in items.iter().filter_map(Value::as_str).map(str::trim) {
            if !tag.is_empty() && !tags.iter().any(|t| t == tag) {
                tags.push(tag.to_string());
            }
        }
    }

    let peft_base = obj
        .get("config_peft_base_model_name_or_path")
        .or_else(|| {
            obj.get("config")
                .and_then(|c| c.get("peft"))
                .and_then(|p| p.get("base_model_name_or_path"))
        })
        .and_then(Value::as_str)
        .map(|s| s.trim().to_string());

    let card_base_model = lift_to_list(obj.get("card_base_model"));
    let card_data_base_model = lift_to_list(
        obj.get("card_data")
            .or_else(|| obj.get("cardData"))
            .and_then(|c| c.get("base_model"))
            .or_else(|| obj.get("card_data.base_model")),
    );

    let raw_field_count = match obj.get("raw_field_count").and_then(Value::as_u64) {
        Some(n) => n as usize,
        None => obj.len(),
    };

    Ok(ModelRecord {
        model_id,
        created_at,
        tags,
        peft_base,
        card_base_model,
        card_data_base_model,
        raw_field_count,
    })
}

fn first_string<'a>(obj: &'a Map<String, Value>, keys: &[&str]) -> Option<&'a str> {
    keys.iter().find_map(|k| obj.get(*k).and_then(Value::as_str))
}

/// Scalar strings become single-element lists; arrays keep their string
/// members in order without repeats.
fn lift_to_list(value: Option<&Value>) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    let mut push = |s: &str| {
        let s = s.trim();
        if !out.iter().any(|v| v == s) {
            out.push(s.to_string());
        }
    };
    match value {
        Some(Value::String(s)) => push(s),
        Some(Value::Array(items)) => items.iter().filter_map(Value::as_str).for_each(push),
        _ => {}
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn duplicate_tags_collapse() {
        let rec = normalize(&json!({
            "id": "a/b", "created": "2022-03-02T23:29:04", "tags": ["x", "x"]
        }))
        .unwrap();
        assert_eq!(rec.tags, vec!["x"]);
        assert_eq!(rec.created_at, PLATFORM_FLOOR);
    }

    #[test]
    fn scalar_card_base_is_lifted() {
        let rec = normalize(&json!({
            "id": "a/b", "created": "2023-01-01T00:00:00Z",
            "card_data": {"base_model": "c/d"}
        }))
        .unwrap();
        assert_eq!(rec.card_base(), vec!["c/d"]);
    }

    #[test]
    fn unparseable_timestamp_is_rejected() {
        let err = normalize(&json!({"id": "a/b", "created": "not-a-date"})).unwrap_err();
        assert_eq!(err.code(), "bad_timestamp");
    }

    #[test]
    fn missing_fields_have_distinct_reasons() {
        assert_eq!(
            normalize(&json!({"created_at": "2023-01-01"})).unwrap_err(),
            RejectReason::MissingModelId
        );
        assert_eq!(
            normalize(&json!({"model_id": "   "})).unwrap_err(),
            RejectReason::MissingModelId
        );
        assert_eq!(
            normalize(&json!({"model_id": "a/b"})).unwrap_err(),
            RejectReason::MissingCreatedAt
        );
        assert_eq!(
            normalize(&json!({"model_id": "a/b", "created_at": 5})).unwrap_err(),
            RejectReason::BadTimestamp
        );
        assert_eq!(normalize(&json!([1, 2])).unwrap_err(), RejectReason::NotAnObject);
    }

    #[test]
    fn native_api_layout_is_understood() {
        let rec = normalize(&json!({
            "_id": "65f0", "id": "org/lora", "createdAt": "2024-05-01T10:00:00.000Z",
            "tags": ["peft", " ", "base_model:adapter:org/base"],
            "config": {"peft": {"base_model_name_or_path": "org/base"}},
            "cardData": {"base_model": ["org/base", "org/base"]}
        }))
        .unwrap();
        assert_eq!(rec.model_id, "org/lora");
        assert_eq!(rec.tags, vec!["peft", "base_model:adapter:org/base"]);
        assert_eq!(rec.peft_base.as_deref(), Some("org/base"));
        assert_eq!(rec.card_data_base_model, vec!["org/base"]);
        assert_eq!(rec.raw_field_count, 6);
    }

    #[test]
    fn card_union_keeps_first_occurrence() {
        let rec = normalize(&json!({
            "model_id": "x/y", "created_at": "2024-01-01",
            "card_base_model": ["a/1", "b/2"],
            "card_data": {"base_model": ["b/2", "c/3"]}
        }))
        .unwrap();
        assert_eq!(rec.card_base(), vec!["a/1", "b/2", "c/3"]);
    }

    #[test]
    fn canonical_line_renormalizes_identically() {
        let rec = normalize(&json!({
            "model_id": "x/y", "created_at": "2021-01-01T00:00:00+01:00",
            "tags": ["t1", "t2"], "config_peft_base_model_name_or_path": "p/q",
            "card_base_model": "a/1", "card_data": {"base_model": ["c/3"]},
            "extra": 1
        }))
        .unwrap();
        assert!(rec.before_platform_floor());
        let again: Value = serde_json::from_str(&rec.to_json_line()).unwrap();
        assert_eq!(normalize(&again).unwrap(), rec);
    }
}
