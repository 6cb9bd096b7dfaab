//! Instance ingestion: JSON parsing, schema validation, kind dispatch and the
//! content digest recorded in every report.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

pub const SCHEMA_VERSION: u64 = 1;
pub const INSTANCE_SCHEMA: &str = include_str!("../schemas/instance.schema.json");
pub const REPORT_SCHEMA: &str = include_str!("../schemas/report.schema.json");

/// At most this many schema violations are quoted in an error message.
const MAX_SCHEMA_ERRORS: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Pick,
    Extremal,
    Dk,
    Embed,
    Dominate,
    Blaschke,
    Capacity,
    RemoveExperiment,
    WeakHardyExperiment,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Pick => "pick",
            Kind::Extremal => "extremal",
            Kind::Dk => "dk",
            Kind::Embed => "embed",
            Kind::Dominate => "dominate",
            Kind::Blaschke => "blaschke",
            Kind::Capacity => "capacity",
            Kind::RemoveExperiment => "remove-experiment",
            Kind::WeakHardyExperiment => "weak-hardy-experiment",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub kind: Kind,
    pub payload: Value,
    /// `sha256:<hex>` of the canonical (key-sorted, compact) instance JSON.
    pub digest: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Envelope {
    #[allow(dead_code)]
    schema_version: u64,
    kind: Kind,
    payload: Value,
}

fn compiled(schema: &'static str, cell: &'static OnceLock<jsonschema::Validator>) -> &'static jsonschema::Validator {
    cell.get_or_init(|| {
        let value: Value = serde_json::from_str(schema).expect("shipped schema is valid JSON");
        jsonschema::validator_for(&value).expect("shipped schema compiles")
    })
}

pub fn instance_validator() -> &'static jsonschema::Validator {
    static CELL: OnceLock<jsonschema::Validator> = OnceLock::new();
    compiled(INSTANCE_SCHEMA, &CELL)
}

pub fn report_validator() -> &'static jsonschema::Validator {
    static CELL: OnceLock<jsonschema::Validator> = OnceLock::new();
    compiled(REPORT_SCHEMA, &CELL)
}

/// Violations of `validator` by `value`, formatted as `at <pointer>: <message>`.
pub fn schema_errors(validator: &jsonschema::Validator, value: &Value) -> Vec<String> {
    validator
        .iter_errors(value)
        .map(|e| {
            let path = e.instance_path.to_string();
            format!("at {}: {e}", if path.is_empty() { "/" } else { &path })
        })
        .collect()
}

/// Objects re-emitted with sorted keys, so the digest does not depend on key
/// order in the source file (or on how `serde_json` orders maps).
fn canonical(v: &Value) -> Value {
    match v {
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            Value::Object(keys.into_iter().map(|k| (k.clone(), canonical(&map[k]))).collect())
        }
        Value::Array(items) => Value::Array(items.iter().map(canonical).collect()),
        other => other.clone(),
    }
}

pub fn digest(v: &Value) -> String {
    let bytes = serde_json::to_vec(&canonical(v)).expect("JSON values always serialize");
    format!("sha256:{}", hex::encode(Sha256::digest(&bytes)))
}

impl Instance {
    pub fn parse(text: &str) -> Result<Instance> {
        if text.trim().is_empty() {
            return Err(CliError::Json("empty input".into()));
        }
        let value: Value = serde_json::from_str(text).map_err(|e| CliError::Json(e.to_string()))?;
        Self::from_value(value)
    }

    pub fn from_value(value: Value) -> Result<Instance> {
        let errors = schema_errors(instance_validator(), &value);
        if !errors.is_empty() {
            let shown: Vec<&str> = errors.iter().take(MAX_SCHEMA_ERRORS).map(String::as_str).collect();
            let more = errors.len().saturating_sub(MAX_SCHEMA_ERRORS);
            let suffix = if more > 0 { format!(" (and {more} more)") } else { String::new() };
            return Err(CliError::Schema(format!("{}{suffix}", shown.join("; "))));
        }
        let digest = digest(&value);
        let env: Envelope = serde_json::from_value(value).map_err(|e| CliError::Schema(e.to_string()))?;
        Ok(Instance { kind: env.kind, payload: env.payload, digest })
    }

    /// Typed view of the payload.
    pub fn payload<T: serde::de::DeserializeOwned>(&self) -> Result<T> {
        serde_json::from_value(self.payload.clone())
            .map_err(|e| CliError::Schema(format!("payload of kind {}: {e}", self.kind)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn digest_ignores_key_order() {
        let a: Value = serde_json::from_str(r#"{"b": 1, "a": [1, {"y": 2, "x": 3}]}"#).unwrap();
        let b: Value = serde_json::from_str(r#"{"a": [1, {"x": 3, "y": 2}], "b": 1}"#).unwrap();
        assert_eq!(digest(&a), digest(&b));
        assert_ne!(digest(&a), digest(&json!({"b": 2, "a": [1, {"x": 3, "y": 2}]})));
        assert!(digest(&a).starts_with("sha256:") && digest(&a).len() == 7 + 64);
    }

    #[test]
    fn parses_a_pick_instance() {
        let text = r#"{"schema_version": 1, "kind": "pick",
            "payload": {"kernel": {"type": "szego"}, "points": [[0, 0], [0.5, 0]], "targets": [[0, 0], [0.6, 0]]}}"#;
        let inst = Instance::parse(text).unwrap();
        assert_eq!(inst.kind, Kind::Pick);
    }

    #[test]
    fn input_errors() {
        assert!(matches!(Instance::parse(""), Err(CliError::Json(_))));
        assert!(matches!(Instance::parse("  \n"), Err(CliError::Json(_))));
        let err = Instance::parse("{\"schema_version\": 1,\n \"kind\": ").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        let wrong_version = r#"{"schema_version": 2, "kind": "dk", "payload": {"kernel": {"type": "szego"}}}"#;
        assert!(matches!(Instance::parse(wrong_version), Err(CliError::Schema(_))));
        let unknown_field =
            r#"{"schema_version": 1, "kind": "dk", "payload": {"kernel": {"type": "szego"}, "extra": 1}}"#;
        assert!(matches!(Instance::parse(unknown_field), Err(CliError::Schema(_))));
        let bad_kind = r#"{"schema_version": 1, "kind": "nope", "payload": {}}"#;
        assert!(matches!(Instance::parse(bad_kind), Err(CliError::Schema(_))));
    }
}
