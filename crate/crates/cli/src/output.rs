//! Report rendering. JSON is the primary format; CSV is offered for kinds
//! whose result is naturally a flat table.

use serde::Serialize;
use serde_json::{json, Value};

use crate::commands::{Outcome, Status};
use crate::error::{CliError, Result};
use crate::instance::{Kind, SCHEMA_VERSION};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<const N: usize>(header: [&str; N], rows: Vec<Vec<String>>) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows }
    }
}

#[derive(Serialize)]
struct Report<'a> {
    schema_version: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    source: Option<&'a str>,
    kind: Kind,
    digest: &'a str,
    status: Status,
    result: &'a Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_time_ms: Option<f64>,
}

/// Report envelope for one instance. `source` is only recorded when several
/// instances share one output.
pub fn report_value(outcome: &Outcome, source: Option<&str>) -> Value {
    serde_json::to_value(Report {
        schema_version: SCHEMA_VERSION,
        source,
        kind: outcome.kind,
        digest: &outcome.digest,
        status: outcome.status,
        result: &outcome.result,
        wall_time_ms: outcome.wall_time_ms,
    })
    .expect("reports always serialize")
}

pub fn error_value(err: &CliError, source: Option<&str>) -> Value {
    let mut v = json!({
        "schema_version": SCHEMA_VERSION,
        "error": { "code": err.code(), "message": err.to_string() },
    });
    if let Some(s) = source {
        v["source"] = Value::String(s.to_string());
    }
    v
}

pub fn render_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// CSV for one or more outcomes. With several, a leading `instance` column
/// carries each row's source label.
pub fn render_csv(outcomes: &[(Option<&str>, &Outcome)]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let multi = outcomes.len() > 1;
    let mut header: Option<&[String]> = None;
    for (source, o) in outcomes {
        let table = o
            .table
            .as_ref()
            .ok_or_else(|| CliError::Invalid(format!("{} results are nested; use --format json", o.kind)))?;
        match header {
            None => {
                let mut h: Vec<&str> = table.header.iter().map(String::as_str).collect();
                if multi {
                    h.insert(0, "instance");
                }
                w.write_record(&h).map_err(csv_err)?;
                header = Some(&table.header);
            }
            Some(h) if h != table.header.as_slice() => {
                return Err(CliError::Invalid("CSV output needs instances with the same columns".into()));
            }
            Some(_) => {}
        }
        for row in &table.rows {
            let mut r: Vec<&str> = row.iter().map(String::as_str).collect();
            if multi {
                r.insert(0, source.unwrap_or("-"));
            }
            w.write_record(&r).map_err(csv_err)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| CliError::Invalid(format!("CSV output failed: {e}")))?;
    Ok(String::from_utf8(bytes).expect("CSV of UTF-8 fields is UTF-8"))
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Invalid(format!("CSV output failed: {e}"))
}
