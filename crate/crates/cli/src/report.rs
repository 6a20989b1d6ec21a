//! Report envelope and its JSON, CSV and text renderings.

use std::fmt::Write as _;

use anyhow::{bail, Result};
use serde::Serialize;
use serde_json::Value;

use crate::args::Format;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    /// A semi-decision found nothing (no witness, window too small, ...).
    None,
    /// The command failed but still has a partial result to report.
    Error,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::None => 2,
            Status::Error => 1,
        }
    }
}

/// Rows for the CSV view of a result.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

/// What a command hands back before it is wrapped in a [`Report`].
pub struct Outcome {
    pub config: Value,
    pub status: Status,
    pub result: Value,
    pub message: Option<String>,
    pub table: Option<Table>,
}

impl Outcome {
    pub fn new(config: Value, status: Status, result: impl Serialize) -> Result<Self> {
        Ok(Outcome { config, status, result: serde_json::to_value(result)?, message: None, table: None })
    }

    pub fn with_table(mut self, table: Table) -> Self {
        self.table = Some(table);
        self
    }

    pub fn with_message(mut self, message: impl Into<String>) -> Self {
        self.message = Some(message.into());
        self
    }
}

/// The report of record. No timestamps: the same config reproduces it byte
/// for byte.
#[derive(Debug, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: Value,
    pub seed: u64,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    pub result: Value,
}

impl Report {
    pub fn new(command: String, seed: u64, outcome: &Outcome) -> Self {
        Report {
            tool: "tfsets",
            version: env!("CARGO_PKG_VERSION"),
            command,
            config: outcome.config.clone(),
            seed,
            status: outcome.status,
            message: outcome.message.clone(),
            result: outcome.result.clone(),
        }
    }
}

pub fn render(report: &Report, table: Option<&Table>, format: Format) -> Result<String> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(report)? + "\n"),
        Format::Csv => match table {
            Some(t) => csv_table(t),
            None => bail!("csv output is not available for '{}'; use --format json or text", report.command),
        },
        Format::Text => Ok(text(report)),
    }
}

fn csv_table(t: &Table) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&t.headers)?;
    for row in &t.rows {
        w.write_record(row)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

fn text(report: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {} {}: {:?} (seed {})", report.tool, report.version, report.command, report.status, report.seed);
    if let Some(m) = &report.message {
        let _ = writeln!(out, "{m}");
    }
    match &report.result {
        Value::Object(map) => {
            for (k, v) in map {
                let line = match v {
                    Value::Array(items) if items.iter().all(|i| scalar(i).is_some()) => {
                        items.iter().filter_map(scalar).collect::<Vec<_>>().join(", ")
                    }
                    other => scalar(other).unwrap_or_else(|| other.to_string()),
                };
                let _ = writeln!(out, "{k}: {line}");
            }
        }
        other => {
            let _ = writeln!(out, "{}", scalar(other).unwrap_or_else(|| other.to_string()));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn sample() -> (Report, Table) {
        let outcome = Outcome::new(json!({"window": 8}), Status::Ok, json!({"elements": [1, 2], "note": null})).unwrap();
        let report = Report::new("set materialize".into(), 3, &outcome);
        let table = Table { headers: vec!["element"], rows: vec![vec!["1".into()], vec!["2".into()]] };
        (report, table)
    }

    #[test]
    fn renders_each_format() {
        let (report, table) = sample();
        let json = render(&report, Some(&table), Format::Json).unwrap();
        assert!(json.contains("\"seed\": 3"));
        assert_eq!(render(&report, Some(&table), Format::Csv).unwrap(), "element\n1\n2\n");
        let text = render(&report, None, Format::Text).unwrap();
        assert!(text.contains("elements: 1, 2"));
        assert!(text.contains("note: -"));
        assert!(render(&report, None, Format::Csv).is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!([Status::Ok, Status::None, Status::Error].map(Status::exit_code), [0, 2, 1]);
    }
}
