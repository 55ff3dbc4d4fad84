//! Versioned, machine-readable run reports.

use std::collections::BTreeMap;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::Serialize;
use serde_json::Value;

use crate::config::{OutputFormat, RunConfig};
use crate::error::Outcome;

pub const SCHEMA: &str = "nonat-report/1";

/// The only field allowed to differ between reruns of the same configuration.
pub const TIMESTAMP_FIELD: &str = "timestamp";

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: String,
    pub config: RunConfig,
    pub config_digest: String,
    pub timestamp: String,
    pub outcome: &'static str,
    pub verdict: String,
    pub reasons: Vec<String>,
    pub results: Value,
    /// Dotted path under `results` ↦ operation that produced it.
    pub provenance: BTreeMap<String, String>,
    pub cited_facts: Vec<String>,
}

impl Report {
    pub fn new(command: &str, config: &RunConfig) -> Self {
        Self {
            schema: SCHEMA,
            command: command.into(),
            config: config.clone(),
            config_digest: config.digest(),
            timestamp: now(),
            outcome: Outcome::Success.label(),
            verdict: String::new(),
            reasons: Vec::new(),
            results: Value::Null,
            provenance: BTreeMap::new(),
            cited_facts: Vec::new(),
        }
    }

    pub fn cite(&mut self, path: &str, operation: &str) {
        self.provenance.insert(path.into(), operation.into());
    }

    pub fn finish(mut self, outcome: Outcome, verdict: impl Into<String>) -> (Self, Outcome) {
        self.outcome = outcome.label();
        self.verdict = verdict.into();
        (self, outcome)
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
            OutputFormat::Csv => self.to_csv(),
        }
    }

    /// One `field,value,source` row per scalar; arrays and objects are
    /// flattened into dotted paths.
    fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut row = |field: &str, value: &str, source: &str| {
            w.write_record([field, value, source]).expect("in-memory write");
        };
        row("field", "value", "source");
        row("schema", self.schema, "");
        row("command", &self.command, "");
        row("config_digest", &self.config_digest, "");
        row(TIMESTAMP_FIELD, &self.timestamp, "");
        row("outcome", self.outcome, "");
        row("verdict", &self.verdict, "");
        for (i, r) in self.reasons.iter().enumerate() {
            row(&format!("reasons.{i}"), r, "");
        }
        let mut flat = Vec::new();
        flatten("results", &self.results, &mut flat);
        for (path, value) in flat {
            let source = self.source_of(&path).unwrap_or("");
            row(&path, &value, source);
        }
        for (i, f) in self.cited_facts.iter().enumerate() {
            row(&format!("cited_facts.{i}"), f, "cited");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    /// Longest provenance entry matching a prefix of `path` (without the
    /// `results.` root); a `*` segment matches any single segment.
    fn source_of(&self, path: &str) -> Option<&str> {
        let segments: Vec<&str> = path.strip_prefix("results.")?.split('.').collect();
        self.provenance
            .iter()
            .filter(|(k, _)| {
                let pattern: Vec<&str> = k.split('.').collect();
                pattern.len() <= segments.len() && pattern.iter().zip(&segments).all(|(p, s)| *p == "*" || p == s)
            })
            .max_by_key(|(k, _)| k.split('.').count())
            .map(|(_, v)| v.as_str())
    }
}

fn flatten(prefix: &str, value: &Value, out: &mut Vec<(String, String)>) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                flatten(&format!("{prefix}.{k}"), v, out);
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&format!("{prefix}.{i}"), v, out);
            }
        }
        Value::String(s) => out.push((prefix.into(), s.clone())),
        Value::Null => out.push((prefix.into(), String::new())),
        other => out.push((prefix.into(), other.to_string())),
    }
}

/// RFC 3339 UTC, honouring `SOURCE_DATE_EPOCH` for reproducible archives.
fn now() -> String {
    let t = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse::<i64>().ok())
        .and_then(|secs| DateTime::<Utc>::from_timestamp(secs, 0))
        .unwrap_or_else(Utc::now);
    t.to_rfc3339_opts(SecondsFormat::Secs, true)
}

/// Drops the timestamp from a rendered report so reruns can be compared.
pub fn strip_timestamp(rendered: &str) -> String {
    rendered
        .lines()
        .filter(|l| {
            let l = l.trim_start();
            !(l.starts_with(&format!("\"{TIMESTAMP_FIELD}\":")) || l.starts_with(&format!("{TIMESTAMP_FIELD},")))
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Flags, RunConfig};
    use serde_json::json;

    fn report() -> Report {
        let cfg = RunConfig::resolve(&Flags {
            primes: Some("5,7".into()),
            ..Default::default()
        })
        .unwrap();
        let mut r = Report::new("coeffs", &cfg);
        r.results = json!({ "rows": [{ "value": "1/5", "product": 0.2 }], "max_discrepancy": 0.0 });
        r.cite("rows", "fourier_coeff_direct");
        r.cite("rows.*.product", "fourier_coeff_product");
        r
    }

    #[test]
    fn csv_rows_carry_sources() {
        let csv = report().render(OutputFormat::Csv);
        assert!(csv.starts_with("field,value,source\n"));
        assert!(csv.contains("results.rows.0.value,1/5,fourier_coeff_direct\n"));
        assert!(csv.contains("results.rows.0.product,0.2,fourier_coeff_product\n"));
        assert!(csv.contains("results.max_discrepancy,0.0,\n"));
    }

    #[test]
    fn timestamp_is_the_only_stripped_line() {
        let a = report();
        let mut b = a.clone();
        b.timestamp = "1999-01-01T00:00:00Z".into();
        for f in [OutputFormat::Json, OutputFormat::Csv] {
            assert_ne!(a.render(f), b.render(f));
            assert_eq!(strip_timestamp(&a.render(f)), strip_timestamp(&b.render(f)));
        }
        let v: Value = serde_json::from_str(&a.render(OutputFormat::Json)).unwrap();
        assert_eq!(v["schema"], SCHEMA);
    }
}
