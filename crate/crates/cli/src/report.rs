//! Versioned JSON reports, CSV sidecars and report comparison.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::SCHEMA_VERSION;

/// Run-dependent facts kept out of report comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool_version: String,
    pub generated_unix_s: u64,
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: String,
    pub command: String,
    pub seed: u64,
    pub result: Value,
    pub metadata: Metadata,
}

impl Report {
    pub fn new(command: &str, seed: u64, result: Value, elapsed_ms: u64) -> Self {
        let now = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        Self {
            schema_version: SCHEMA_VERSION.into(),
            command: command.into(),
            seed,
            result,
            metadata: Metadata { tool_version: env!("CARGO_PKG_VERSION").into(), generated_unix_s: now, elapsed_ms },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

/// Plot-ready table written next to the report.
#[derive(Debug, Clone, PartialEq)]
pub struct Sidecar {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Sidecar {
    pub fn new(name: impl Into<String>, header: &[&str]) -> Self {
        Self { name: name.into(), header: header.iter().map(|h| h.to_string()).collect(), rows: vec![] }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(vec![]);
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }
}

/// Writes `<command>.json` and `<command>-<sidecar>.csv`; returns the paths.
pub fn write_outputs(dir: &Path, report: &Report, sidecars: &[Sidecar]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut paths = vec![];
    let json = dir.join(format!("{}.json", report.command));
    std::fs::write(&json, report.to_json()).with_context(|| format!("writing {}", json.display()))?;
    paths.push(json);
    for s in sidecars {
        let p = dir.join(format!("{}-{}.csv", report.command, s.name));
        std::fs::write(&p, s.to_csv()?).with_context(|| format!("writing {}", p.display()))?;
        paths.push(p);
    }
    Ok(paths)
}

/// Serialization of a report with its `metadata` removed.
pub fn comparable_bytes(report_json: &str) -> Result<Vec<u8>> {
    let mut v: Value = serde_json::from_str(report_json).context("parsing report")?;
    if let Value::Object(m) = &mut v {
        m.remove("metadata");
    }
    Ok(serde_json::to_vec(&v)?)
}

/// First JSON pointer at which two values differ.
pub fn first_difference(a: &Value, b: &Value, at: &str) -> Option<String> {
    match (a, b) {
        (Value::Object(x), Value::Object(y)) => {
            for (k, va) in x {
                let here = format!("{at}/{k}");
                match y.get(k) {
                    None => return Some(here),
                    Some(vb) => {
                        if let Some(d) = first_difference(va, vb, &here) {
                            return Some(d);
                        }
                    }
                }
            }
            y.keys().find(|k| !x.contains_key(*k)).map(|k| format!("{at}/{k}"))
        }
        (Value::Array(x), Value::Array(y)) => {
            for (i, (va, vb)) in x.iter().zip(y).enumerate() {
                if let Some(d) = first_difference(va, vb, &format!("{at}/{i}")) {
                    return Some(d);
                }
            }
            (x.len() != y.len()).then(|| format!("{at}/{}", x.len().min(y.len())))
        }
        _ => (a != b).then(|| at.to_string()),
    }
}

/// `Ok(None)` when the reports agree outside `metadata`, else the first
/// differing pointer.
pub fn compare_reports(a: &Path, b: &Path) -> Result<Option<String>> {
    let ta = std::fs::read_to_string(a).with_context(|| format!("reading {}", a.display()))?;
    let tb = std::fs::read_to_string(b).with_context(|| format!("reading {}", b.display()))?;
    let (ba, bb) = (comparable_bytes(&ta)?, comparable_bytes(&tb)?);
    if ba == bb {
        return Ok(None);
    }
    let va: Value = serde_json::from_slice(&ba)?;
    let vb: Value = serde_json::from_slice(&bb)?;
    Ok(Some(first_difference(&va, &vb, "").unwrap_or_else(|| "/".into())))
}

/// Compact float formatting shared by sidecars and JSON helpers.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x}")
    }
}

/// A float as JSON, with non-finite values spelled out as strings.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        serde_json::json!(x)
    } else {
        Value::String(fmt_f64(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn metadata_is_ignored() {
        let mut a = Report::new("gch", 7, json!({"x": 1}), 5);
        let mut b = a.clone();
        b.metadata.elapsed_ms = 999;
        assert_eq!(comparable_bytes(&a.to_json()).unwrap(), comparable_bytes(&b.to_json()).unwrap());
        a.result = json!({"x": 2});
        assert_ne!(comparable_bytes(&a.to_json()).unwrap(), comparable_bytes(&b.to_json()).unwrap());
    }

    #[test]
    fn difference_pointer() {
        let a = json!({"r": {"v": [1, 2, 3]}});
        let b = json!({"r": {"v": [1, 5, 3]}});
        assert_eq!(first_difference(&a, &b, "").as_deref(), Some("/r/v/1"));
        assert_eq!(first_difference(&a, &a, ""), None);
    }

    #[test]
    fn csv_sidecar() {
        let mut s = Sidecar::new("trace", &["n", "value"]);
        s.push(vec!["1".into(), fmt_f64(f64::INFINITY)]);
        assert_eq!(s.to_csv().unwrap(), "n,value\n1,inf\n");
        assert_eq!(num(f64::NAN), json!("nan"));
    }
}
