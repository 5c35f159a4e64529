//! The versioned report document, its determinism hash and its renderings.

use std::fmt::Write as _;

use bonnesen_core::search::Counterexample;
use bonnesen_core::{PolygonKind, SchurClass};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::config::{CommandKind, RunConfig};

pub const SCHEMA_VERSION: &str = "bonnesen-report/1";

/// Fixed CSV header for slack rows; `kind` trails the fixed columns so rows of
/// dual-kind entries stay distinguishable.
pub const CSV_COLUMNS: [&str; 10] = ["entry_id", "n", "R", "alpha", "k", "lhs", "rhs", "slack", "equality", "kind"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool_version: String,
    pub seed: u64,
    pub samples: usize,
    pub precision: String,
    /// ISO-8601 UTC; not covered by the determinism hash.
    pub timestamp: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub records: u64,
    pub violations: u64,
    pub equality_hits: u64,
    pub anomalies: u64,
}

/// Worst case of one `(entry, kind, n, alpha, k)` over a verify sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntryAggregate {
    pub entry_id: String,
    pub kind: PolygonKind,
    pub n: usize,
    pub radius: f64,
    pub alpha: u32,
    pub k: Option<u32>,
    pub samples: u64,
    /// Smallest raw slack seen.
    pub min_slack: f64,
    /// Smallest `slack / scale`; the row below describes that sample.
    pub worst_relative_slack: f64,
    pub worst_slack: f64,
    pub worst_lhs: f64,
    pub worst_rhs: f64,
    pub worst_scale: f64,
    pub worst_equality: bool,
    pub argmin_fingerprint: String,
    pub argmin_angles: Vec<f64>,
    pub violations: u64,
    pub equality_hits: u64,
    /// Samples with a negative left-hand side.
    pub negative_lhs: u64,
    pub min_rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedCombination {
    pub entry_id: String,
    pub kind: PolygonKind,
    pub alpha: Option<u32>,
    pub k: Option<u32>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifyRow {
    pub function: String,
    pub family: String,
    pub n: usize,
    pub alpha: Option<u32>,
    pub k: Option<u32>,
    /// `None` for probes, whose verdict is informational.
    pub expected: Option<SchurClass>,
    pub classification: SchurClass,
    pub samples: usize,
    pub positive_count: usize,
    pub negative_count: usize,
    pub worst_value: f64,
    pub witness: Option<Vec<f64>>,
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCheck {
    pub resolution: usize,
    pub step: f64,
    pub points: u64,
    pub grid_min_slack: f64,
    pub grid_min_scale: f64,
    pub argmin_distance: f64,
    pub lipschitz: f64,
    /// `|best_slack - grid_min_slack| <= 2 lipschitz step`.
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FalsifyRow {
    pub evaluations: usize,
    pub starts: usize,
    pub best_relative_slack: f64,
    pub counterexample: Option<Counterexample>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchRow {
    pub entry_id: String,
    pub kind: PolygonKind,
    pub n: usize,
    pub radius: f64,
    pub alpha: u32,
    pub k: Option<u32>,
    pub best_slack: f64,
    pub best_scale: f64,
    pub best_lhs: f64,
    pub best_rhs: f64,
    pub best_angles: Vec<f64>,
    pub distance_to_regular: f64,
    pub converged: bool,
    pub starts: usize,
    pub evaluations: usize,
    pub falsify: FalsifyRow,
    pub grid: Option<GridCheck>,
    pub anomaly: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: String,
    pub command: CommandKind,
    pub config: RunConfig,
    pub provenance: Provenance,
    pub status: Status,
    pub summary: Summary,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub entries: Vec<EntryAggregate>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub skipped: Vec<SkippedCombination>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub verdicts: Vec<CertifyRow>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub searches: Vec<SearchRow>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub catalog: Vec<Value>,
    #[serde(default)]
    pub notes: Vec<String>,
    pub determinism_hash: String,
}

impl ReportDocument {
    pub fn new(config: &RunConfig) -> Self {
        ReportDocument {
            schema_version: SCHEMA_VERSION.to_string(),
            command: config.command,
            config: config.clone(),
            provenance: Provenance {
                tool_version: env!("CARGO_PKG_VERSION").to_string(),
                seed: config.seed,
                samples: config.samples,
                precision: precision_label(config),
                timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            },
            status: Status::Pass,
            summary: Summary::default(),
            entries: Vec::new(),
            skipped: Vec::new(),
            verdicts: Vec::new(),
            searches: Vec::new(),
            catalog: Vec::new(),
            notes: Vec::new(),
            determinism_hash: String::new(),
        }
    }

    /// Sets `status` from the summary and stamps the hash.
    pub fn finish(mut self) -> Self {
        self.status = if self.summary.violations == 0 && self.summary.anomalies == 0 {
            Status::Pass
        } else {
            Status::Fail
        };
        self.determinism_hash = determinism_hash(&self);
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&canonical(&serde_json::to_value(self).expect("report serializes")))
            .expect("report serializes");
        s.push('\n');
        s
    }
}

fn precision_label(config: &RunConfig) -> String {
    match config.precision {
        bonnesen_core::Precision::Standard => "standard".to_string(),
        bonnesen_core::Precision::High { digits } => format!("high:{digits}"),
    }
}

/// Recursively rebuilds objects with sorted keys, whatever map ordering
/// `serde_json` was compiled with.
pub fn canonical(v: &Value) -> Value {
    match v {
        Value::Object(m) => {
            let mut keys: Vec<&String> = m.keys().collect();
            keys.sort();
            let mut out = Map::new();
            for k in keys {
                out.insert(k.clone(), canonical(&m[k]));
            }
            Value::Object(out)
        }
        Value::Array(a) => Value::Array(a.iter().map(canonical).collect()),
        other => other.clone(),
    }
}

/// SHA-256 of the canonical JSON with the timestamp and the hash itself removed.
pub fn determinism_hash(doc: &ReportDocument) -> String {
    hash_value(&serde_json::to_value(doc).expect("report serializes"))
}

/// As [`determinism_hash`], on a parsed report.
pub fn hash_value(v: &Value) -> String {
    let mut v = v.clone();
    if let Some(obj) = v.as_object_mut() {
        obj.remove("determinism_hash");
        if let Some(p) = obj.get_mut("provenance").and_then(Value::as_object_mut) {
            p.remove("timestamp");
        }
    }
    let bytes = serde_json::to_vec(&canonical(&v)).expect("value serializes");
    let digest = Sha256::digest(&bytes);
    let mut hex = String::with_capacity(64);
    for b in digest {
        let _ = write!(hex, "{b:02x}");
    }
    hex
}

fn opt(v: Option<u32>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn to_csv(doc: &ReportDocument) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    match doc.command {
        CommandKind::Certify => {
            w.write_record([
                "function", "family", "n", "alpha", "k", "expected", "classification", "samples", "positive", "negative",
                "worst_value", "matches",
            ])?;
            for r in &doc.verdicts {
                w.write_record([
                    r.function.clone(),
                    r.family.clone(),
                    r.n.to_string(),
                    opt(r.alpha),
                    opt(r.k),
                    r.expected.map(|c| c.to_string()).unwrap_or_default(),
                    r.classification.to_string(),
                    r.samples.to_string(),
                    r.positive_count.to_string(),
                    r.negative_count.to_string(),
                    r.worst_value.to_string(),
                    r.matches.to_string(),
                ])?;
            }
        }
        CommandKind::Catalog => {
            w.write_record(["id", "kinds", "params", "direction", "formula"])?;
            for e in &doc.catalog {
                let kinds = e["kinds"]
                    .as_array()
                    .map(|a| a.iter().filter_map(Value::as_str).collect::<Vec<_>>().join("|"))
                    .unwrap_or_default();
                let s = |key: &str| e[key].as_str().unwrap_or_default().to_string();
                w.write_record([s("id"), kinds, s("params"), s("direction"), s("formula")])?;
            }
        }
        _ => {
            w.write_record(CSV_COLUMNS)?;
            for a in &doc.entries {
                w.write_record([
                    a.entry_id.clone(),
                    a.n.to_string(),
                    a.radius.to_string(),
                    a.alpha.to_string(),
                    opt(a.k),
                    a.worst_lhs.to_string(),
                    a.worst_rhs.to_string(),
                    a.worst_slack.to_string(),
                    a.worst_equality.to_string(),
                    a.kind.to_string(),
                ])?;
            }
            for s in &doc.searches {
                let equality = s.best_slack.abs() <= bonnesen_core::slack::EQUALITY_REL_TOL * s.best_scale;
                w.write_record([
                    s.entry_id.clone(),
                    s.n.to_string(),
                    s.radius.to_string(),
                    s.alpha.to_string(),
                    opt(s.k),
                    s.best_lhs.to_string(),
                    s.best_rhs.to_string(),
                    s.best_slack.to_string(),
                    equality.to_string(),
                    s.kind.to_string(),
                ])?;
            }
        }
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

pub fn to_text(doc: &ReportDocument) -> String {
    let mut out = String::new();
    let s = &doc.summary;
    let _ = writeln!(
        out,
        "{} {:?}: records {} violations {} equality hits {} anomalies {}",
        doc.command.name(),
        doc.status,
        s.records,
        s.violations,
        s.equality_hits,
        s.anomalies
    );
    for a in &doc.entries {
        let _ = writeln!(
            out,
            "{:<13} {:<10} n={:<2} a={} k={:<2} min rel slack {:>12.4e} violations {}",
            a.entry_id,
            a.kind,
            a.n,
            a.alpha,
            opt(a.k),
            a.worst_relative_slack,
            a.violations
        );
    }
    for r in &doc.verdicts {
        let _ = writeln!(
            out,
            "{:<28} n={:<2} {:<14} expected {:<14} {}",
            r.function,
            r.n,
            r.classification.to_string(),
            r.expected.map(|c| c.to_string()).unwrap_or_else(|| "-".into()),
            if r.matches { "ok" } else { "MISMATCH" }
        );
    }
    for r in &doc.searches {
        let _ = writeln!(
            out,
            "{:<13} {:<10} n={:<2} a={} k={:<2} best slack {:>12.4e} dist {:>9.2e} {}",
            r.entry_id,
            r.kind,
            r.n,
            r.alpha,
            opt(r.k),
            r.best_slack,
            r.distance_to_regular,
            r.anomaly.as_deref().unwrap_or("ok")
        );
    }
    for e in &doc.catalog {
        let kinds = e["kinds"]
            .as_array()
            .map(|a| a.iter().filter_map(Value::as_str).collect::<Vec<_>>().join("|"))
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "{:<13} {:<18} {:<2} {}",
            e["id"].as_str().unwrap_or_default(),
            kinds,
            e["direction"].as_str().unwrap_or_default(),
            e["formula"].as_str().unwrap_or_default()
        );
    }
    for note in &doc.notes {
        let _ = writeln!(out, "note: {note}");
    }
    let _ = writeln!(out, "determinism hash {}", doc.determinism_hash);
    out
}
