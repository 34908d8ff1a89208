//! Ordered sweep output with a self-describing metadata block.
//!
//! CSV layout: `# key: value` lines, a header row, then one row per sweep
//! point with every number written as `{:.16e}` (17 significant digits, which
//! round-trips any `f64`). Gap rows carry `nan` in CSV and `null` in JSON.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub kind: String,
    pub columns: Vec<String>,
    #[serde(with = "nullable_rows")]
    pub rows: Vec<Vec<f64>>,
    pub metadata: BTreeMap<String, String>,
}

mod nullable_rows {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(rows: &[Vec<f64>], s: S) -> Result<S::Ok, S::Error> {
        let mapped: Vec<Vec<Option<f64>>> = rows
            .iter()
            .map(|r| r.iter().map(|v| v.is_finite().then_some(*v)).collect())
            .collect();
        mapped.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<f64>>, D::Error> {
        let raw: Vec<Vec<Option<f64>>> = Vec::deserialize(d)?;
        Ok(raw
            .into_iter()
            .map(|r| r.into_iter().map(|v| v.unwrap_or(f64::NAN)).collect())
            .collect())
    }
}

impl SweepTable {
    /// Empty table; `config` is hashed into the `config_hash` metadata entry.
    pub fn new(kind: &str, columns: &[&str], config: &str) -> Self {
        let mut metadata = BTreeMap::new();
        metadata.insert("kind".to_string(), kind.to_string());
        metadata.insert("tool_version".to_string(), TOOL_VERSION.to_string());
        metadata.insert("config".to_string(), config.to_string());
        metadata.insert("config_hash".to_string(), config_hash(kind, config));
        SweepTable {
            kind: kind.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            metadata,
        }
    }

    pub fn push(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::Data(format!(
                "row has {} entries, table {} has {} columns",
                row.len(),
                self.kind,
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    /// A row of NaN except for the sweep parameter in the first column.
    pub fn push_gap(&mut self, param: f64) {
        let mut row = vec![f64::NAN; self.columns.len()];
        row[0] = param;
        self.rows.push(row);
    }

    pub fn set_meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.insert(key.to_string(), value.to_string());
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::Data(format!("table {} has no column {name}", self.kind)))
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let i = self.column_index(name)?;
        Ok(self.rows.iter().map(|r| r[i]).collect())
    }

    /// Rows without NaN entries.
    pub fn complete_rows(&self) -> impl Iterator<Item = &Vec<f64>> {
        self.rows.iter().filter(|r| r.iter().all(|v| !v.is_nan()))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "# {k}: {}", v.replace('\n', " "));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format_number(*v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut metadata = BTreeMap::new();
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = loop {
            let line = lines
                .next()
                .ok_or_else(|| Error::Data("CSV has no header row".into()))?;
            match line.strip_prefix('#') {
                Some(meta) => {
                    let (k, v) = meta
                        .split_once(':')
                        .ok_or_else(|| Error::Data(format!("bad metadata line {line:?}")))?;
                    metadata.insert(k.trim().to_string(), v.trim().to_string());
                }
                None => break line,
            }
        };
        let columns: Vec<String> = header.split(',').map(|c| c.trim().to_string()).collect();
        let mut rows = Vec::new();
        for line in lines {
            let row = line
                .split(',')
                .map(|c| {
                    c.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::Data(format!("bad number {c:?}: {e}")))
                })
                .collect::<Result<Vec<f64>>>()?;
            if row.len() != columns.len() {
                return Err(Error::Data(format!("row {line:?} does not match header")));
            }
            rows.push(row);
        }
        let kind = metadata.get("kind").cloned().unwrap_or_default();
        Ok(SweepTable {
            kind,
            columns,
            rows,
            metadata,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// 17 significant digits in scientific notation; `nan`, `inf`, `-inf` otherwise.
pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{v:.16e}")
    }
}

/// SHA-256 over `kind`, a NUL byte and the canonical config string, hex encoded.
pub fn config_hash(kind: &str, config: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(kind.as_bytes());
    hasher.update([0u8]);
    hasher.update(config.as_bytes());
    hex::encode(hasher.finalize())
}
