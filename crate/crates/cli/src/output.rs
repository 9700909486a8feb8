//! Tables and their CSV and JSON renderings.

use std::io::Write;
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::config::{Format, RunConfig};
use crate::Failure;

pub const TOOL: &str = "farey-chain";

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    /// A quantity that diverges: `inf` in CSV, `null` in JSON.
    Inf,
    /// Not defined for this row: empty in CSV, `null` in JSON.
    Missing,
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::Float)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => float_text(*v),
            Cell::Text(s) => s.clone(),
            Cell::Inf => "inf".into(),
            Cell::Missing => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Float(v) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::Inf | Cell::Missing => Value::Null,
        }
    }
}

/// Shortest text that reads back to the same `f64`.
fn float_text(v: f64) -> String {
    serde_json::Number::from_f64(v)
        .map(|n| n.to_string())
        .unwrap_or_else(|| v.to_string())
}

#[derive(Debug, Clone)]
pub struct Table {
    /// Column layout name with a version suffix, e.g. `partition/1`.
    pub schema: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Extra metadata, e.g. a verification summary.
    pub summary: Map<String, Value>,
}

impl Table {
    pub fn new(schema: &'static str, columns: &[&'static str]) -> Self {
        Self {
            schema,
            columns: columns.to_vec(),
            rows: Vec::new(),
            summary: Map::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width for {}", self.schema);
        self.rows.push(row);
    }

    /// Every floating-point cell must be finite; divergent quantities are
    /// written as [`Cell::Inf`] instead.
    pub fn check_finite(&self) -> Result<(), Failure> {
        for (i, row) in self.rows.iter().enumerate() {
            for (col, cell) in self.columns.iter().zip(row) {
                if let Cell::Float(v) = cell {
                    if !v.is_finite() {
                        return Err(Failure::error(format!(
                            "{}: non-finite {col} in row {} ({v})",
                            self.schema,
                            i + 1
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn metadata(&self, cfg: &RunConfig) -> Map<String, Value> {
        let mut m = Map::new();
        m.insert("tool".into(), json!(TOOL));
        m.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        m.insert("schema".into(), json!(self.schema));
        m.insert("precision_bits".into(), json!(cfg.precision));
        m.insert("nodes".into(), json!(cfg.nodes));
        m.insert("command".into(), json!(cfg.command.to_string()));
        m
    }

    pub fn to_csv(&self, cfg: &RunConfig) -> Result<Vec<u8>, Failure> {
        let mut head: Vec<String> = self
            .metadata(cfg)
            .iter()
            .chain(self.summary.iter())
            .map(|(k, v)| match v {
                Value::String(s) => format!("{k}={s}"),
                other => format!("{k}={other}"),
            })
            .collect();
        head.insert(0, "#".into());
        let mut buf = head.join(" ").into_bytes();
        buf.push(b'\n');
        let mut w = csv::Writer::from_writer(buf);
        let io = |e: csv::Error| Failure::error(format!("csv: {e}"));
        w.write_record(&self.columns).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv)).map_err(io)?;
        }
        w.into_inner().map_err(|e| Failure::error(format!("csv: {e}")))
    }

    pub fn to_json(&self, cfg: &RunConfig) -> Result<Vec<u8>, Failure> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.to_string(), v.json()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let mut doc = Map::new();
        doc.insert("metadata".into(), Value::Object(self.metadata(cfg)));
        if !self.summary.is_empty() {
            doc.insert("summary".into(), Value::Object(self.summary.clone()));
        }
        doc.insert("rows".into(), Value::Array(rows));
        let mut buf = serde_json::to_vec_pretty(&Value::Object(doc))
            .map_err(|e| Failure::error(format!("json: {e}")))?;
        buf.push(b'\n');
        Ok(buf)
    }

    pub fn render(&self, cfg: &RunConfig) -> Result<Vec<u8>, Failure> {
        self.check_finite()?;
        match cfg.format {
            Format::Csv => self.to_csv(cfg),
            Format::Json => self.to_json(cfg),
        }
    }
}

/// Writes to a temporary file next to `path` and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| Failure::error(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

pub fn emit(table: &Table, cfg: &RunConfig) -> Result<(), Failure> {
    let bytes = table.render(cfg)?;
    match &cfg.out {
        Some(path) => write_atomic(path, &bytes),
        None => std::io::stdout()
            .write_all(&bytes)
            .map_err(|e| Failure::error(format!("stdout: {e}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_text_round_trips() {
        for v in [1.25, 0.1, 1e-300, 2.0f64.powi(60), -3.5e-12] {
            assert_eq!(float_text(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
        assert_eq!(float_text(1.25), "1.25");
    }

    #[test]
    fn sentinels() {
        assert_eq!(Cell::Inf.csv(), "inf");
        assert_eq!(Cell::Inf.json(), Value::Null);
        assert_eq!(Cell::Missing.csv(), "");
    }

    #[test]
    fn rejects_non_finite() {
        let mut t = Table::new("test/1", &["a"]);
        t.push(vec![Cell::Float(f64::NAN)]);
        assert!(t.check_finite().is_err());
        let mut t = Table::new("test/1", &["a"]);
        t.push(vec![Cell::Inf]);
        assert!(t.check_finite().is_ok());
    }
}
