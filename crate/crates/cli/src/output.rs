//! Tabular and document output. CSV floats carry 17 significant digits;
//! JSON floats use the shortest representation that round-trips.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::config::{Format, RunConfig};
use crate::error::CliResult;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
    Empty,
}

impl Cell {
    fn csv_field(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_float(*v),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json_value(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Float(v) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(u64::from(v))
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Float)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

/// 17 significant digits in scientific notation, which round-trips every f64.
pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn write_csv<W: Write>(&self, sink: W) -> CliResult<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(sink);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv_field))?;
        }
        w.flush()?;
        Ok(())
    }

    fn to_json(&self, command: &str) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> =
                    self.columns.iter().zip(row).map(|(c, v)| ((*c).to_owned(), v.json_value())).collect();
                Value::Object(obj)
            })
            .collect();
        json!({ "schema_version": SCHEMA_VERSION, "command": command, "columns": self.columns, "rows": rows })
    }
}

/// What a command produces: the payload plus the names of any failed checks.
#[derive(Debug)]
pub struct Output {
    pub body: Body,
    pub failures: Vec<String>,
}

#[derive(Debug)]
pub enum Body {
    Table(Table),
    /// A JSON document; rendered as `key,value` rows for CSV when flat.
    Document(Value),
    /// Preformatted text, used for the verify report.
    Text(String),
}

impl Output {
    pub fn table(table: Table) -> Self {
        Self { body: Body::Table(table), failures: Vec::new() }
    }

    fn rows(&self) -> Option<usize> {
        match &self.body {
            Body::Table(t) => Some(t.rows.len()),
            _ => None,
        }
    }

    fn render<W: Write>(&self, cfg: &RunConfig, mut sink: W) -> CliResult<()> {
        match (&self.body, cfg.format) {
            (Body::Table(t), Format::Csv) => t.write_csv(sink)?,
            (Body::Table(t), Format::Json) => write_json(&t.to_json(&cfg.command), &mut sink)?,
            (Body::Document(v), Format::Json) => write_json(v, &mut sink)?,
            (Body::Document(v), Format::Csv) => flatten_document(v).write_csv(sink)?,
            (Body::Text(s), _) => sink.write_all(s.as_bytes())?,
        }
        Ok(())
    }
}

fn write_json<W: Write>(value: &Value, sink: &mut W) -> CliResult<()> {
    serde_json::to_writer_pretty(&mut *sink, value)?;
    sink.write_all(b"\n")?;
    Ok(())
}

/// `key,value` rows with nested objects joined by `.`.
fn flatten_document(value: &Value) -> Table {
    fn walk(prefix: &str, v: &Value, table: &mut Table) {
        match v {
            Value::Object(map) => {
                for (k, child) in map {
                    let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    walk(&key, child, table);
                }
            }
            Value::Number(n) if n.is_f64() => {
                table.push(vec![Cell::Text(prefix.to_owned()), Cell::Float(n.as_f64().unwrap_or(f64::NAN))])
            }
            Value::Null => table.push(vec![Cell::Text(prefix.to_owned()), Cell::Empty]),
            Value::String(s) => table.push(vec![Cell::Text(prefix.to_owned()), Cell::Text(s.clone())]),
            other => table.push(vec![Cell::Text(prefix.to_owned()), Cell::Text(other.to_string())]),
        }
    }
    let mut table = Table::new(vec!["key", "value"]);
    walk("", value, &mut table);
    table
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

/// Writes the payload to `out` (plus its sidecar) or to stdout.
pub fn emit(output: &Output, cfg: &RunConfig, out: Option<&Path>) -> CliResult<()> {
    match out {
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            output.render(cfg, &mut lock)?;
            lock.flush()?;
        }
        Some(path) => {
            let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
            output.render(cfg, &mut file)?;
            file.flush()?;
            let meta = json!({
                "schema_version": SCHEMA_VERSION,
                "tool": "magsteklov",
                "version": env!("CARGO_PKG_VERSION"),
                "config": cfg,
                "rows": output.rows(),
                "failed_checks": output.failures,
            });
            let mut side = std::io::BufWriter::new(std::fs::File::create(sidecar_path(path))?);
            write_json(&meta, &mut side)?;
            side.flush()?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_with_17_digits() {
        for v in [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, 0.0] {
            let s = format_float(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
            let mantissa = s.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17, "{s}");
        }
    }

    #[test]
    fn documents_flatten_with_dotted_keys() {
        let t = flatten_document(&json!({"a": 1.5, "b": {"c": 2.5, "d": null}}));
        let keys: Vec<_> = t.rows.iter().map(|r| r[0].clone()).collect();
        assert_eq!(keys, vec![Cell::from("a"), Cell::from("b.c"), Cell::from("b.d")]);
    }

    #[test]
    fn sidecar_appends_suffix() {
        assert_eq!(sidecar_path(Path::new("/tmp/x.csv")), PathBuf::from("/tmp/x.csv.meta.json"));
    }
}
