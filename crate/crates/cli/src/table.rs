//! Tabular output as CSV or JSON.

use std::io::Write;

use anyhow::Result;
use serde_json::{json, Map, Value};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Flag(bool),
}

impl Cell {
    fn csv_text(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x:?}"),
            Cell::Text(s) => s.clone(),
            Cell::Flag(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            // Non-finite values become null.
            Cell::Num(x) => Value::from(*x),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Flag(b) => Value::from(*b),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub command: String,
    /// Parameters in the order they are reported.
    pub params: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(command: &str, params: Vec<(String, String)>, columns: Vec<String>) -> Self {
        Self {
            command: command.to_string(),
            params,
            columns,
            rows: Vec::new(),
        }
    }

    #[cfg(test)]
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub fn write_table(table: &Table, format: Format, out: &mut dyn Write) -> Result<()> {
    match format {
        Format::Csv => write_csv(table, out),
        Format::Json => write_json(table, out),
    }
}

fn write_csv(table: &Table, out: &mut dyn Write) -> Result<()> {
    writeln!(out, "# wvlab {}", env!("CARGO_PKG_VERSION"))?;
    writeln!(out, "# command: {}", table.command)?;
    for (k, v) in &table.params {
        writeln!(out, "# {k}: {v}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row.iter().map(Cell::csv_text))?;
    }
    w.flush()?;
    Ok(())
}

fn write_json(table: &Table, out: &mut dyn Write) -> Result<()> {
    let params: Map<String, Value> = table
        .params
        .iter()
        .map(|(k, v)| (k.clone(), Value::from(v.as_str())))
        .collect();
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
        .collect();
    let doc = json!({
        "meta": {
            "schema_version": SCHEMA_VERSION,
            "tool": "wvlab",
            "version": env!("CARGO_PKG_VERSION"),
            "command": table.command,
            "parameters": params,
        },
        "columns": table.columns,
        "rows": rows,
    });
    serde_json::to_writer_pretty(&mut *out, &doc)?;
    writeln!(out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(
            "demo",
            vec![("alpha".into(), "0.3pi".into())],
            vec!["x".into(), "label".into(), "ok".into()],
        );
        t.rows.push(vec![Cell::Num(0.5), Cell::Text("a,b".into()), Cell::Flag(true)]);
        t.rows.push(vec![Cell::Num(f64::NAN), Cell::Text("c".into()), Cell::Flag(false)]);
        t
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_table(&sample(), Format::Csv, &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert!(lines[0].starts_with("# wvlab "));
        assert_eq!(lines[1], "# command: demo");
        assert_eq!(lines[2], "# alpha: 0.3pi");
        assert_eq!(lines[3], "x,label,ok");
        assert_eq!(lines[4], "0.5,\"a,b\",true");
        assert_eq!(lines[5], "NaN,c,false");
    }

    #[test]
    fn json_nan_is_null() {
        let mut buf = Vec::new();
        write_table(&sample(), Format::Json, &mut buf).unwrap();
        let v: Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["meta"]["schema_version"], 1);
        assert_eq!(v["meta"]["parameters"]["alpha"], "0.3pi");
        assert_eq!(v["columns"][1], "label");
        assert!(v["rows"][1][0].is_null());
        assert_eq!(v["rows"][0][1], "a,b");
    }
}
