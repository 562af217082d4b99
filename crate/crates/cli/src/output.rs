use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::args::OutputFormat;
use crate::job::Manifest;

/// Rows mirrored into CSV.
#[derive(Debug, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

#[derive(Debug)]
pub enum Output {
    /// One JSON document.
    Doc { report: Value, table: Table },
    /// JSON lines after a manifest line.
    Lines { records: Vec<Value>, table: Table },
}

fn int(v: &BigInt) -> Value {
    match v.to_u64() {
        Some(u) => json!(u),
        None => json!(v.to_string()),
    }
}

pub fn big(r: &BigRational) -> Value {
    json!({ "num": int(r.numer()), "den": int(r.denom()), "decimal": r.to_f64() })
}

pub fn small(r: Ratio<u64>) -> Value {
    json!({
        "num": *r.numer(),
        "den": *r.denom(),
        "decimal": *r.numer() as f64 / *r.denom() as f64,
    })
}

pub fn big_parts(r: &BigRational) -> (Value, Value) {
    (int(r.numer()), int(r.denom()))
}

pub fn render(manifest: &Manifest, output: &Output) -> Result<String, String> {
    let text = match (manifest.format, output) {
        (OutputFormat::Json, Output::Doc { report, .. }) => {
            let doc = json!({ "manifest": manifest, "report": report });
            let mut s = serde_json::to_string_pretty(&doc).map_err(|e| e.to_string())?;
            s.push('\n');
            s
        }
        (OutputFormat::Json, Output::Lines { records, .. }) => {
            let mut s = serde_json::to_string(&json!({ "manifest": manifest }))
                .map_err(|e| e.to_string())?;
            s.push('\n');
            for r in records {
                s.push_str(&serde_json::to_string(r).map_err(|e| e.to_string())?);
                s.push('\n');
            }
            s
        }
        (OutputFormat::Csv, Output::Doc { table, .. } | Output::Lines { table, .. }) => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&table.header).map_err(|e| e.to_string())?;
            for row in &table.rows {
                w.write_record(row).map_err(|e| e.to_string())?;
            }
            let bytes = w.into_inner().map_err(|e| e.to_string())?;
            String::from_utf8(bytes).map_err(|e| e.to_string())?
        }
    };
    Ok(text)
}
