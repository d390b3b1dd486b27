//! Command output: a JSON document, CSV rows and a plain-text rendering.

use std::io::Write;

use serde::Serialize;
use serde_json::{json, Value};

use super::config::Format;
use crate::error::{Error, Result};

pub const TOOL: &str = "expfun";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// JSON number, with infinities spelled as strings.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        Value::Null
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

pub fn opt_num(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

pub fn fmt_num(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CsvRow {
    pub model: String,
    pub n: String,
    pub s: String,
    pub t: String,
    pub method: String,
    pub verdict: String,
    pub value: String,
    pub error: String,
    pub evaluations: String,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub json: Value,
    pub rows: Vec<CsvRow>,
    pub text: String,
    pub exit: i32,
}

impl Report {
    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Text => Ok(self.text.clone()),
            Format::Json => serde_json::to_string_pretty(&self.json)
                .map(|s| s + "\n")
                .map_err(|e| Error::InvalidQuery(format!("json: {e}"))),
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                for r in &self.rows {
                    w.serialize(r).map_err(|e| Error::InvalidQuery(format!("csv: {e}")))?;
                }
                let bytes = w.into_inner().map_err(|e| Error::InvalidQuery(format!("csv: {e}")))?;
                String::from_utf8(bytes).map_err(|e| Error::InvalidQuery(format!("csv: {e}")))
            }
        }
    }

    /// Writes the report to `path` (when given) and the text or
    /// requested format to `out`.
    pub fn emit(&self, format: Format, path: Option<&std::path::Path>, out: &mut dyn Write) -> Result<()> {
        let io = |e: std::io::Error| Error::InvalidQuery(format!("write failed: {e}"));
        match path {
            Some(p) => {
                std::fs::write(p, self.render(format)?)
                    .map_err(|e| Error::InvalidQuery(format!("cannot write {}: {e}", p.display())))?;
                out.write_all(self.text.as_bytes()).map_err(io)
            }
            None => out.write_all(self.render(format)?.as_bytes()).map_err(io),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinities_as_strings() {
        assert_eq!(num(f64::INFINITY), json!("inf"));
        assert_eq!(num(1.5), json!(1.5));
        assert_eq!(num(f64::NAN), Value::Null);
        assert_eq!(fmt_num(f64::INFINITY), "inf");
    }

    #[test]
    fn csv_header_is_fixed() {
        let r = Report {
            json: Value::Null,
            rows: vec![CsvRow {
                model: "m".into(),
                n: "1".into(),
                s: "0".into(),
                t: "inf".into(),
                method: "closed-form".into(),
                verdict: "finite".into(),
                value: "0.25".into(),
                error: "0".into(),
                evaluations: "1".into(),
            }],
            text: String::new(),
            exit: 0,
        };
        let csv = r.render(Format::Csv).unwrap();
        assert!(csv.starts_with("model,n,s,t,method,verdict,value,error,evaluations\n"));
    }
}
