//! Tabular scan results and their CSV/JSON encodings.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub params: Vec<f64>,
    pub value: f64,
    pub target: f64,
    pub err_estimate: f64,
    pub seconds: f64,
}

impl ScanRow {
    pub fn abs_err(&self) -> f64 {
        (self.value - self.target).abs()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub param_names: Vec<String>,
    pub rows: Vec<ScanRow>,
}

impl ScanReport {
    pub fn new<S: Into<String>>(param_names: impl IntoIterator<Item = S>) -> Self {
        ScanReport { param_names: param_names.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, params: Vec<f64>, value: f64, target: f64, err_estimate: f64, seconds: f64) {
        debug_assert_eq!(params.len(), self.param_names.len());
        self.rows.push(ScanRow { params, value, target, err_estimate, seconds });
    }

    pub fn header(&self) -> Vec<String> {
        let mut h = self.param_names.clone();
        h.extend(["value", "target", "abs_err", "err_estimate", "seconds"].map(String::from));
        h
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header().join(",");
        out.push('\n');
        for row in &self.rows {
            let mut cells: Vec<String> = row.params.iter().map(|v| fmt_number(*v)).collect();
            for v in [row.value, row.target, row.abs_err(), row.err_estimate, row.seconds] {
                cells.push(fmt_number(v));
            }
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// One JSON object per row, keyed by the CSV column names.
    pub fn to_json(&self) -> serde_json::Value {
        let header = self.header();
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = serde_json::Map::new();
                let values = row
                    .params
                    .iter()
                    .copied()
                    .chain([row.value, row.target, row.abs_err(), row.err_estimate, row.seconds]);
                for (name, v) in header.iter().zip(values) {
                    obj.insert(name.clone(), json_number(v));
                }
                serde_json::Value::Object(obj)
            })
            .collect();
        serde_json::Value::Array(rows)
    }
}

/// Integers print exactly; everything else with 12 significant digits.
pub fn fmt_number(v: f64) -> String {
    if v.is_finite() && v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else if v.is_finite() {
        format!("{:.11e}", v)
    } else {
        format!("{v}")
    }
}

/// A JSON number that round-trips the 12-significant-digit text form.
pub fn json_number(v: f64) -> serde_json::Value {
    let text = fmt_number(v);
    match text.parse::<f64>() {
        Ok(x) if x.is_finite() => {
            if x.fract() == 0.0 && x.abs() < 1e15 {
                serde_json::Value::from(x as i64)
            } else {
                serde_json::Value::from(x)
            }
        }
        _ => serde_json::Value::String(text),
    }
}
