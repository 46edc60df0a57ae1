//! Diff-stable text output: `%.12g` numbers, CSV tables and JSON reports.

use serde::Serialize;
use serde_json::Value;

/// Significant digits of every emitted number.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// C `printf("%.*g")` formatting.
pub fn fmt_g(x: f64, precision: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let p = precision.max(1);
    let sci = format!("{:.*e}", p - 1, x);
    let (mantissa, exponent) = sci.split_once('e').expect("exponent present");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    if exponent < -4 || exponent >= p as i32 {
        let sign = if exponent < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", strip_zeros(mantissa), sign, exponent.abs())
    } else {
        let decimals = (p as i32 - 1 - exponent) as usize;
        strip_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn num(x: f64) -> String {
    fmt_g(x, SIGNIFICANT_DIGITS)
}

/// Header plus rows of preformatted cells.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// LF-terminated CSV with a header row.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for line in std::iter::once(&self.header).chain(&self.rows) {
            out.push_str(&line.iter().map(|c| csv_cell(c)).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }

    /// JSON array of objects; numeric cells stay numbers.
    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let map = self
                    .header
                    .iter()
                    .zip(row)
                    .map(|(k, v)| (k.clone(), cell_value(v)))
                    .collect();
                Value::Object(map)
            })
            .collect();
        let mut out = serde_json::to_string_pretty(&rows).expect("JSON rows");
        out.push('\n');
        out
    }
}

fn csv_cell(cell: &str) -> String {
    if cell.contains([',', '"', '\n']) {
        format!("\"{}\"", cell.replace('"', "\"\""))
    } else {
        cell.to_string()
    }
}

fn cell_value(cell: &str) -> Value {
    match cell.parse::<f64>() {
        Ok(x) if x.is_finite() => serde_json::Number::from_f64(x).map_or_else(|| Value::String(cell.into()), Value::Number),
        _ => Value::String(cell.into()),
    }
}

/// Pretty JSON with a trailing LF.
pub fn report_json<T: Serialize>(report: &T) -> String {
    let mut out = serde_json::to_string_pretty(report).expect("serializable report");
    out.push('\n');
    out
}

/// Flattens a report into `key,value` CSV rows; nested keys are dotted.
pub fn report_csv<T: Serialize>(report: &T) -> String {
    let value = serde_json::to_value(report).expect("serializable report");
    let mut table = Table::new(&["key", "value"]);
    flatten("", &value, &mut table);
    table.to_csv()
}

fn flatten(prefix: &str, value: &Value, table: &mut Table) {
    let join = |key: &str| {
        if prefix.is_empty() {
            key.to_string()
        } else {
            format!("{prefix}.{key}")
        }
    };
    match value {
        Value::Object(map) => map.iter().for_each(|(k, v)| flatten(&join(k), v, table)),
        Value::Array(items) => items
            .iter()
            .enumerate()
            .for_each(|(i, v)| flatten(&join(&i.to_string()), v, table)),
        Value::Number(n) => table.push(vec![prefix.into(), num(n.as_f64().unwrap_or(f64::NAN))]),
        Value::Null => table.push(vec![prefix.into(), String::new()]),
        Value::Bool(b) => table.push(vec![prefix.into(), b.to_string()]),
        Value::String(s) => table.push(vec![prefix.into(), s.clone()]),
    }
}
