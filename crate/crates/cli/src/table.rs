//! Column tables and their CSV/JSON forms.

use serde_json::{json, Value};

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// Free-form notes emitted as `#` lines after the schema line.
    pub comments: Vec<String>,
    pub columns: Vec<String>,
    /// `None` is written as an empty CSV field or JSON null.
    pub rows: Vec<Vec<Option<f64>>>,
}

/// Shortest round-trip decimal, switching to exponent form outside [1e-4, 1e15).
pub fn format_number(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e15).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut out = format!("# schema: {}\n", self.columns.join(","));
        for c in &self.comments {
            out.push_str("# ");
            out.push_str(c);
            out.push('\n');
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let fields: Vec<String> = row.iter().map(|v| v.map(format_number).unwrap_or_default()).collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(|v| v.map_or(Value::Null, |x| json!(x))).collect()))
            .collect();
        json!({ "columns": self.columns, "notes": self.comments, "rows": rows })
    }

    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}
