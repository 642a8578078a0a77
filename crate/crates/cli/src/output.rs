//! Number formatting and small CSV/JSON helpers shared by the commands.

use std::fs;
use std::path::Path;

use serde_json::{json, Value};
use shadowrec_core::{Field, Vector};

use crate::error::CliError;

/// 17 significant digits, enough for any `f64` to round-trip.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Column names for a vector quantity: `x_0, x_1` or `x_0_re, x_0_im, ...`.
pub fn vector_headers(prefix: &str, field: Field, dim: usize) -> Vec<String> {
    (0..dim)
        .flat_map(|i| match field {
            Field::Real => vec![format!("{prefix}_{i}")],
            Field::Complex => vec![format!("{prefix}_{i}_re"), format!("{prefix}_{i}_im")],
        })
        .collect()
}

pub fn vector_cells(v: &Vector) -> Vec<String> {
    v.components()
        .iter()
        .flat_map(|c| match v.field() {
            Field::Real => vec![num(c.re)],
            Field::Complex => vec![num(c.re), num(c.im)],
        })
        .collect()
}

/// JSON number, or `null` when not finite.
pub fn json_num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn json_vector(v: &Vector) -> Value {
    match v.field() {
        Field::Real => Value::Array(v.components().iter().map(|c| json_num(c.re)).collect()),
        Field::Complex => {
            Value::Array(v.components().iter().map(|c| json!([json_num(c.re), json_num(c.im)])).collect())
        }
    }
}

pub fn csv_writer<W: std::io::Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::io(format!("writing {}", path.display()), e))
}

pub fn pretty_json(value: &Value) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("JSON values always serialize");
    bytes.push(b'\n');
    bytes
}
