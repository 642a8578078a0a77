//! `shadowrec hull`: membership queries against `scale · conv(V^b)`.
//!
//! Set file:
//!
//! ```json
//! {"set": {"polytope": [[1, 0], [0, 1]]}, "scale": 2.0, "tolerance": 1e-9}
//! ```
//!
//! Queries file: one point per line, components separated by commas, complex
//! components written as `re,im` pairs. Blank lines and `#` comments are skipped.

use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;
use shadowrec_core::{symmetric_convex_hull, Field, HullRep, Vector};

use crate::config::{bound_set, FieldDoc, SetDoc};
use crate::error::CliError;
use crate::output::{csv_writer, num, vector_cells, vector_headers};

fn default_scale() -> f64 {
    1.0
}

fn default_tolerance() -> f64 {
    1e-9
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetFile {
    #[serde(default)]
    pub field: Option<FieldDoc>,
    pub set: SetDoc,
    #[serde(default = "default_scale")]
    pub scale: f64,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Required when the set itself does not fix one, as for balls.
    #[serde(default)]
    pub dimension: Option<usize>,
}

/// A validated hull with the settings needed to answer queries.
#[derive(Debug, Clone, PartialEq)]
pub struct HullQuery {
    pub field: Field,
    pub dim: usize,
    pub hull: HullRep,
    pub tolerance: f64,
}

pub fn parse_set_file(bytes: &[u8]) -> Result<HullQuery, CliError> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    let doc: SetFile = serde_path_to_error::deserialize(de)
        .map_err(|e| CliError::config(format!("set file field `{}`: {}", e.path(), e.inner())))?;
    let field = doc.field.map_or(Field::Real, FieldDoc::field);
    let set = bound_set(&doc.set)?;
    let dim = match (set.dim(), doc.dimension) {
        (Some(d), Some(given)) if d != given => {
            return Err(CliError::config(format!("set file field `dimension`: {given} disagrees with the set's {d}")))
        }
        (Some(d), _) | (None, Some(d)) => d,
        (None, None) => return Err(CliError::config("set file field `dimension`: required for a ball")),
    };
    set.validate(field, dim)?;
    if !(doc.scale.is_finite() && doc.scale >= 0.0) {
        return Err(CliError::config(format!(
            "set file field `scale`: must be finite and nonnegative, got {}",
            doc.scale
        )));
    }
    if !(doc.tolerance.is_finite() && doc.tolerance >= 0.0) {
        return Err(CliError::config(format!(
            "set file field `tolerance`: must be finite and nonnegative, got {}",
            doc.tolerance
        )));
    }
    let hull = symmetric_convex_hull(&set, field)?.scale(doc.scale)?;
    Ok(HullQuery { field, dim, hull, tolerance: doc.tolerance })
}

/// Parses the queries file; errors carry 1-based line numbers.
pub fn parse_queries(text: &str, field: Field, dim: usize) -> Result<Vec<Vector>, CliError> {
    let width = match field {
        Field::Real => dim,
        Field::Complex => 2 * dim,
    };
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let values = content
            .split(',')
            .map(|s| {
                let s = s.trim();
                s.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| CliError::config(format!("queries line {}: `{s}` is not a finite number", i + 1)))
            })
            .collect::<Result<Vec<f64>, _>>()?;
        if values.len() != width {
            return Err(CliError::config(format!(
                "queries line {}: expected {width} numbers, found {}",
                i + 1,
                values.len()
            )));
        }
        let components = match field {
            Field::Real => values.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            Field::Complex => values.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect(),
        };
        out.push(Vector::from_components(field, components));
    }
    Ok(out)
}

pub fn load(set_path: &Path, queries_path: &Path) -> Result<(HullQuery, Vec<Vector>), CliError> {
    let set_bytes = std::fs::read(set_path).map_err(|e| CliError::io(format!("reading {}", set_path.display()), e))?;
    let hull = parse_set_file(&set_bytes)?;
    let text = std::fs::read_to_string(queries_path)
        .map_err(|e| CliError::io(format!("reading {}", queries_path.display()), e))?;
    let queries = parse_queries(&text, hull.field, hull.dim)?;
    Ok((hull, queries))
}

/// CSV with one row per query: index, components, distance, membership.
pub fn csv_bytes(hull: &HullQuery, queries: &[Vector]) -> Result<Vec<u8>, CliError> {
    let mut w = csv_writer(Vec::new());
    let mut header = vec!["query".to_string()];
    header.extend(vector_headers("q", hull.field, hull.dim));
    header.extend(["distance".to_string(), "contained".to_string()]);
    w.write_record(&header)?;
    for (i, v) in queries.iter().enumerate() {
        let d = hull.hull.distance(v)?;
        let mut record = vec![i.to_string()];
        record.extend(vector_cells(v));
        record.push(num(d));
        record.push((d <= hull.tolerance).to_string());
        w.write_record(&record)?;
    }
    w.into_inner().map_err(|e| CliError::io("writing CSV", e.into_error()))
}
