//! `shadowrec audit`: boundedness of `x_{n+1} = r x_n + 1` against a grid of exact starts.

use serde_json::json;
use shadowrec_core::{remark_audit, AuditReport, GridSpec};

use crate::error::CliError;
use crate::output::{csv_writer, json_num, num, pretty_json};

/// Parses `lo:hi:step`.
pub fn parse_grid(text: &str) -> Result<GridSpec, CliError> {
    let parts: Vec<&str> = text.trim().split(':').collect();
    let [lo, hi, step] = parts[..] else {
        return Err(CliError::config(format!("--grid must look like lo:hi:step, got `{text}`")));
    };
    let field = |s: &str, what: &str| {
        s.trim().parse::<f64>().map_err(|e| CliError::config(format!("--grid {what} `{s}`: {e}")))
    };
    Ok(GridSpec::new(field(lo, "lower end")?, field(hi, "upper end")?, field(step, "step")?)?)
}

pub fn run(r: f64, grid: GridSpec, horizon: usize) -> Result<AuditReport, CliError> {
    Ok(remark_audit(r, grid, horizon)?)
}

pub fn csv_bytes(report: &AuditReport) -> Result<Vec<u8>, CliError> {
    let mut w = csv_writer(Vec::new());
    w.write_record(["y0", "sup", "ln_sup", "bounded", "analytic"])?;
    for row in &report.rows {
        w.write_record([
            num(row.y0),
            num(row.sup),
            num(row.ln_sup),
            row.bounded.to_string(),
            row.analytic.to_string(),
        ])?;
    }
    w.into_inner().map_err(|e| CliError::io("writing CSV", e.into_error()))
}

pub fn summary_bytes(report: &AuditReport) -> Vec<u8> {
    let opt = |x: Option<f64>| x.map_or(serde_json::Value::Null, json_num);
    pretty_json(&json!({
        "r": json_num(report.r),
        "horizon": report.horizon,
        "grid_points": report.rows.iter().filter(|r| !r.analytic).count(),
        "any_bounded": report.any_bounded,
        "min_sup": json_num(report.min_sup),
        "analytic_y0": opt(report.analytic_y0),
        "predicted_bound": opt(report.predicted_bound),
        "prediction_holds": report.prediction_holds,
    }))
}
