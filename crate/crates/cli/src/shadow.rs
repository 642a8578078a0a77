//! `shadowrec shadow`: one pseudo-orbit, its shadow and the report files.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use shadowrec_core::{
    classify_regime, generate_pseudo_orbit, shadow_constant_contracting, shadow_constant_expanding, shadow_contracting,
    shadow_expanding, CoeffLaw, Error, PseudoOrbit, Regime, RegimeClassification, ShadowResult,
};

use crate::config::Instance;
use crate::error::CliError;
use crate::output::{csv_writer, json_num, json_vector, num, pretty_json, vector_cells, vector_headers, write_file};

#[derive(Debug, Clone)]
pub struct ShadowRun {
    pub regime: RegimeClassification,
    pub pseudo: PseudoOrbit,
    pub result: ShadowResult,
}

impl ShadowRun {
    /// Guaranteed containments hold and every defect lies in `V`.
    pub fn passed(&self) -> bool {
        self.result.all_guaranteed_contained() && self.pseudo.violations().is_empty()
    }
}

/// Classifies the coefficients, refusing the regimes without a guarantee.
pub fn regime_of(inst: &Instance) -> Result<RegimeClassification, CliError> {
    let regime = classify_regime(&inst.a).map_err(|e| match e {
        Error::AsymptoticsUnavailable => CliError::config(
            "explicit coefficient lists have no tail law, so the regime is unknown; \
             use constant, periodic or eventually_constant coefficients",
        ),
        other => other.into(),
    })?;
    if regime.regime == Regime::Critical {
        return Err(CliError::config(format!(
            "coefficient regime is critical (liminf |a_n| = {}, limsup |a_n| = {}): no shadowing guarantee applies; \
             explore this case with `shadowrec audit`",
            regime.liminf_abs, regime.limsup_abs
        )));
    }
    Ok(regime)
}

/// Shadows an already generated pseudo-orbit with the variant matching the coefficients.
pub fn shadow_pseudo_orbit(inst: &Instance, regime: Regime, pseudo: &PseudoOrbit) -> Result<ShadowResult, CliError> {
    let (b, family, tol) = (&inst.b, &inst.family, inst.tolerance);
    let result = match (regime, inst.a.law(), inst.q_override) {
        (Regime::Expanding, CoeffLaw::Constant(a), None) => shadow_constant_expanding(pseudo, *a, b, family, tol),
        (Regime::Expanding, _, q) => shadow_expanding(pseudo, &inst.a, b, family, q, tol),
        (Regime::Contracting, CoeffLaw::Constant(a), None) => shadow_constant_contracting(pseudo, *a, b, family, tol),
        (Regime::Contracting, _, q) => shadow_contracting(pseudo, &inst.a, b, family, q, tol),
        (Regime::Critical, _, _) => unreachable!("critical regimes are rejected by regime_of"),
    };
    result.map_err(|e| match e {
        Error::HorizonInsufficient { available, needed, tolerance } => CliError::config(format!(
            "config field `horizon`: {available} steps cannot resolve even x_0 at tolerance {tolerance:e}; \
             about {needed} are needed"
        )),
        other => other.into(),
    })
}

pub fn run(inst: &Instance) -> Result<ShadowRun, CliError> {
    let regime = regime_of(inst)?;
    let pseudo = generate_pseudo_orbit(&inst.x0, &inst.a, &inst.b, &inst.set, inst.horizon, &inst.sampler, inst.seed)?;
    let result = shadow_pseudo_orbit(inst, regime.regime, &pseudo)?;
    Ok(ShadowRun { regime, pseudo, result })
}

/// Per-index table over the resolved horizon.
pub fn csv_bytes(inst: &Instance, run: &ShadowRun) -> Result<Vec<u8>, CliError> {
    let mut w = csv_writer(Vec::new());
    let mut header = vec!["n".to_string()];
    for prefix in ["x", "y", "diff"] {
        header.extend(vector_headers(prefix, inst.field, inst.dim));
    }
    for (i, p) in inst.family.members().iter().enumerate() {
        header.push(format!("dist_{i}_{p}"));
    }
    header.extend(["tolerance", "contained", "guaranteed"].map(String::from));
    w.write_record(&header)?;

    for (row, y) in run.result.rows.iter().zip(run.result.orbit.states()) {
        let mut record = vec![row.n.to_string()];
        record.extend(vector_cells(&run.pseudo.states()[row.n]));
        record.extend(vector_cells(y));
        record.extend(vector_cells(&row.diff));
        record.extend(row.distances.iter().map(|&d| num(d)));
        record.push(num(row.tolerance));
        record.push(row.contained.to_string());
        record.push(row.guaranteed.to_string());
        w.write_record(&record)?;
    }
    w.into_inner().map_err(|e| CliError::io("writing CSV", e.into_error()))
}

pub fn summary(inst: &Instance, run: &ShadowRun) -> Value {
    let r = &run.result;
    json!({
        "regime": run.regime.regime.name(),
        "liminf_abs": json_num(run.regime.liminf_abs),
        "limsup_abs": json_num(run.regime.limsup_abs),
        "variant": r.variant.name(),
        "q": r.q.map_or(Value::Null, json_num),
        "n0": r.n0,
        "s": json_vector(&r.series_value),
        "stability_constant": json_num(r.stability_constant),
        "error_set": r.error_set.to_string(),
        "truncation_bound": json_num(r.truncation_bound),
        "tolerance": json_num(inst.tolerance),
        "horizon": inst.horizon,
        "resolved_horizon": r.resolved_horizon(),
        "seed": inst.seed,
        "seminorms": inst.family.members().iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        "defect_violations": run.pseudo.violations(),
        "failures": r.failures(),
        "all_guaranteed_contained": r.all_guaranteed_contained(),
        "max_residual": json_num(r.max_residual()),
        "formula_discrepancy": r.formula_discrepancy.map_or(Value::Null, json_num),
        "verdict": if run.passed() { "pass" } else { "fail" },
    })
}

/// Writes the CSV table and the JSON summary into `out_dir`; returns their paths.
pub fn write_outputs(inst: &Instance, run: &ShadowRun, out_dir: &Path) -> Result<(PathBuf, PathBuf), CliError> {
    fs::create_dir_all(out_dir).map_err(|e| CliError::io(format!("creating {}", out_dir.display()), e))?;
    let csv_path = out_dir.join(&inst.outputs.csv);
    let summary_path = out_dir.join(&inst.outputs.summary);
    write_file(&csv_path, &csv_bytes(inst, run)?)?;
    write_file(&summary_path, &pretty_json(&summary(inst, run)))?;
    Ok((csv_path, summary_path))
}
