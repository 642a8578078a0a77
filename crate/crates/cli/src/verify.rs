//! `shadowrec verify`: the shadowing invariants over many random pseudo-orbits.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use shadowrec_core::recurrence::scale_states;
use shadowrec_core::{
    generate_pseudo_orbit, Coefficients, Field, PseudoOrbit, Regime, ShadowResult, ShadowVariant, Vector,
};

use crate::config::Instance;
use crate::error::CliError;
use crate::shadow::{regime_of, shadow_pseudo_orbit};

/// Largest trial count accepted in one invocation.
pub const MAX_TRIALS: usize = 1_000_000;

/// Exact in binary floating point, so scaled runs must reproduce every verdict.
const SCALE: f64 = 2.0;

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub index: usize,
    /// Empty when every invariant held.
    pub problems: Vec<String>,
    /// Largest `|x_n - y_n|` over guaranteed indices, relative to the error set's extent.
    pub depth: f64,
    /// Largest residual relative to its allowance.
    pub residual_ratio: f64,
}

impl TrialOutcome {
    pub fn passed(&self) -> bool {
        self.problems.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifySummary {
    pub regime: Regime,
    pub trials: Vec<TrialOutcome>,
}

impl VerifySummary {
    pub fn passed(&self) -> usize {
        self.trials.iter().filter(|t| t.passed()).count()
    }

    pub fn all_passed(&self) -> bool {
        self.passed() == self.trials.len()
    }

    pub fn worst_depth(&self) -> f64 {
        self.trials.iter().map(|t| t.depth).fold(0.0, f64::max)
    }

    pub fn worst_residual_ratio(&self) -> f64 {
        self.trials.iter().map(|t| t.residual_ratio).fold(0.0, f64::max)
    }

    /// Human-readable report, one line per fact.
    pub fn lines(&self) -> Vec<String> {
        let mut out = vec![
            format!("regime: {}", self.regime.name()),
            format!("trials passed: {}/{}", self.passed(), self.trials.len()),
            format!("worst |x_n - y_n| / error-set extent: {:.6e}", self.worst_depth()),
            format!("worst residual / allowance: {:.6e}", self.worst_residual_ratio()),
        ];
        for t in self.trials.iter().filter(|t| !t.passed()) {
            for p in &t.problems {
                out.push(format!("trial {}: {p}", t.index));
            }
        }
        out
    }
}

/// Independent stream per trial, fixed by the base seed.
fn trial_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// The configured `x0` moved by a random offset in the unit cube.
fn jittered_start(inst: &Instance, rng: &mut ChaCha8Rng) -> Vector {
    let components = inst
        .x0
        .components()
        .iter()
        .map(|c| {
            let re = c.re + rng.random_range(-1.0..=1.0);
            let im = if inst.field == Field::Complex { c.im + rng.random_range(-1.0..=1.0) } else { 0.0 };
            Complex64::new(re, im)
        })
        .collect();
    Vector::from_components(inst.field, components)
}

/// Round-off part of a row's tolerance.
fn rounding(result: &ShadowResult, n: usize, tol: f64) -> f64 {
    let row = &result.rows[n];
    (row.tolerance - tol - row.truncation_bound).max(0.0)
}

fn is_expanding(variant: ShadowVariant) -> bool {
    matches!(variant, ShadowVariant::Expanding | ShadowVariant::ConstantExpanding)
}

fn check(
    inst: &Instance,
    regime: Regime,
    pseudo: &PseudoOrbit,
    result: &ShadowResult,
    problems: &mut Vec<String>,
) -> (f64, f64) {
    let tol = inst.tolerance;
    if !pseudo.violations().is_empty() {
        problems.push(format!("defects outside V at {:?}", pseudo.violations()));
    }
    let failures = result.failures();
    if !failures.is_empty() {
        problems.push(format!("containment failed at {failures:?}"));
    }

    let extent = result.error_set.extent();
    let metric = result.error_set.metric();
    let mut depth: f64 = 0.0;
    for row in result.rows.iter().filter(|r| r.guaranteed) {
        if let Ok(d) = metric.eval(&row.diff) {
            depth = depth.max(if extent > 0.0 { d / extent } else { d });
        }
    }

    let mut residual_ratio: f64 = 0.0;
    if is_expanding(result.variant) {
        let coeff = |n: usize| inst.a.coeff_at(n).map(|a| a.abs()).unwrap_or(f64::NAN);
        for (n, &res) in result.residuals.iter().enumerate() {
            let an = coeff(n);
            let allowed = 2.0 * result.truncation_bound * (1.0 + an)
                + an * rounding(result, n, tol)
                + rounding(result, n + 1, tol);
            residual_ratio = residual_ratio.max(if allowed > 0.0 {
                res / allowed
            } else if res == 0.0 {
                0.0
            } else {
                f64::INFINITY
            });
        }
        // One exact step from the reconstructed y_n must land on y_{n+1}.
        for n in 0..result.rows.len().saturating_sub(1) {
            let a = match inst.a.coeff_at(n) {
                Ok(a) => a,
                Err(e) => {
                    problems.push(e.to_string());
                    break;
                }
            };
            let stepped = &result.rows[n].diff.scale(a) + &pseudo.defects()[n];
            let gap = inst.family.eval_max(&(&stepped - &result.rows[n + 1].diff)).unwrap_or(f64::INFINITY);
            let allowed = a.abs() * (result.rows[n].truncation_bound + rounding(result, n, tol))
                + result.rows[n + 1].truncation_bound
                + rounding(result, n + 1, tol);
            if gap > allowed {
                problems.push(format!("tail sums at {n} and {} disagree by {gap:e} (allowed {allowed:e})", n + 1));
                break;
            }
        }
    } else {
        let scale = result.orbit.states().iter().filter_map(|y| inst.family.eval_max(y).ok()).fold(1.0, f64::max);
        residual_ratio = result.max_residual() / (1e-8 * scale);
    }
    if residual_ratio > 1.0 {
        problems.push(format!("exact-orbit residual exceeds its allowance by a factor {residual_ratio:e}"));
    }
    if let Some(gap) = result.formula_discrepancy {
        if gap > 1e-10 {
            problems.push(format!("difference deviates from the finite-sum formula by {gap:e} (relative)"));
        }
    }

    // Linearity: scaling V, the defects and the forcing scales every difference.
    let mut scaled = inst.clone();
    scaled.b = inst.b.scaled(SCALE);
    scaled.set = inst.set.scaled(SCALE);
    scaled.tolerance = tol * SCALE;
    let scaled_pseudo =
        PseudoOrbit::from_states(scale_states(pseudo.states(), SCALE), &inst.a, &scaled.b, scaled.set.clone(), 0.0);
    match scaled_pseudo.map_err(CliError::from).and_then(|p| shadow_pseudo_orbit(&scaled, regime, &p)) {
        Ok(other) => {
            let same = other.rows.len() == result.rows.len()
                && other.rows.iter().zip(&result.rows).all(|(u, v)| u.contained == v.contained);
            if !same {
                problems.push(format!("verdicts changed when the instance was scaled by {SCALE}"));
            }
        }
        Err(e) => problems.push(format!("scaled run failed: {e}")),
    }
    (depth, residual_ratio)
}

fn trial(inst: &Instance, regime: Regime, index: usize) -> TrialOutcome {
    let mut rng = trial_rng(inst.seed, index);
    let x0 = jittered_start(inst, &mut rng);
    let seed = rng.random::<u64>();
    let mut problems = Vec::new();
    let outcome = generate_pseudo_orbit(&x0, &inst.a, &inst.b, &inst.set, inst.horizon, &inst.sampler, seed)
        .map_err(CliError::from)
        .and_then(|p| shadow_pseudo_orbit(inst, regime, &p).map(|r| (p, r)));
    let (depth, residual_ratio) = match outcome {
        Ok((pseudo, result)) => check(inst, regime, &pseudo, &result, &mut problems),
        Err(e) => {
            problems.push(e.to_string());
            (f64::NAN, f64::NAN)
        }
    };
    TrialOutcome { index, problems, depth, residual_ratio }
}

/// Runs `trials` independent instances in parallel; the outcome order and
/// content depend only on the config.
pub fn run(inst: &Instance, trials: usize) -> Result<VerifySummary, CliError> {
    if trials == 0 || trials > MAX_TRIALS {
        return Err(CliError::config(format!("--trials must lie in [1, {MAX_TRIALS}]")));
    }
    let regime = regime_of(inst)?.regime;
    let trials = (0..trials).into_par_iter().map(|i| trial(inst, regime, i)).collect();
    Ok(VerifySummary { regime, trials })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    fn instance(coefficients: &str, set: &str) -> Instance {
        let doc = format!(
            r#"{{
                "field": "real",
                "dimension": 2,
                "coefficients": {coefficients},
                "forcing": {{"constant": [0.5, -0.25]}},
                "perturbation_set": {set},
                "seminorms": ["l1", "linf"],
                "horizon": 120,
                "tolerance": 1e-10,
                "seed": 11
            }}"#
        );
        parse_config(doc.as_bytes()).unwrap().validate().unwrap()
    }

    #[test]
    fn expanding_trials_pass() {
        let inst = instance(r#"{"periodic": [2.0, -1.5, 3.0]}"#, r#"{"ball": {"norm": "l2", "radius": 0.5}}"#);
        let summary = run(&inst, 16).unwrap();
        assert!(summary.all_passed(), "{:?}", summary.lines());
        assert!(summary.worst_depth() <= 1.0);
    }

    #[test]
    fn contracting_trials_pass() {
        let inst = instance(r#"{"constant": -0.6}"#, r#"{"polytope": [[1.0, 0.0], [0.0, 1.0], [0.5, 0.5]]}"#);
        let summary = run(&inst, 16).unwrap();
        assert!(summary.all_passed(), "{:?}", summary.lines());
        let inst = instance(
            r#"{"eventually_constant": {"prefix": [3.0, 0.2], "tail": 0.5}}"#,
            r#"{"ball": {"norm": "l1", "radius": 1.0}}"#,
        );
        assert!(run(&inst, 16).unwrap().all_passed());
    }

    #[test]
    fn zero_trials_is_a_config_error() {
        let inst = instance(r#"{"constant": 2.0}"#, r#"{"ball": {"norm": "l2", "radius": 0.5}}"#);
        assert!(matches!(run(&inst, 0), Err(CliError::Config(_))));
    }

    #[test]
    fn deterministic_outcomes() {
        let inst = instance(r#"{"constant": 3.0}"#, r#"{"ball": {"norm": "linf", "radius": 0.1}}"#);
        assert_eq!(run(&inst, 8).unwrap(), run(&inst, 8).unwrap());
    }
}
