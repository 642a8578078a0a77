//! The contracting regime, where the exact orbit from `y_0 = x_0` shadows.

use crate::error::{Error, Result};
use crate::numeric::{NeumaierSum, VectorSum};
use crate::recurrence::{defects, propagate, PseudoOrbit};
use crate::scalar::{Scalar, Vector};
use crate::seminorm::SeminormFamily;
use crate::sequence::{CoefficientSpec, Coefficients, ForcingSpec};
use crate::sets::symmetric_convex_hull;

use super::{check_family, choose_contracting_q, IndexVerdict, ShadowResult, ShadowVariant};

/// `M = Σ_{k=1}^{n0-1} |a_k⋯a_{n0-1}| + 1/(1-q)`.
fn stability_constant(a: &CoefficientSpec, q: f64, n0: usize) -> Result<f64> {
    let mut sum = NeumaierSum::default();
    let mut product = 1.0;
    for k in (1..n0).rev() {
        product *= a.coeff_at(k)?.abs();
        sum += product;
    }
    sum += 1.0 / (1.0 - q);
    Ok(sum.value())
}

/// Shadow orbit for `limsup |a_n| < 1`, guaranteed for `n >= n0`.
pub fn shadow_contracting(
    p: &PseudoOrbit,
    a: &CoefficientSpec,
    b: &ForcingSpec,
    family: &SeminormFamily,
    q_override: Option<f64>,
    tol: f64,
) -> Result<ShadowResult> {
    let (q, n0) = choose_contracting_q(a, q_override)?;
    let constant = stability_constant(a, q, n0)?;
    build(p, a, b, family, tol, constant, n0, Some(q), ShadowVariant::Contracting)
}

/// Shadow orbit for a constant coefficient `|a| < 1`, guaranteed from `n = 0`.
/// Each difference is cross-checked against `Σ_{k=1}^n a^{n-k} c_{k-1}`.
pub fn shadow_constant_contracting(
    p: &PseudoOrbit,
    a: Scalar,
    b: &ForcingSpec,
    family: &SeminormFamily,
    tol: f64,
) -> Result<ShadowResult> {
    if a.abs().is_nan() || a.abs() >= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "constant coefficient must satisfy |a| < 1, got |a| = {}",
            a.abs()
        )));
    }
    let mut result = build(p, &a, b, family, tol, 1.0 / (1.0 - a.abs()), 0, None, ShadowVariant::ConstantContracting)?;

    let c = defects(p.states(), &a, b)?;
    let metric = result.error_set.metric();
    let mut worst: f64 = 0.0;
    for (n, row) in result.rows.iter().enumerate() {
        let mut sum = VectorSum::new(p.field(), p.dim());
        let mut mass = 0.0;
        for k in 1..=n {
            let term = c[k - 1].scale(power(a, n - k));
            mass += metric.eval(&term)?;
            sum.add(&term);
        }
        let formula = sum.value();
        let scale = mass.max(metric.eval(&p.states()[n])?).max(metric.eval(&result.orbit.states()[n])?);
        if scale > 0.0 {
            worst = worst.max(metric.eval(&(&row.diff - &formula))? / scale);
        }
    }
    result.formula_discrepancy = Some(worst);
    Ok(result)
}

/// `a^k` by repeated squaring, with `0^0 = 1`.
fn power(a: Scalar, mut k: usize) -> Scalar {
    let mut result = Scalar::one(a.field());
    let mut base = a;
    while k > 0 {
        if k & 1 == 1 {
            result = result * base;
        }
        base = base * base;
        k >>= 1;
    }
    result
}

#[allow(clippy::too_many_arguments)]
fn build<A: Coefficients + ?Sized>(
    p: &PseudoOrbit,
    a: &A,
    b: &ForcingSpec,
    family: &SeminormFamily,
    tol: f64,
    constant: f64,
    n0: usize,
    q: Option<f64>,
    variant: ShadowVariant,
) -> Result<ShadowResult> {
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(Error::InvalidParameter(format!("tolerance must be nonnegative and finite, got {tol}")));
    }
    check_family(family, p.dim(), p.field())?;
    let hull = symmetric_convex_hull(p.set(), p.field())?;
    let error_set = hull.scale(constant)?;
    let metric = error_set.metric();
    let orbit = propagate(&p.states()[0], a, b, p.horizon())?;

    let mut rows = Vec::with_capacity(orbit.states().len());
    for (n, (x, y)) in p.states().iter().zip(orbit.states()).enumerate() {
        let diff = x - y;
        let rounding = 8.0 * f64::EPSILON * (n as f64 + 1.0) * (metric.eval(x)? + metric.eval(y)?);
        let tolerance = tol + rounding;
        rows.push(IndexVerdict {
            n,
            distances: family.eval_all(&diff)?,
            contained: error_set.contains(&diff, tolerance)?,
            diff,
            truncation_bound: 0.0,
            tolerance,
            guaranteed: n >= n0,
        });
    }
    let residuals = defects(orbit.states(), a, b)?.iter().map(|r| family.eval_max(r)).collect::<Result<Vec<_>>>()?;

    Ok(ShadowResult {
        variant,
        series_value: Vector::zeros(p.field(), p.dim()),
        orbit,
        q,
        n0,
        stability_constant: constant,
        error_set,
        rows,
        truncation_bound: 0.0,
        residuals,
        formula_discrepancy: None,
    })
}
