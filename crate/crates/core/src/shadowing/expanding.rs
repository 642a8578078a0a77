//! The expanding regime: the series `s` and per-index tail sums.

use crate::error::{Error, Result};
use crate::numeric::{ProductAbs, VectorSum};
use crate::recurrence::{defects, Orbit, PseudoOrbit};
use crate::scalar::{Field, Scalar, Vector};
use crate::seminorm::{Seminorm, SeminormFamily};
use crate::sequence::{CoefficientSpec, Coefficients, ForcingSpec};
use crate::sets::{symmetric_convex_hull, HullRep};

use super::{check_family, choose_q, defect_bound, IndexVerdict, ShadowResult, ShadowVariant};

/// Cap on the coefficients scanned when estimating how many defects a tolerance needs.
const ESTIMATE_LIMIT: usize = 10_000_000;

/// `s = Σ c_n / (a_0⋯a_n)` truncated after `terms_used` terms.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesValue {
    pub s: Vector,
    /// Rigorous bound on the omitted tail in every family seminorm.
    pub truncation_bound: f64,
    pub terms_used: usize,
}

/// `x_n - y_n` as a truncated tail sum.
#[derive(Debug, Clone, PartialEq)]
pub struct TailDifference {
    pub diff: Vector,
    pub bound: f64,
    pub terms_used: usize,
    /// Allowance for round-off in the recomputed defects and the summation.
    pub rounding: f64,
}

/// Everything a tail sum needs, with the defects recomputed from the states.
pub(crate) struct TailContext<'a, A: Coefficients + ?Sized> {
    a: &'a A,
    b: &'a ForcingSpec,
    states: &'a [Vector],
    /// Largest seminorm in play of a vector with unit component moduli.
    per_modulus: f64,
    pub(crate) defects: Vec<Vector>,
    q: f64,
    n0: usize,
    /// Worst-case size of any defect in `V`.
    pub(crate) defect_bound: f64,
    tol: f64,
    field: Field,
    dim: usize,
}

impl<'a, A: Coefficients + ?Sized> TailContext<'a, A> {
    pub(crate) fn new(
        p: &'a PseudoOrbit,
        a: &'a A,
        b: &'a ForcingSpec,
        family: &SeminormFamily,
        hull: &HullRep,
        (q, n0): (f64, usize),
        tol: f64,
    ) -> Result<Self> {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::InvalidParameter(format!("tolerance must be positive and finite, got {tol}")));
        }
        check_family(family, p.dim(), p.field())?;
        let defects = defects(p.states(), a, b)?;
        let defect_bound = defect_bound(p.set(), family, hull, p.dim())?;
        let mut per_modulus = hull.metric().sup_over_unit_ball(&Seminorm::LInf, p.dim())?;
        for m in family.members() {
            per_modulus = per_modulus.max(m.sup_over_unit_ball(&Seminorm::LInf, p.dim())?);
        }
        Ok(TailContext {
            a,
            b,
            states: p.states(),
            per_modulus,
            defects,
            q,
            n0,
            defect_bound,
            tol,
            field: p.field(),
            dim: p.dim(),
        })
    }

    /// `R / ((q - 1) |a_n⋯a_{n+K-1}|)`.
    fn geometric_bound(&self, product: &ProductAbs) -> f64 {
        if self.defect_bound == 0.0 {
            return 0.0;
        }
        (self.defect_bound.ln() - (self.q - 1.0).ln() - product.ln()).exp()
    }

    /// Smallest number of defects that would let index `n` reach the tolerance.
    fn defects_needed(&self, n: usize, mut product: ProductAbs, mut k: usize) -> Result<usize> {
        while n + k < ESTIMATE_LIMIT {
            if n + k >= self.n0 && self.geometric_bound(&product) <= self.tol {
                return Ok(n + k);
            }
            product.push(self.a.coeff_at(n + k)?.abs());
            k += 1;
        }
        Ok(ESTIMATE_LIMIT)
    }

    /// `x_n - y_n = -Σ_{k>=0} c_{n+k} / (a_n⋯a_{n+k})`, stopping at the first
    /// `K` whose geometric tail bound is within tolerance.
    pub(crate) fn tail(&self, n: usize) -> Result<TailDifference> {
        let available = self.defects.len();
        if n > available {
            return Err(Error::IndexOutOfRange { index: n, horizon: available });
        }
        let mut sum = VectorSum::new(self.field, self.dim);
        let mut product = ProductAbs::one();
        let mut inverse = Scalar::one(self.field);
        // Sum of the sizes of the terms and of the round-off in each recomputed defect.
        let mut mass = 0.0;
        let mut k = 0;
        loop {
            if n + k >= self.n0 {
                let bound = self.geometric_bound(&product);
                if bound <= self.tol {
                    let rounding = 16.0 * f64::EPSILON * (k as f64 + 1.0) * mass;
                    return Ok(TailDifference { diff: -&sum.value(), bound, terms_used: k, rounding });
                }
            }
            if n + k == available {
                let needed = self.defects_needed(n, product, k)?;
                return Err(Error::HorizonInsufficient { available, needed, tolerance: self.tol });
            }
            let a = self.a.coeff_at(n + k)?;
            inverse = inverse / a;
            let m = n + k;
            let moduli = self.states[m + 1].max_modulus()
                + a.abs() * self.states[m].max_modulus()
                + self.b.at(m, self.dim, self.field).max_modulus();
            mass += (self.defects[m].max_modulus() + moduli) * self.per_modulus * inverse.abs();
            sum.add(&self.defects[m].scale(inverse));
            product.push(a.abs());
            k += 1;
        }
    }
}

fn pseudo_hull(p: &PseudoOrbit) -> Result<HullRep> {
    symmetric_convex_hull(p.set(), p.field())
}

/// `s = Σ c_n / (a_0⋯a_n)` to within `tol`, using the default `q`.
pub fn series_s(
    p: &PseudoOrbit,
    a: &CoefficientSpec,
    b: &ForcingSpec,
    family: &SeminormFamily,
    tol: f64,
) -> Result<SeriesValue> {
    let hull = pseudo_hull(p)?;
    let ctx = TailContext::new(p, a, b, family, &hull, choose_q(a, None)?, tol)?;
    let tail = ctx.tail(0)?;
    Ok(SeriesValue { s: -&tail.diff, truncation_bound: tail.bound, terms_used: tail.terms_used })
}

/// `x_n - y_n` for the shadow orbit, from the tail sum anchored at `n`.
pub fn tail_difference(
    p: &PseudoOrbit,
    a: &CoefficientSpec,
    b: &ForcingSpec,
    n: usize,
    family: &SeminormFamily,
    tol: f64,
) -> Result<TailDifference> {
    let hull = pseudo_hull(p)?;
    TailContext::new(p, a, b, family, &hull, choose_q(a, None)?, tol)?.tail(n)
}

/// Shadow orbit for `liminf |a_n| > 1`. Each `y_n` is rebuilt from its own tail
/// sum; indices too close to the end of `P` to reach `tol` are dropped.
pub fn shadow_expanding(
    p: &PseudoOrbit,
    a: &CoefficientSpec,
    b: &ForcingSpec,
    family: &SeminormFamily,
    q_override: Option<f64>,
    tol: f64,
) -> Result<ShadowResult> {
    let (q, n0) = choose_q(a, q_override)?;
    build(p, a, b, family, (q, n0), tol, ShadowVariant::Expanding)
}

/// Shadow orbit for a constant coefficient `|a| > 1`, guaranteed from `n = 0`.
pub fn shadow_constant_expanding(
    p: &PseudoOrbit,
    a: Scalar,
    b: &ForcingSpec,
    family: &SeminormFamily,
    tol: f64,
) -> Result<ShadowResult> {
    if !(a.abs() > 1.0 && a.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "constant coefficient must satisfy |a| > 1, got |a| = {}",
            a.abs()
        )));
    }
    build(p, &a, b, family, (a.abs(), 0), tol, ShadowVariant::ConstantExpanding)
}

fn build<A: Coefficients + ?Sized>(
    p: &PseudoOrbit,
    a: &A,
    b: &ForcingSpec,
    family: &SeminormFamily,
    (q, n0): (f64, usize),
    tol: f64,
    variant: ShadowVariant,
) -> Result<ShadowResult> {
    let hull = pseudo_hull(p)?;
    let ctx = TailContext::new(p, a, b, family, &hull, (q, n0), tol)?;
    let constant = 1.0 / (q - 1.0);
    let error_set = hull.scale(constant)?;

    let mut tails = Vec::new();
    for n in 0..=p.horizon() {
        match ctx.tail(n) {
            Ok(t) => tails.push(t),
            Err(Error::HorizonInsufficient { .. }) if n > 0 => break,
            Err(e) => return Err(e),
        }
    }

    let mut rows = Vec::with_capacity(tails.len());
    let mut states = Vec::with_capacity(tails.len());
    for (n, t) in tails.iter().enumerate() {
        let tolerance = tol + t.bound + t.rounding;
        rows.push(IndexVerdict {
            n,
            diff: t.diff.clone(),
            distances: family.eval_all(&t.diff)?,
            truncation_bound: t.bound,
            tolerance,
            contained: error_set.contains(&t.diff, tolerance)?,
            guaranteed: n >= n0,
        });
        states.push(&p.states()[n] - &t.diff);
    }

    // r_n = c_n + a_n d_n - d_{n+1}, which avoids subtracting nearly equal large states.
    let mut residuals = Vec::with_capacity(tails.len().saturating_sub(1));
    for n in 0..tails.len().saturating_sub(1) {
        let r = &(&ctx.defects[n] + &tails[n].diff.scale(a.coeff_at(n)?)) - &tails[n + 1].diff;
        residuals.push(family.eval_max(&r)?);
    }

    Ok(ShadowResult {
        variant,
        orbit: Orbit::new(states),
        series_value: -&tails[0].diff,
        q: Some(q),
        n0,
        stability_constant: constant,
        error_set,
        truncation_bound: tails.iter().map(|t| t.bound).fold(0.0, f64::max),
        rows,
        residuals,
        formula_discrepancy: None,
    })
}
