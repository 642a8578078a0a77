//! Shadow orbits for pseudo-orbits of `x_{n+1} = a_n x_n + b_n`.
//!
//! Expanding coefficients (`liminf |a_n| > 1`) admit exactly one exact orbit
//! that stays close to a pseudo-orbit. It starts at `y_0 = x_0 + s` with
//! `s = Σ c_n / (a_0⋯a_n)`, and its distance satisfies
//!
//! ```text
//! x_n - y_n = -Σ_{k>=0} c_{n+k} / (a_n⋯a_{n+k})  ∈  conv(V^b) / (q - 1)   (n >= n0)
//! ```
//!
//! Forward propagation from `y_0` multiplies the truncation error in `s` by
//! `|a_0⋯a_{n-1}|`, so every `y_n` is rebuilt from its own tail sum instead.
//!
//! Contracting coefficients (`limsup |a_n| < 1`) are shadowed by the exact
//! orbit from `y_0 = x_0`, which forward propagation computes stably.

mod audit;
mod contracting;
mod expanding;
mod uniqueness;

pub use audit::{remark_audit, AuditReport, AuditRow, GridSpec};
pub use contracting::{shadow_constant_contracting, shadow_contracting};
pub use expanding::{
    series_s, shadow_constant_expanding, shadow_expanding, tail_difference, SeriesValue, TailDifference,
};
pub use uniqueness::{uniqueness_divergence, DivergenceCertificate, DivergenceOptions, DivergenceVerdict};

use crate::error::{Error, Result};
use crate::recurrence::Orbit;
use crate::scalar::{Field, Vector};
use crate::seminorm::SeminormFamily;
use crate::sequence::{CoeffLaw, CoefficientSpec, RegimeClassification};
use crate::sets::{BoundSet, HullRep};

/// Which stability statement produced a [`ShadowResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShadowVariant {
    /// Variable coefficients with `liminf |a_n| > 1`; constant `1/(q-1)`.
    Expanding,
    /// Constant `|a| > 1`; constant `1/(|a|-1)` from `n = 0`.
    ConstantExpanding,
    /// Variable coefficients with `limsup |a_n| < 1`; constant `M`.
    Contracting,
    /// Constant `|a| < 1`; constant `1/(1-|a|)` from `n = 0`.
    ConstantContracting,
}

impl ShadowVariant {
    pub fn name(self) -> &'static str {
        match self {
            ShadowVariant::Expanding => "expanding",
            ShadowVariant::ConstantExpanding => "constant-expanding",
            ShadowVariant::Contracting => "contracting",
            ShadowVariant::ConstantContracting => "constant-contracting",
        }
    }
}

/// Containment check for one index.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexVerdict {
    pub n: usize,
    /// `x_n - y_n`.
    pub diff: Vector,
    /// Each family seminorm of `diff`.
    pub distances: Vec<f64>,
    /// Rigorous bound on the truncation error in `diff` (zero for contracting variants).
    pub truncation_bound: f64,
    /// Tolerance used for the membership test: user tolerance plus truncation bound.
    pub tolerance: f64,
    pub contained: bool,
    /// Whether the stability statement covers this index (`n >= n0`).
    pub guaranteed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShadowResult {
    pub variant: ShadowVariant,
    /// The exact orbit `y_0, ..., y_M` over the resolved horizon.
    pub orbit: Orbit,
    /// `s`, so that `y_0 = x_0 + s`; zero for contracting variants.
    pub series_value: Vector,
    pub q: Option<f64>,
    pub n0: usize,
    pub stability_constant: f64,
    /// `stability_constant · conv(V^b)`.
    pub error_set: HullRep,
    pub rows: Vec<IndexVerdict>,
    /// Largest per-index truncation bound.
    pub truncation_bound: f64,
    /// Per-step residual of the exact recurrence for `y`, in the family's largest seminorm.
    pub residuals: Vec<f64>,
    /// Largest relative gap between `x_n - y_n` and `Σ a^{n-k} c_{k-1}` (constant contracting only).
    pub formula_discrepancy: Option<f64>,
}

impl ShadowResult {
    /// Every guaranteed index is contained.
    pub fn all_guaranteed_contained(&self) -> bool {
        self.rows.iter().filter(|r| r.guaranteed).all(|r| r.contained)
    }

    /// Guaranteed indices whose containment failed.
    pub fn failures(&self) -> Vec<usize> {
        self.rows.iter().filter(|r| r.guaranteed && !r.contained).map(|r| r.n).collect()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    /// Last index with a reconstructed shadow state.
    pub fn resolved_horizon(&self) -> usize {
        self.orbit.horizon()
    }
}

/// Regime from the exact tail bounds of `|a_n|`.
pub fn classify_regime(a: &CoefficientSpec) -> Result<RegimeClassification> {
    let (liminf, limsup) = a.tail_bounds()?;
    Ok(RegimeClassification::from_bounds(liminf, limsup))
}

fn require(found: RegimeClassification, required: crate::sequence::Regime) -> Result<()> {
    if found.regime == required {
        Ok(())
    } else {
        Err(Error::WrongRegime { required: required.name(), found: found.regime.name() })
    }
}

/// Picks `q` in `(1, liminf |a_n|)` and the first index `n0` with `|a_n| >= q` from there on.
pub fn choose_q(a: &CoefficientSpec, q_override: Option<f64>) -> Result<(f64, usize)> {
    let class = classify_regime(a)?;
    require(class, crate::sequence::Regime::Expanding)?;
    let q = match q_override {
        None => (1.0 + class.liminf_abs) / 2.0,
        Some(q) if q > 1.0 && q < class.liminf_abs => q,
        Some(q) => {
            return Err(Error::InvalidParameter(format!(
                "q = {q} must lie strictly between 1 and liminf |a_n| = {}",
                class.liminf_abs
            )))
        }
    };
    Ok((q, first_index_from(a, |m| m >= q)))
}

/// Picks `q` in `(limsup |a_n|, 1)` and the first index `n0` with `|a_n| <= q` from there on.
pub(crate) fn choose_contracting_q(a: &CoefficientSpec, q_override: Option<f64>) -> Result<(f64, usize)> {
    let class = classify_regime(a)?;
    require(class, crate::sequence::Regime::Contracting)?;
    let q = match q_override {
        None => (class.limsup_abs + 1.0) / 2.0,
        Some(q) if q > class.limsup_abs && q < 1.0 => q,
        Some(q) => {
            return Err(Error::InvalidParameter(format!(
                "q = {q} must lie strictly between limsup |a_n| = {} and 1",
                class.limsup_abs
            )))
        }
    };
    Ok((q, first_index_from(a, |m| m <= q)))
}

/// Smallest `n0` such that `holds(|a_n|)` for every `n >= n0`, read off the tail law.
/// The periodic and constant tails satisfy `holds` by the choice of `q`.
fn first_index_from(a: &CoefficientSpec, holds: impl Fn(f64) -> bool) -> usize {
    match a.law() {
        CoeffLaw::EventuallyConstant { prefix, .. } => {
            prefix.iter().rposition(|c| !holds(c.abs())).map_or(0, |i| i + 1)
        }
        _ => 0,
    }
}

/// Largest supremum over `V` among the family seminorms and the hull's own metric:
/// the worst-case size of a defect that has not been observed.
pub(crate) fn defect_bound(set: &BoundSet, family: &SeminormFamily, hull: &HullRep, dim: usize) -> Result<f64> {
    let mut bound = set.sup_seminorm_of(&hull.metric(), dim)?;
    for p in family.members() {
        bound = bound.max(set.sup_seminorm_of(p, dim)?);
    }
    Ok(bound)
}

pub(crate) fn check_family(family: &SeminormFamily, dim: usize, field: Field) -> Result<()> {
    let _ = field;
    family.check_dim(dim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;
    use crate::sequence::Regime;

    #[test]
    fn classify_examples() {
        let c = classify_regime(&CoefficientSpec::constant(2.0).unwrap()).unwrap();
        assert_eq!((c.regime, c.liminf_abs, c.limsup_abs), (Regime::Expanding, 2.0, 2.0));
        let c = classify_regime(&CoefficientSpec::constant(0.5).unwrap()).unwrap();
        assert_eq!((c.regime, c.liminf_abs, c.limsup_abs), (Regime::Contracting, 0.5, 0.5));
        let c = classify_regime(&CoefficientSpec::constant(1.0).unwrap()).unwrap();
        assert_eq!(c.regime, Regime::Critical);
        let finite = CoefficientSpec::explicit(vec![Scalar::real(3.0)]).unwrap();
        assert_eq!(classify_regime(&finite), Err(Error::AsymptoticsUnavailable));
    }

    #[test]
    fn choose_q_examples() {
        assert_eq!(choose_q(&CoefficientSpec::constant(2.0).unwrap(), None).unwrap(), (1.5, 0));
        let ev = CoefficientSpec::eventually_constant(vec![Scalar::real(1.01)], 3.0).unwrap();
        assert_eq!(choose_q(&ev, Some(2.0)).unwrap(), (2.0, 1));
        let periodic = CoefficientSpec::periodic_real(&[2.0, 3.0]).unwrap();
        assert_eq!(choose_q(&periodic, Some(1.9)).unwrap(), (1.9, 0));
    }

    #[test]
    fn choose_q_rejects_bad_overrides() {
        let a = CoefficientSpec::constant(2.0).unwrap();
        assert!(choose_q(&a, Some(1.0)).is_err());
        assert!(choose_q(&a, Some(2.0)).is_err());
        let contracting = CoefficientSpec::constant(0.5).unwrap();
        assert!(matches!(choose_q(&contracting, None), Err(Error::WrongRegime { .. })));
    }

    #[test]
    fn contracting_q_and_n0() {
        let ev = CoefficientSpec::eventually_constant(vec![Scalar::real(3.0)], 0.5).unwrap();
        assert_eq!(choose_contracting_q(&ev, Some(0.75)).unwrap(), (0.75, 1));
        assert_eq!(choose_contracting_q(&ev, None).unwrap(), (0.75, 1));
        let ev =
            CoefficientSpec::eventually_constant(vec![Scalar::real(0.1), Scalar::real(0.9), Scalar::real(0.2)], 0.5)
                .unwrap();
        assert_eq!(choose_contracting_q(&ev, Some(0.8)).unwrap(), (0.8, 2));
        assert!(choose_contracting_q(&ev, Some(0.4)).is_err());
    }
}
