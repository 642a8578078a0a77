//! Shadow orbits for perturbed first-order linear recurrences
//! `x_{n+1} = a_n x_n + b_n` over 𝕂^d.
//!
//! A pseudo-orbit satisfies the recurrence up to defects `c_n` drawn from a
//! bounded set `V`. When `liminf |a_n| > 1` there is exactly one exact orbit
//! that stays within `conv(V^b) / (q - 1)` of it; when `limsup |a_n| < 1`
//! the exact orbit started at `x_0` stays within `M · conv(V^b)`. This crate
//! builds those orbits, computes the constants and checks the containments.

pub mod error;
pub mod numeric;
pub mod recurrence;
pub mod scalar;
pub mod seminorm;
pub mod sequence;
pub mod sets;
pub mod shadowing;

pub use error::{Error, Result};
pub use recurrence::{
    closed_form, defects, generate_pseudo_orbit, partial_product_abs, propagate, Orbit, PseudoOrbit, Sampler,
};
pub use scalar::{Field, Scalar, Vector};
pub use seminorm::{Seminorm, SeminormFamily};
pub use sequence::{
    CoeffLaw, CoefficientSpec, Coefficients, ForcingLaw, ForcingSpec, ForcingTail, Regime, RegimeClassification,
};
pub use sets::{sup_seminorm, symmetric_convex_hull, BoundSet, HullRep};
pub use shadowing::{
    choose_q, classify_regime, remark_audit, series_s, shadow_constant_contracting, shadow_constant_expanding,
    shadow_contracting, shadow_expanding, tail_difference, uniqueness_divergence, AuditReport, AuditRow,
    DivergenceCertificate, DivergenceOptions, DivergenceVerdict, GridSpec, IndexVerdict, SeriesValue, ShadowResult,
    ShadowVariant, TailDifference,
};
