//! Certificates that any other starting point drifts away from the pseudo-orbit.
//!
//! For an exact orbit `y'` started at `y'_0`,
//!
//! ```text
//! x_n - y'_n = a_0⋯a_{n-1} · e_n,   e_n = x_0 - y'_0 + Σ_{k=1}^n c_{k-1} / (a_0⋯a_{k-1}),
//! ```
//!
//! so a lower bound on the seminorm of `e_n` becomes a lower bound on the
//! distance once multiplied by `|a_0⋯a_{n-1}|`.

use crate::error::{Error, Result};
use crate::numeric::{ProductAbs, VectorSum};
use crate::recurrence::PseudoOrbit;
use crate::scalar::{Scalar, Vector};
use crate::seminorm::{Seminorm, SeminormFamily};
use crate::sequence::{CoefficientSpec, Coefficients, ForcingSpec};
use crate::sets::symmetric_convex_hull;

use super::choose_q;
use super::expanding::TailContext;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivergenceVerdict {
    /// `|x_n - y'_n|` is certified to be unbounded.
    Diverges,
    /// The alternative start cannot be told apart from the shadow at this tolerance,
    /// or the horizon was too short to certify growth.
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceOptions {
    /// Tolerance for the series giving the shadow's own start.
    pub tol: f64,
    /// A lower bound above this value counts as divergence.
    pub ceiling: f64,
}

impl Default for DivergenceOptions {
    fn default() -> Self {
        DivergenceOptions { tol: 1e-12, ceiling: 1e12 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceCertificate {
    pub alt_y0: Vector,
    /// `x_0 + s`, the start of the unique shadow.
    pub shadow_y0: Vector,
    /// Largest family seminorm of `shadow_y0 - alt_y0`.
    pub offset: f64,
    /// Uncertainty in `shadow_y0`: truncation bound, tolerance and rounding.
    pub uncertainty: f64,
    /// `ln` of a certified lower bound on the largest family seminorm of
    /// `x_n - y'_n`, for `n = 0..=N`; `-inf` where nothing is certified.
    pub lower_bound_log: Vec<f64>,
    pub ceiling: f64,
    /// First index whose lower bound exceeds the ceiling.
    pub ceiling_crossed_at: Option<usize>,
    /// `(m, L)`: every later distance is at least `|a_0⋯a_{n-1}| · L` with `L > 0`.
    pub growth_rate_bound: Option<(usize, f64)>,
    pub verdict: DivergenceVerdict,
}

impl DivergenceCertificate {
    /// Certified lower bound on the distance at index `n`.
    pub fn lower_bound(&self, n: usize) -> Option<f64> {
        self.lower_bound_log.get(n).map(|l| l.exp())
    }
}

/// Upper bound on `Σ_{j>=1} 1 / |a_n⋯a_{n+j-1}|`. Summed exactly until the
/// geometric remainder (ratio `1/q`, valid from `n0`) is negligible.
fn tail_weight<A: Coefficients + ?Sized>(a: &A, n: usize, q: f64, n0: usize) -> Result<f64> {
    let mut product = ProductAbs::one();
    let mut sum = 0.0;
    for j in 0.. {
        product.push(a.coeff_at(n + j)?.abs());
        let reciprocal = (-product.ln()).exp();
        sum += reciprocal;
        if n + j + 1 >= n0 {
            let remainder = reciprocal / (q - 1.0);
            if remainder <= 1e-6 * sum || remainder == 0.0 {
                return Ok((sum + remainder) * (1.0 + 1e-12));
            }
        }
    }
    unreachable!()
}

/// Certifies that the exact orbit from `alt_y0` does not shadow `P`.
pub fn uniqueness_divergence(
    p: &PseudoOrbit,
    a: &CoefficientSpec,
    b: &ForcingSpec,
    alt_y0: &Vector,
    horizon: usize,
    family: &SeminormFamily,
    options: DivergenceOptions,
) -> Result<DivergenceCertificate> {
    if horizon > p.horizon() {
        return Err(Error::IndexOutOfRange { index: horizon, horizon: p.horizon() });
    }
    alt_y0.check_dim(p.dim())?;
    if alt_y0.field() > p.field() {
        return Err(Error::FieldMismatch("alternative start is complex but the orbit is real".into()));
    }
    let (q, n0) = choose_q(a, None)?;
    let hull = symmetric_convex_hull(p.set(), p.field())?;
    let ctx = TailContext::new(p, a, b, family, &hull, (q, n0), options.tol)?;
    let series = ctx.tail(0)?;
    let x0 = &p.states()[0];
    let shadow_y0 = x0 - &series.diff;
    let norm = |v: &Vector| family.eval_max(v);
    let offset = norm(&(&shadow_y0 - alt_y0))?;
    let uncertainty = series.bound + options.tol + 8.0 * f64::EPSILON * (norm(x0)? + norm(&shadow_y0)?);

    let mut certificate = DivergenceCertificate {
        alt_y0: alt_y0.clone(),
        shadow_y0,
        offset,
        uncertainty,
        lower_bound_log: Vec::new(),
        ceiling: options.ceiling,
        ceiling_crossed_at: None,
        growth_rate_bound: None,
        verdict: DivergenceVerdict::Inconclusive,
    };
    if offset.is_nan() || uncertainty.is_nan() || offset <= uncertainty {
        return Ok(certificate);
    }

    // Converts componentwise rounding errors into the family's largest seminorm.
    let mut per_modulus: f64 = 0.0;
    for m in family.members() {
        per_modulus = per_modulus.max(m.sup_over_unit_ball(&Seminorm::LInf, p.dim())?);
    }
    let states = p.states();
    let (dim, field) = (p.dim(), p.field());

    let e0 = x0 - alt_y0;
    let mut sum = VectorSum::new(field, dim);
    sum.add(&e0);
    let mut mass = norm(x0)? + norm(alt_y0)?;
    let mut product = ProductAbs::one();
    let mut inverse = Scalar::one(field);

    for n in 0..=horizon {
        if n > 0 {
            let coeff = a.coeff_at(n - 1)?;
            inverse = inverse / coeff;
            let term = ctx.defects[n - 1].scale(inverse);
            let moduli = states[n].max_modulus()
                + coeff.abs() * states[n - 1].max_modulus()
                + b.at(n - 1, dim, field).max_modulus();
            mass += norm(&term)? + per_modulus * moduli * inverse.abs();
            sum.add(&term);
            product.push(coeff.abs());
        }
        let slack = 8.0 * f64::EPSILON * (n as f64 + 2.0) * mass;
        let e_norm = norm(&sum.value())? - slack;
        let log_bound = if e_norm > 0.0 { product.ln() + e_norm.ln() } else { f64::NEG_INFINITY };
        certificate.lower_bound_log.push(log_bound);
        if certificate.ceiling_crossed_at.is_none() && log_bound > options.ceiling.ln() {
            certificate.ceiling_crossed_at = Some(n);
        }
        if certificate.growth_rate_bound.is_none() && n >= n0 && e_norm > 0.0 {
            // Every later e_m stays within this distance of e_n.
            let tail = ctx.defect_bound * tail_weight(a, n, q, n0)? * (-product.ln()).exp();
            let limit = e_norm - 2.0 * tail;
            if limit > 0.0 {
                certificate.growth_rate_bound = Some((n, limit));
            }
        }
    }
    if certificate.ceiling_crossed_at.is_some() || certificate.growth_rate_bound.is_some() {
        certificate.verdict = DivergenceVerdict::Diverges;
    }
    Ok(certificate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recurrence::{generate_pseudo_orbit, propagate, Sampler};
    use crate::sets::BoundSet;

    fn doubling() -> (CoefficientSpec, PseudoOrbit) {
        let a = CoefficientSpec::constant(2.0).unwrap();
        let set = BoundSet::Interval { lo: -1.0, hi: 1.0 };
        let p = generate_pseudo_orbit(
            &Vector::real(&[0.0]),
            &a,
            &ForcingSpec::zero(),
            &set,
            60,
            &Sampler::Constant(Vector::real(&[1.0])),
            0,
        )
        .unwrap();
        (a, p)
    }

    fn family() -> SeminormFamily {
        SeminormFamily::normed(Seminorm::LInf).unwrap()
    }

    #[test]
    fn offset_start_diverges() {
        let (a, p) = doubling();
        let alt = Vector::real(&[1.01]);
        let cert =
            uniqueness_divergence(&p, &a, &ForcingSpec::zero(), &alt, 50, &family(), DivergenceOptions::default())
                .unwrap();
        assert_eq!(cert.verdict, DivergenceVerdict::Diverges);
        // Oracle: iterate y' directly; x_30 - y'_30 = -1 - 0.01·2^30.
        let y = propagate(&alt, &a, &ForcingSpec::zero(), 30).unwrap();
        let actual = (p.states()[30].real_parts()[0] - y.states()[30].real_parts()[0]).abs();
        let bound = cert.lower_bound(30).unwrap();
        assert!(bound >= 1.0e7 && bound <= actual);
        assert!((bound - (0.01 * 2f64.powi(30) - 1.0)).abs() / bound < 1e-6);
        assert!(cert.ceiling_crossed_at.is_some());
    }

    #[test]
    fn the_shadow_itself_is_inconclusive() {
        let (a, p) = doubling();
        let opts = DivergenceOptions::default();
        let cert =
            uniqueness_divergence(&p, &a, &ForcingSpec::zero(), &Vector::real(&[1.0]), 45, &family(), opts).unwrap();
        assert_eq!(cert.verdict, DivergenceVerdict::Inconclusive);
        let near = Vector::real(&[1.0 + 1e-15]);
        let cert = uniqueness_divergence(&p, &a, &ForcingSpec::zero(), &near, 45, &family(), opts).unwrap();
        assert_eq!(cert.verdict, DivergenceVerdict::Inconclusive);
        assert!(cert.lower_bound_log.is_empty());
    }

    #[test]
    fn slow_expansion_uses_the_growth_bound() {
        let a = CoefficientSpec::constant(1.1).unwrap();
        let set = BoundSet::Ball { norm: Seminorm::L2, radius: 1.0 };
        let x0 = Vector::real(&[0.5, -0.5]);
        let p = generate_pseudo_orbit(&x0, &a, &ForcingSpec::zero(), &set, 400, &Sampler::Uniform, 3).unwrap();
        let family = SeminormFamily::normed(Seminorm::L2).unwrap();
        let opts = DivergenceOptions { tol: 1e-9, ..Default::default() };
        let shadow = uniqueness_divergence(&p, &a, &ForcingSpec::zero(), &x0, 0, &family, opts).unwrap().shadow_y0;
        let alt = &shadow + &Vector::real(&[1e-6, 0.0]);
        let cert = uniqueness_divergence(&p, &a, &ForcingSpec::zero(), &alt, 200, &family, opts).unwrap();
        assert_eq!(cert.verdict, DivergenceVerdict::Diverges);
        assert!(cert.ceiling_crossed_at.is_none());
        assert!(cert.growth_rate_bound.unwrap().1 > 0.0);
    }

    #[test]
    fn tail_weight_of_constant_coefficients() {
        let w = tail_weight(&Scalar::real(2.0), 5, 1.5, 0).unwrap();
        assert!((1.0..=1.0 + 1e-5).contains(&w));
        let w = tail_weight(&Scalar::real(1.1), 0, 1.05, 0).unwrap();
        assert!((10.0..=10.0 * (1.0 + 1e-5)).contains(&w));
    }
}
