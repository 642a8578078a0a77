//! Orbits of `x_{n+1} = a_n x_n + b_n`, the closed form, defects and
//! pseudo-orbit generation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numeric::ProductAbs;
use crate::scalar::{Field, Scalar, Vector};
use crate::sequence::{Coefficients, ForcingSpec};
use crate::sets::{sample, BoundSet};

/// An exact orbit `y_0, ..., y_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Orbit {
    states: Vec<Vector>,
}

impl Orbit {
    pub fn new(states: Vec<Vector>) -> Self {
        Orbit { states }
    }

    pub fn states(&self) -> &[Vector] {
        &self.states
    }

    pub fn into_states(self) -> Vec<Vector> {
        self.states
    }

    /// Index of the last state.
    pub fn horizon(&self) -> usize {
        self.states.len().saturating_sub(1)
    }
}

fn check_coefficients<A: Coefficients + ?Sized>(a: &A, needed: usize) -> Result<()> {
    match a.horizon() {
        Some(h) if needed > h => Err(Error::IndexOutOfRange { index: needed - 1, horizon: h }),
        _ => Ok(()),
    }
}

fn check_forcing(b: &ForcingSpec, like: &Vector) -> Result<()> {
    if let Some(d) = b.dim() {
        like.check_dim(d)?;
    }
    Ok(())
}

/// One step `a x + b`.
fn step(a: Scalar, x: &Vector, b: &Vector) -> Vector {
    &x.scale(a) + b
}

/// Iterates the recurrence left to right from `y0` for `horizon` steps.
pub fn propagate<A: Coefficients + ?Sized>(y0: &Vector, a: &A, b: &ForcingSpec, horizon: usize) -> Result<Orbit> {
    check_coefficients(a, horizon)?;
    check_forcing(b, y0)?;
    let (dim, field) = (y0.dim(), y0.field());
    let mut states = Vec::with_capacity(horizon + 1);
    states.push(y0.clone());
    for n in 0..horizon {
        let next = step(a.coeff_at(n)?, &states[n], &b.at(n, dim, field));
        states.push(next);
    }
    Ok(Orbit { states })
}

/// `x_n = a_0⋯a_{n-1} x_0 + Σ_{k=1}^{n-1} a_k⋯a_{n-1} b_{k-1} + b_{n-1}` for `n >= 2`,
/// accumulating the suffix products from `k = n-1` downward.
pub fn closed_form<A: Coefficients + ?Sized>(x0: &Vector, a: &A, b: &ForcingSpec, n: usize) -> Result<Vector> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("closed form needs n >= 2, got {n}; use propagate")));
    }
    check_coefficients(a, n)?;
    check_forcing(b, x0)?;
    let (dim, field) = (x0.dim(), x0.field());
    let mut acc = b.at(n - 1, dim, field);
    let mut suffix = Scalar::one(field);
    for k in (1..n).rev() {
        suffix = suffix * a.coeff_at(k)?;
        acc = &acc + &b.at(k - 1, dim, field).scale(suffix);
    }
    suffix = suffix * a.coeff_at(0)?;
    Ok(&acc + &x0.scale(suffix))
}

/// `c_n = x_{n+1} - a_n x_n - b_n` for every consecutive pair.
pub fn defects<A: Coefficients + ?Sized>(x: &[Vector], a: &A, b: &ForcingSpec) -> Result<Vec<Vector>> {
    if x.len() < 2 {
        return Err(Error::InvalidParameter("defects need at least two states".into()));
    }
    check_coefficients(a, x.len() - 1)?;
    check_forcing(b, &x[0])?;
    let (dim, field) = (x[0].dim(), x[0].field());
    for v in x {
        v.check_dim(dim)?;
    }
    x.windows(2)
        .enumerate()
        .map(|(n, pair)| Ok(&pair[1] - &step(a.coeff_at(n)?, &pair[0], &b.at(n, dim, field))))
        .collect()
}

/// `∏_{k=i}^{j} |a_k|`, overflow-safe.
pub fn partial_product_abs<A: Coefficients + ?Sized>(a: &A, i: usize, j: usize) -> Result<ProductAbs> {
    if i > j {
        return Err(Error::InvalidParameter(format!("empty product range {i}..={j}")));
    }
    check_coefficients(a, j + 1)?;
    let mut p = ProductAbs::one();
    for k in i..=j {
        p.push(a.coeff_at(k)?.abs());
    }
    Ok(p)
}

/// How defects are drawn from `V`.
#[derive(Debug, Clone, PartialEq)]
pub enum Sampler {
    Uniform,
    Vertex,
    Constant(Vector),
}

impl Sampler {
    pub fn name(&self) -> &'static str {
        match self {
            Sampler::Uniform => "uniform",
            Sampler::Vertex => "vertex",
            Sampler::Constant(_) => "constant",
        }
    }
}

/// A trajectory with per-step defects, recomputed from the states.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoOrbit {
    states: Vec<Vector>,
    defects: Vec<Vector>,
    set: BoundSet,
    violations: Vec<usize>,
    drawn: Option<Vec<Vector>>,
}

impl PseudoOrbit {
    /// Wraps a trajectory, recomputing its defects and recording every index
    /// whose defect leaves `V` by more than `tol` plus floating-point round-off.
    pub fn from_states<A: Coefficients + ?Sized>(
        states: Vec<Vector>,
        a: &A,
        b: &ForcingSpec,
        set: BoundSet,
        tol: f64,
    ) -> Result<Self> {
        let first = states.first().ok_or_else(|| Error::InvalidParameter("empty trajectory".into()))?;
        let (dim, field) = (first.dim(), first.field());
        for v in &states {
            if v.field() != field {
                return Err(Error::FieldMismatch("trajectory mixes real and complex states".into()));
            }
        }
        set.validate(field, dim)?;
        let defects = defects(&states, a, b)?;
        let metric_scale = match &set {
            BoundSet::Ball { norm, .. } => norm.eval_moduli(std::iter::repeat(1.0).take(dim)),
            _ => 1.0,
        };
        let mut violations = Vec::new();
        for (n, c) in defects.iter().enumerate() {
            let magnitude = states[n + 1].max_modulus()
                + a.coeff_at(n)?.abs() * states[n].max_modulus()
                + b.at(n, dim, field).max_modulus();
            let allowance = 8.0 * f64::EPSILON * magnitude * metric_scale;
            if set.excess(c)? > tol + allowance {
                violations.push(n);
            }
        }
        Ok(PseudoOrbit { states, defects, set, violations, drawn: None })
    }

    pub fn states(&self) -> &[Vector] {
        &self.states
    }

    pub fn defects(&self) -> &[Vector] {
        &self.defects
    }

    pub fn set(&self) -> &BoundSet {
        &self.set
    }

    /// Indices `n` with `c_n` outside `V`.
    pub fn violations(&self) -> &[usize] {
        &self.violations
    }

    /// Defects as drawn by the generator, before the round trip through the states.
    pub fn drawn_defects(&self) -> Option<&[Vector]> {
        self.drawn.as_deref()
    }

    pub fn horizon(&self) -> usize {
        self.states.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn field(&self) -> Field {
        self.states[0].field()
    }
}

/// Builds `x_{n+1} = a_n x_n + b_n + c_n` with `c_n` drawn from `V`.
/// Output is a deterministic function of `seed`.
pub fn generate_pseudo_orbit<A: Coefficients + ?Sized>(
    x0: &Vector,
    a: &A,
    b: &ForcingSpec,
    set: &BoundSet,
    horizon: usize,
    sampler: &Sampler,
    seed: u64,
) -> Result<PseudoOrbit> {
    let (dim, field) = (x0.dim(), x0.field());
    set.validate(field, dim)?;
    check_coefficients(a, horizon)?;
    check_forcing(b, x0)?;
    if horizon == 0 {
        return Err(Error::InvalidParameter("pseudo-orbit horizon must be at least 1".into()));
    }
    match sampler {
        Sampler::Vertex if matches!(set, BoundSet::Ball { .. }) => {
            return Err(Error::IncompatibleSampler { sampler: sampler.name(), set: set.kind() })
        }
        Sampler::Constant(c) => {
            c.check_dim(dim)?;
            if c.field() > field {
                return Err(Error::FieldMismatch("constant defect is complex but the orbit is real".into()));
            }
            if !set.contains(c, 0.0)? {
                return Err(Error::InvalidParameter(format!("constant defect {c} lies outside V")));
            }
        }
        _ => {}
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut states = Vec::with_capacity(horizon + 1);
    let mut drawn = Vec::with_capacity(horizon);
    states.push(x0.clone());
    for n in 0..horizon {
        let c = match sampler {
            Sampler::Uniform => sample::uniform(set, field, dim, &mut rng),
            Sampler::Vertex => sample::vertex(set, field, &mut rng)?,
            Sampler::Constant(c) => c.clone().into_field(field)?,
        };
        let next = &step(a.coeff_at(n)?, &states[n], &b.at(n, dim, field)) + &c;
        states.push(next);
        drawn.push(c);
    }
    let mut orbit = PseudoOrbit::from_states(states, a, b, set.clone(), 0.0)?;
    orbit.drawn = Some(drawn);
    Ok(orbit)
}

/// Scales every state of a trajectory by `t`; a helper for linearity checks.
pub fn scale_states(states: &[Vector], t: f64) -> Vec<Vector> {
    states.iter().map(|v| v.scale_real(t)).collect()
}

/// Largest sup-norm of a list of vectors, at least one.
#[cfg(test)]
fn magnitude(states: &[Vector]) -> f64 {
    states.iter().map(Vector::max_modulus).fold(1.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seminorm::Seminorm;
    use crate::sequence::{CoefficientSpec, ForcingLaw, ForcingTail};
    use proptest::prelude::*;

    fn reals(orbit: &Orbit) -> Vec<f64> {
        orbit.states().iter().map(|v| v.real_parts()[0]).collect()
    }

    fn one(x: f64) -> Vector {
        Vector::real(&[x])
    }

    /// Direct iteration with plain f64 arithmetic; independent of the library path.
    fn iterate(x0: f64, a: impl Fn(usize) -> f64, b: impl Fn(usize) -> f64, n: usize) -> Vec<f64> {
        let mut x = vec![x0];
        for k in 0..n {
            x.push(a(k) * x[k] + b(k));
        }
        x
    }

    #[test]
    fn propagate_examples() {
        let identity = CoefficientSpec::constant(1.0).unwrap();
        let orbit = propagate(&one(1.0), &identity, &ForcingSpec::zero(), 4).unwrap();
        assert_eq!(reals(&orbit), vec![1.0; 5]);

        let doubling = CoefficientSpec::constant(2.0).unwrap();
        let ones = ForcingSpec::constant(one(1.0)).unwrap();
        let orbit = propagate(&one(1.0), &doubling, &ones, 3).unwrap();
        assert_eq!(reals(&orbit), iterate(1.0, |_| 2.0, |_| 1.0, 3));
        assert_eq!(reals(&orbit), vec![1.0, 3.0, 7.0, 15.0]);

        let periodic = CoefficientSpec::periodic_real(&[2.0, 3.0]).unwrap();
        let orbit = propagate(&one(0.0), &periodic, &ones, 3).unwrap();
        assert_eq!(reals(&orbit), iterate(0.0, |k| [2.0, 3.0][k % 2], |_| 1.0, 3));
        assert_eq!(reals(&orbit), vec![0.0, 1.0, 4.0, 9.0]);
    }

    #[test]
    fn propagate_respects_finite_horizons() {
        let finite = CoefficientSpec::explicit(vec![Scalar::real(2.0), Scalar::real(3.0)]).unwrap();
        assert!(propagate(&one(1.0), &finite, &ForcingSpec::zero(), 2).is_ok());
        assert_eq!(
            propagate(&one(1.0), &finite, &ForcingSpec::zero(), 3),
            Err(Error::IndexOutOfRange { index: 2, horizon: 2 })
        );
    }

    #[test]
    fn closed_form_examples() {
        let doubling = CoefficientSpec::constant(2.0).unwrap();
        assert_eq!(closed_form(&one(1.0), &doubling, &ForcingSpec::zero(), 10).unwrap(), one(1024.0));

        let a = CoefficientSpec::explicit(vec![Scalar::real(2.0), Scalar::real(3.0)]).unwrap();
        let b =
            ForcingSpec::new(ForcingLaw::ExplicitFinite { values: vec![one(1.0), one(1.0)], tail: ForcingTail::Zero })
                .unwrap();
        // a_0 a_1 x_0 + a_1 b_0 + b_1 = 6 + 3 + 1
        assert_eq!(closed_form(&one(1.0), &a, &b, 2).unwrap(), one(10.0));
        assert!(closed_form(&one(1.0), &a, &b, 1).is_err());
        assert!(closed_form(&one(1.0), &a, &b, 3).is_err());
    }

    #[test]
    fn defects_examples() {
        let doubling = CoefficientSpec::constant(2.0).unwrap();
        let c = defects(&[one(0.0), one(1.0), one(3.0)], &doubling, &ForcingSpec::zero()).unwrap();
        assert_eq!(c, vec![one(1.0), one(1.0)]);

        let periodic = CoefficientSpec::periodic_real(&[2.0, 3.0]).unwrap();
        let ones = ForcingSpec::constant(one(1.0)).unwrap();
        let c = defects(&[one(0.0), one(1.0), one(4.0), one(9.0)], &periodic, &ones).unwrap();
        assert!(c.iter().all(Vector::is_zero));
        assert!(defects(&[one(0.0)], &periodic, &ones).is_err());
    }

    #[test]
    fn partial_product_examples() {
        let doubling = CoefficientSpec::constant(2.0).unwrap();
        assert_eq!(partial_product_abs(&doubling, 0, 9).unwrap().value(), 1024.0);
        let alternating = CoefficientSpec::periodic_real(&[2.0, 0.5]).unwrap();
        assert_eq!(partial_product_abs(&alternating, 0, 3).unwrap().value(), 1.0);
        let big = partial_product_abs(&doubling, 0, 2000).unwrap();
        assert!(big.ln().is_finite());
        assert!((big.ln() - 2001.0 * std::f64::consts::LN_2).abs() < 1e-9);
        assert!(partial_product_abs(&doubling, 3, 2).is_err());
    }

    #[test]
    fn generator_examples() {
        let doubling = CoefficientSpec::constant(2.0).unwrap();
        let interval = BoundSet::Interval { lo: -1.0, hi: 1.0 };
        let p = generate_pseudo_orbit(
            &one(0.0),
            &doubling,
            &ForcingSpec::zero(),
            &interval,
            20,
            &Sampler::Constant(one(1.0)),
            0,
        )
        .unwrap();
        let expected: Vec<f64> = (0..=20).map(|n| 2f64.powi(n) - 1.0).collect();
        assert_eq!(p.states().iter().map(|v| v.real_parts()[0]).collect::<Vec<_>>(), expected);
        assert!(p.violations().is_empty());

        let zero = generate_pseudo_orbit(
            &one(0.5),
            &doubling,
            &ForcingSpec::zero(),
            &interval,
            10,
            &Sampler::Constant(one(0.0)),
            0,
        )
        .unwrap();
        let exact = propagate(&one(0.5), &doubling, &ForcingSpec::zero(), 10).unwrap();
        assert_eq!(zero.states(), exact.states());
        assert!(zero.defects().iter().all(Vector::is_zero));
    }

    #[test]
    fn generator_is_deterministic() {
        let a = CoefficientSpec::periodic_real(&[1.5, -2.5]).unwrap();
        let set = BoundSet::Ball { norm: Seminorm::L2, radius: 0.3 };
        let x0 = Vector::complex(&[(0.1, 0.2), (0.0, -1.0)]);
        let run =
            |seed| generate_pseudo_orbit(&x0, &a, &ForcingSpec::zero(), &set, 30, &Sampler::Uniform, seed).unwrap();
        assert_eq!(run(9), run(9));
        assert_ne!(run(9), run(10));
    }

    #[test]
    fn generator_rejects_bad_samplers() {
        let a = CoefficientSpec::constant(2.0).unwrap();
        let ball = BoundSet::Ball { norm: Seminorm::L2, radius: 1.0 };
        let err = generate_pseudo_orbit(&one(0.0), &a, &ForcingSpec::zero(), &ball, 5, &Sampler::Vertex, 0);
        assert!(matches!(err, Err(Error::IncompatibleSampler { .. })));
        let err = generate_pseudo_orbit(&one(0.0), &a, &ForcingSpec::zero(), &ball, 5, &Sampler::Constant(one(2.0)), 0);
        assert!(err.is_err());
    }

    #[test]
    fn violations_are_reported() {
        let a = CoefficientSpec::constant(2.0).unwrap();
        let interval = BoundSet::Interval { lo: -1.0, hi: 1.0 };
        let p = PseudoOrbit::from_states(
            vec![one(0.0), one(1.0), one(5.0), one(10.0)],
            &a,
            &ForcingSpec::zero(),
            interval,
            0.0,
        )
        .unwrap();
        assert_eq!(p.violations(), &[1]);
    }

    fn coefficient_specs() -> impl Strategy<Value = CoefficientSpec> {
        let modulus = 0.5..3.0f64;
        let signed = (modulus, any::<bool>()).prop_map(|(m, neg)| if neg { -m } else { m });
        prop_oneof![
            signed.clone().prop_map(|a| CoefficientSpec::constant(a).unwrap()),
            prop::collection::vec(signed.clone(), 1..5).prop_map(|v| CoefficientSpec::periodic_real(&v).unwrap()),
            (prop::collection::vec(signed.clone(), 0..5), signed).prop_map(|(p, t)| {
                CoefficientSpec::eventually_constant(p.into_iter().map(Scalar::real).collect(), t).unwrap()
            }),
        ]
    }

    fn forcings() -> impl Strategy<Value = ForcingSpec> {
        prop_oneof![
            Just(ForcingSpec::zero()),
            prop::collection::vec(-2.0..2.0f64, 2).prop_map(|b| ForcingSpec::constant(Vector::real(&b)).unwrap()),
            prop::collection::vec(prop::collection::vec(-2.0..2.0f64, 2), 1..4).prop_map(|bs| {
                ForcingSpec::new(ForcingLaw::Periodic(bs.iter().map(|b| Vector::real(b)).collect())).unwrap()
            }),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn closed_form_agrees_with_propagation(a in coefficient_specs(), b in forcings(),
                                               x0 in prop::collection::vec(-5.0..5.0f64, 2), n in 2usize..=30) {
            let x0 = Vector::real(&x0);
            let direct = propagate(&x0, &a, &b, n).unwrap();
            let closed = closed_form(&x0, &a, &b, n).unwrap();
            let reference = &direct.states()[n];
            let scale = magnitude(direct.states());
            let diff = Seminorm::LInf.eval(&(&closed - reference)).unwrap();
            prop_assert!(diff <= 1e-10 * scale, "diff {} at scale {}", diff, scale);
        }

        #[test]
        fn exact_orbits_have_zero_defects(a in coefficient_specs(), b in forcings(),
                                          x0 in prop::collection::vec(-5.0..5.0f64, 2), n in 1usize..=40) {
            let orbit = propagate(&Vector::real(&x0), &a, &b, n).unwrap();
            let scale = magnitude(orbit.states());
            for c in defects(orbit.states(), &a, &b).unwrap() {
                prop_assert!(c.max_modulus() / scale <= 1e-12);
            }
        }

        #[test]
        fn partial_products_split(a in coefficient_specs(), i in 0usize..10, j in 0usize..10, k in 0usize..10) {
            let (i, j, k) = (i, i + j, i + j + 1 + k);
            let left = partial_product_abs(&a, i, j).unwrap().ln();
            let right = partial_product_abs(&a, j + 1, k).unwrap().ln();
            let whole = partial_product_abs(&a, i, k).unwrap().value();
            prop_assert!(((left + right).exp() - whole).abs() <= 1e-12 * whole);
        }

        #[test]
        fn generated_defects_round_trip(a in coefficient_specs(), seed in any::<u64>(), uniform in any::<bool>()) {
            let set = BoundSet::Polytope(vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-0.5, -0.5]]);
            let sampler = if uniform { Sampler::Uniform } else { Sampler::Vertex };
            let x0 = Vector::real(&[0.3, -0.2]);
            let p = generate_pseudo_orbit(&x0, &a, &ForcingSpec::zero(), &set, 25, &sampler, seed).unwrap();
            let scale = magnitude(p.states());
            for (drawn, recomputed) in p.drawn_defects().unwrap().iter().zip(p.defects()) {
                prop_assert!(set.contains(drawn, 0.0).unwrap());
                prop_assert!((drawn - recomputed).max_modulus() <= 1e-12 * scale);
            }
            prop_assert!(p.violations().is_empty());
        }
    }
}
