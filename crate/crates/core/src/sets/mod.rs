//! Perturbation sets `V` and the derived error sets `λ·conv(V^b)`.
//!
//! Over ℝ the balanced hull satisfies `conv(V^b) = conv(V ∪ −V)`, so vertex
//! sets stay polyhedral. Over ℂ the balanced hull of a point is a disk, which
//! is why vertex-based sets are restricted to the real field.

mod lp;
pub(crate) mod sample;

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{Field, Vector};
use crate::seminorm::{Seminorm, SeminormFamily};

/// Absolute slack added to LP-based membership so that boundary points
/// survive pivoting round-off.
fn lp_slack(points: &[Vec<f64>]) -> f64 {
    let scale = points.iter().flatten().map(|x| x.abs()).fold(1.0, f64::max);
    1e-12 * scale
}

/// A bounded perturbation set `V`.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundSet {
    /// Closed ball of the given norm around the origin.
    Ball { norm: Seminorm, radius: f64 },
    /// Real segment `[lo, hi]`, one-dimensional.
    Interval { lo: f64, hi: f64 },
    /// Convex hull of the listed vertices; real field only.
    Polytope(Vec<Vec<f64>>),
    /// The listed points themselves; real field only.
    FinitePoints(Vec<Vec<f64>>),
}

impl BoundSet {
    pub fn kind(&self) -> &'static str {
        match self {
            BoundSet::Ball { .. } => "ball",
            BoundSet::Interval { .. } => "interval",
            BoundSet::Polytope(_) => "polytope",
            BoundSet::FinitePoints(_) => "finite-points",
        }
    }

    /// Dimension implied by the set itself, when it fixes one.
    pub fn dim(&self) -> Option<usize> {
        match self {
            BoundSet::Ball { norm: Seminorm::WeightedSup(w), .. } => Some(w.len()),
            BoundSet::Ball { .. } => None,
            BoundSet::Interval { .. } => Some(1),
            BoundSet::Polytope(v) | BoundSet::FinitePoints(v) => v.first().map(Vec::len),
        }
    }

    /// Checks the set's own invariants and its compatibility with `field` and `dim`.
    pub fn validate(&self, field: Field, dim: usize) -> Result<()> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        match self {
            BoundSet::Ball { norm, radius } => {
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::InvalidParameter(format!("ball radius must be positive, got {radius}")));
                }
                if !norm.is_norm() {
                    return Err(Error::InvalidParameter(format!("ball of {norm} is unbounded")));
                }
                norm.check_dim(dim)
            }
            BoundSet::Interval { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                    return Err(Error::InvalidParameter(format!("interval [{lo}, {hi}] is not a valid range")));
                }
                if dim != 1 {
                    return Err(Error::DimensionMismatch { expected: 1, found: dim });
                }
                Ok(())
            }
            BoundSet::Polytope(points) | BoundSet::FinitePoints(points) => {
                if field != Field::Real {
                    return Err(Error::UnsupportedField(format!(
                        "{} sets require the real field; use a ball or interval over C",
                        self.kind()
                    )));
                }
                if points.is_empty() {
                    return Err(Error::InvalidParameter(format!("{} needs at least one point", self.kind())));
                }
                for p in points {
                    if p.len() != dim {
                        return Err(Error::DimensionMismatch { expected: dim, found: p.len() });
                    }
                    if p.iter().any(|x| !x.is_finite()) {
                        return Err(Error::InvalidParameter("non-finite vertex coordinate".into()));
                    }
                }
                Ok(())
            }
        }
    }

    /// Membership in `V` itself (not its hull), within `tol`.
    pub fn contains(&self, v: &Vector, tol: f64) -> Result<bool> {
        Ok(self.excess(v)? <= tol)
    }

    /// How far `v` lies outside `V`, in the set's own metric; zero inside.
    pub fn excess(&self, v: &Vector) -> Result<f64> {
        match self {
            BoundSet::Ball { norm, radius } => Ok((norm.eval(v)? - radius).max(0.0)),
            BoundSet::Interval { lo, hi } => {
                v.check_dim(1)?;
                let z = v.components()[0];
                let along = if z.re < *lo {
                    lo - z.re
                } else if z.re > *hi {
                    z.re - hi
                } else {
                    0.0
                };
                Ok(along.max(z.im.abs()))
            }
            BoundSet::Polytope(points) => {
                let target = real_target(v, points)?;
                let (dist, _) = lp::hull_distance(points, &target);
                Ok((dist - lp_slack(points)).max(0.0))
            }
            BoundSet::FinitePoints(points) => {
                let target = real_target(v, points)?;
                Ok(points
                    .iter()
                    .map(|p| p.iter().zip(&target).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
                    .fold(f64::INFINITY, f64::min))
            }
        }
    }

    /// Exact supremum of `p` over `V` in dimension `dim`.
    pub fn sup_seminorm_of(&self, p: &Seminorm, dim: usize) -> Result<f64> {
        match self {
            BoundSet::Ball { norm, radius } => Ok(radius * p.sup_over_unit_ball(norm, dim)?),
            BoundSet::Interval { lo, hi } => {
                p.check_dim(1)?;
                Ok(p.eval_moduli(std::iter::once(lo.abs().max(hi.abs()))))
            }
            // A seminorm is convex, so its maximum over a polytope sits at a vertex.
            BoundSet::Polytope(points) | BoundSet::FinitePoints(points) => {
                p.check_dim(dim)?;
                Ok(points.iter().map(|q| p.eval_moduli(q.iter().map(|x| x.abs()))).fold(0.0, f64::max))
            }
        }
    }

    /// Every element multiplied by `t > 0`.
    pub fn scaled(&self, t: f64) -> BoundSet {
        match self {
            BoundSet::Ball { norm, radius } => BoundSet::Ball { norm: norm.clone(), radius: radius * t },
            BoundSet::Interval { lo, hi } => BoundSet::Interval { lo: lo * t, hi: hi * t },
            BoundSet::Polytope(v) => BoundSet::Polytope(scale_points(v, t)),
            BoundSet::FinitePoints(v) => BoundSet::FinitePoints(scale_points(v, t)),
        }
    }
}

/// `sup_{v ∈ V} p_i(v)` for the `i`-th member of `family`.
pub fn sup_seminorm(set: &BoundSet, family: &SeminormFamily, i: usize, dim: usize) -> Result<f64> {
    set.sup_seminorm_of(family.get(i)?, dim)
}

fn scale_points(points: &[Vec<f64>], t: f64) -> Vec<Vec<f64>> {
    points.iter().map(|p| p.iter().map(|x| x * t).collect()).collect()
}

fn real_target(v: &Vector, points: &[Vec<f64>]) -> Result<Vec<f64>> {
    let dim = points.first().map(Vec::len).unwrap_or(0);
    v.check_dim(dim)?;
    if v.components().iter().any(|c| c.im != 0.0) {
        return Err(Error::UnsupportedField("vertex-based sets only contain real vectors".into()));
    }
    Ok(v.real_parts())
}

/// A symmetric convex set `λ·conv(V^b)`, stored with the scale already applied.
#[derive(Debug, Clone, PartialEq)]
pub enum HullRep {
    ScaledBall {
        norm: Seminorm,
        radius: f64,
    },
    /// `{z : |z| <= radius}` in dimension one (a disk over ℂ).
    SymmetricInterval {
        radius: f64,
    },
    /// Convex hull of a vertex list closed under negation.
    SymmetricPolytope {
        vertices: Vec<Vec<f64>>,
    },
}

impl HullRep {
    /// The seminorm in which [`HullRep::distance`] is measured.
    pub fn metric(&self) -> Seminorm {
        match self {
            HullRep::ScaledBall { norm, .. } => norm.clone(),
            HullRep::SymmetricInterval { .. } | HullRep::SymmetricPolytope { .. } => Seminorm::LInf,
        }
    }

    /// Distance from `v` to the set in [`HullRep::metric`]; zero for members.
    pub fn distance(&self, v: &Vector) -> Result<f64> {
        match self {
            HullRep::ScaledBall { norm, radius } => Ok((norm.eval(v)? - radius).max(0.0)),
            HullRep::SymmetricInterval { radius } => {
                v.check_dim(1)?;
                Ok((v.component(0).abs() - radius).max(0.0))
            }
            HullRep::SymmetricPolytope { vertices } => {
                let target = real_target(v, vertices)?;
                let (dist, _) = lp::hull_distance(vertices, &target);
                Ok((dist - lp_slack(vertices)).max(0.0))
            }
        }
    }

    /// Closure membership: `v` is within `tol` of the set.
    pub fn contains(&self, v: &Vector, tol: f64) -> Result<bool> {
        if tol < 0.0 || tol.is_nan() {
            return Err(Error::InvalidParameter(format!("tolerance must be nonnegative, got {tol}")));
        }
        Ok(self.distance(v)? <= tol)
    }

    pub fn scale(&self, lambda: f64) -> Result<HullRep> {
        if lambda < 0.0 || lambda.is_nan() {
            return Err(Error::NegativeScale(lambda));
        }
        Ok(match self {
            HullRep::ScaledBall { norm, radius } => HullRep::ScaledBall { norm: norm.clone(), radius: radius * lambda },
            HullRep::SymmetricInterval { radius } => HullRep::SymmetricInterval { radius: radius * lambda },
            HullRep::SymmetricPolytope { vertices } => {
                HullRep::SymmetricPolytope { vertices: scale_points(vertices, lambda) }
            }
        })
    }

    /// Upper bound on the metric of any member; used as a magnitude reference.
    pub fn extent(&self) -> f64 {
        match self {
            HullRep::ScaledBall { radius, .. } | HullRep::SymmetricInterval { radius } => *radius,
            HullRep::SymmetricPolytope { vertices } => vertices.iter().flatten().map(|x| x.abs()).fold(0.0, f64::max),
        }
    }
}

impl fmt::Display for HullRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HullRep::ScaledBall { norm, radius } => write!(f, "ball({norm}, radius {radius})"),
            HullRep::SymmetricInterval { radius } => write!(f, "symmetric interval(radius {radius})"),
            HullRep::SymmetricPolytope { vertices } => write!(f, "symmetric polytope({} vertices)", vertices.len()),
        }
    }
}

/// `conv(V^b)` for a perturbation set over `field`.
pub fn symmetric_convex_hull(set: &BoundSet, field: Field) -> Result<HullRep> {
    match set {
        BoundSet::Ball { norm, radius } => Ok(HullRep::ScaledBall { norm: norm.clone(), radius: *radius }),
        BoundSet::Interval { lo, hi } => Ok(HullRep::SymmetricInterval { radius: lo.abs().max(hi.abs()) }),
        BoundSet::Polytope(points) | BoundSet::FinitePoints(points) => {
            if field != Field::Real {
                return Err(Error::UnsupportedField(format!("conv(V^b) of a {} over C is not polyhedral", set.kind())));
            }
            let mut vertices: Vec<Vec<f64>> = Vec::with_capacity(2 * points.len());
            for p in points {
                let neg: Vec<f64> = p.iter().map(|x| -x).collect();
                for q in [p.clone(), neg] {
                    if !vertices.contains(&q) {
                        vertices.push(q);
                    }
                }
            }
            Ok(HullRep::SymmetricPolytope { vertices })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cross() -> HullRep {
        symmetric_convex_hull(&BoundSet::FinitePoints(vec![vec![1.0, 0.0], vec![0.0, 1.0]]), Field::Real).unwrap()
    }

    /// Brute force: sample `mu * a` over `|mu| <= 1`, `a` in `[lo, hi]` and take the extent.
    fn interval_hull_extent_oracle(lo: f64, hi: f64) -> (f64, f64) {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for i in 0..=200 {
            let mu = -1.0 + 2.0 * i as f64 / 200.0;
            for j in 0..=100 {
                let a = lo + (hi - lo) * j as f64 / 100.0;
                min = min.min(mu * a);
                max = max.max(mu * a);
            }
        }
        (min, max)
    }

    /// Dense grid over the weight simplex of the given points; returns the
    /// smallest sup-distance to `target`.
    fn grid_simplex_distance(points: &[Vec<f64>], target: &[f64], steps: usize) -> f64 {
        fn walk(
            points: &[Vec<f64>],
            target: &[f64],
            steps: usize,
            k: usize,
            left: usize,
            acc: &mut Vec<f64>,
            best: &mut f64,
        ) {
            if k + 1 == points.len() {
                let w = left as f64 / steps as f64;
                let dist = (0..target.len()).map(|j| (acc[j] + w * points[k][j] - target[j]).abs()).fold(0.0, f64::max);
                *best = best.min(dist);
                return;
            }
            for take in 0..=left {
                let w = take as f64 / steps as f64;
                for j in 0..target.len() {
                    acc[j] += w * points[k][j];
                }
                walk(points, target, steps, k + 1, left - take, acc, best);
                for j in 0..target.len() {
                    acc[j] -= w * points[k][j];
                }
            }
        }
        let mut best = f64::INFINITY;
        walk(points, target, steps, 0, steps, &mut vec![0.0; target.len()], &mut best);
        best
    }

    #[test]
    fn interval_hulls() {
        let unit = symmetric_convex_hull(&BoundSet::Interval { lo: -1.0, hi: 1.0 }, Field::Real).unwrap();
        assert_eq!(unit, HullRep::SymmetricInterval { radius: 1.0 });
        let shifted = symmetric_convex_hull(&BoundSet::Interval { lo: 1.0, hi: 2.0 }, Field::Real).unwrap();
        let (lo, hi) = interval_hull_extent_oracle(1.0, 2.0);
        assert_eq!((lo, hi), (-2.0, 2.0));
        assert_eq!(shifted, HullRep::SymmetricInterval { radius: hi });
    }

    #[test]
    fn finite_points_hull_is_the_cross_polytope() {
        let HullRep::SymmetricPolytope { vertices } = cross() else { panic!("expected polytope") };
        let mut got = vertices.clone();
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut expected = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, 0.0], vec![0.0, -1.0]];
        expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(got, expected);
        // Oracle: the grid reaches every symmetric vertex and the origin, nothing beyond |x|+|y| = 1.
        assert!(grid_simplex_distance(&vertices, &[0.0, -1.0], 20) < 1e-15);
        assert!(grid_simplex_distance(&vertices, &[0.6, 0.6], 40) > 0.09);
    }

    #[test]
    fn polytope_over_complex_is_rejected() {
        let set = BoundSet::Polytope(vec![vec![1.0]]);
        assert!(matches!(symmetric_convex_hull(&set, Field::Complex), Err(Error::UnsupportedField(_))));
        assert!(set.validate(Field::Complex, 1).is_err());
    }

    #[test]
    fn scale_examples() {
        let ball = HullRep::ScaledBall { norm: Seminorm::LInf, radius: 1.0 };
        assert_eq!(ball.scale(2.0).unwrap(), HullRep::ScaledBall { norm: Seminorm::LInf, radius: 2.0 });
        let q = 1.5;
        let interval = HullRep::SymmetricInterval { radius: 2.0 }.scale(1.0 / (q - 1.0)).unwrap();
        assert_eq!(interval, HullRep::SymmetricInterval { radius: 4.0 });
        assert_eq!(cross().scale(2.0).unwrap().scale(0.5).unwrap(), cross());
        assert_eq!(cross().scale(1.0).unwrap(), cross());
        assert_eq!(ball.scale(-1.0), Err(Error::NegativeScale(-1.0)));
    }

    #[test]
    fn contains_examples() {
        let ball = HullRep::ScaledBall { norm: Seminorm::LInf, radius: 1.0 };
        assert!(ball.contains(&Vector::real(&[1.0 + 1e-12, 0.0]), 1e-9).unwrap());
        assert!(!ball.contains(&Vector::real(&[1.0 + 1e-6, 0.0]), 1e-9).unwrap());

        let half = [0.5, 0.5];
        let HullRep::SymmetricPolytope { vertices } = cross() else { unreachable!() };
        assert!(grid_simplex_distance(&vertices, &half, 20) < 1e-15);
        assert!(cross().contains(&Vector::real(&half), 0.0).unwrap());

        let far = [0.8, 0.8];
        assert!(grid_simplex_distance(&vertices, &far, 40) > 0.29);
        assert!(!cross().contains(&Vector::real(&far), 1e-9).unwrap());
        // Sup-distance from (0.8, 0.8) to the segment x + y = 1 is 0.3.
        assert!((cross().distance(&Vector::real(&far)).unwrap() - 0.3).abs() < 1e-9);
    }

    #[test]
    fn contains_rejects_mismatches() {
        assert!(cross().contains(&Vector::real(&[1.0]), 0.0).is_err());
        assert!(cross().contains(&Vector::complex(&[(0.1, 0.1), (0.0, 0.0)]), 0.0).is_err());
        let disk = HullRep::SymmetricInterval { radius: 1.0 };
        assert!(disk.contains(&Vector::complex(&[(0.6, 0.8)]), 1e-12).unwrap());
        assert!(!disk.contains(&Vector::complex(&[(0.6, 0.9)]), 1e-12).unwrap());
    }

    #[test]
    fn sup_seminorm_examples() {
        let interval = BoundSet::Interval { lo: -2.0, hi: 1.0 };
        let family = SeminormFamily::new(vec![Seminorm::LInf, Seminorm::L1]).unwrap();
        assert_eq!(sup_seminorm(&interval, &family, 0, 1).unwrap(), 2.0);
        let ball = BoundSet::Ball { norm: Seminorm::LInf, radius: 3.0 };
        assert_eq!(sup_seminorm(&ball, &family, 0, 2).unwrap(), 3.0);
        assert_eq!(sup_seminorm(&ball, &family, 1, 2).unwrap(), 6.0);
        let poly = BoundSet::Polytope(vec![vec![1.0, 0.0], vec![0.0, 2.0]]);
        assert_eq!(sup_seminorm(&poly, &family, 0, 2).unwrap(), 2.0);
        assert!(sup_seminorm(&poly, &family, 2, 2).is_err());
    }

    #[test]
    fn declared_membership() {
        let interval = BoundSet::Interval { lo: 1.0, hi: 2.0 };
        assert!(interval.contains(&Vector::real(&[1.5]), 0.0).unwrap());
        assert!(!interval.contains(&Vector::real(&[-1.5]), 0.0).unwrap());
        let points = BoundSet::FinitePoints(vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert!(points.contains(&Vector::real(&[0.0, 1.0]), 0.0).unwrap());
        assert!(!points.contains(&Vector::real(&[0.5, 0.5]), 1e-9).unwrap());
        let poly = BoundSet::Polytope(vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert!(poly.contains(&Vector::real(&[0.5, 0.5]), 0.0).unwrap());
        assert!(!poly.contains(&Vector::real(&[-0.5, 0.5]), 1e-9).unwrap());
    }

    #[test]
    fn idempotent_on_symmetric_input() {
        let sym = BoundSet::Interval { lo: -3.0, hi: 3.0 };
        let h = symmetric_convex_hull(&sym, Field::Real).unwrap();
        let HullRep::SymmetricInterval { radius } = h else { unreachable!() };
        let again = symmetric_convex_hull(&BoundSet::Interval { lo: -radius, hi: radius }, Field::Real).unwrap();
        assert_eq!(h, again);
        let HullRep::SymmetricPolytope { vertices } = cross() else { unreachable!() };
        assert_eq!(symmetric_convex_hull(&BoundSet::Polytope(vertices), Field::Real).unwrap(), cross());
    }

    fn hulls() -> impl Strategy<Value = HullRep> {
        let point = prop::collection::vec(-3.0..3.0f64, 2);
        prop_oneof![
            (0.1..5.0f64).prop_map(|r| HullRep::SymmetricInterval { radius: r }),
            (0.1..5.0f64, prop_oneof![Just(Seminorm::L1), Just(Seminorm::L2), Just(Seminorm::LInf)])
                .prop_map(|(r, norm)| HullRep::ScaledBall { norm, radius: r }),
            prop::collection::vec(point, 1..5).prop_map(|pts| symmetric_convex_hull(
                &BoundSet::Polytope(pts),
                Field::Real
            )
            .unwrap()),
        ]
    }

    /// A random member of `h` as a random convex combination of extreme points.
    fn member(h: &HullRep, rng: &mut ChaCha8Rng) -> Vector {
        match h {
            HullRep::SymmetricInterval { radius } => Vector::real(&[rng.random_range(-*radius..=*radius)]),
            HullRep::ScaledBall { norm, radius } => {
                let mut v = Vector::real(&[rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]);
                let n = norm.eval(&v).unwrap();
                if n > 0.0 {
                    v = v.scale_real(radius * rng.random::<f64>() / n);
                }
                v
            }
            HullRep::SymmetricPolytope { vertices } => {
                let w: Vec<f64> = vertices.iter().map(|_| rng.random::<f64>() + 1e-3).collect();
                let total: f64 = w.iter().sum();
                let mut p = vec![0.0; 2];
                for (wi, v) in w.iter().zip(vertices) {
                    p[0] += wi / total * v[0];
                    p[1] += wi / total * v[1];
                }
                Vector::real(&p)
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn balanced_convex_and_monotone(h in hulls(), seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..16 {
                let p = member(&h, &mut rng);
                let q = member(&h, &mut rng);
                prop_assert!(h.contains(&p, 1e-9).unwrap());
                let mu = rng.random_range(-1.0..=1.0);
                prop_assert!(h.contains(&p.scale_real(mu), 1e-9).unwrap());
                let t = rng.random::<f64>();
                let mid = &p.scale_real(t) + &q.scale_real(1.0 - t);
                prop_assert!(h.contains(&mid, 1e-9).unwrap());
                let l1 = rng.random_range(0.0..2.0);
                let l2 = l1 + rng.random_range(0.0..2.0);
                let small = h.scale(l1).unwrap();
                let big = h.scale(l2).unwrap();
                let s = member(&small, &mut rng);
                prop_assert!(big.contains(&s, 1e-9).unwrap());
            }
        }
    }
}
