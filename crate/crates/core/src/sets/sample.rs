//! Drawing defects from a perturbation set.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use super::{lp, lp_slack, BoundSet};
use crate::error::{Error, Result};
use crate::scalar::{Field, Scalar, Vector};
use crate::seminorm::Seminorm;

const REJECTION_ATTEMPTS: usize = 10_000;

/// A point of `set`, spread over its volume where that is cheap to do exactly.
pub(crate) fn uniform<R: Rng + ?Sized>(set: &BoundSet, field: Field, dim: usize, rng: &mut R) -> Vector {
    match set {
        BoundSet::Ball { norm, radius } => ball_point(norm, *radius, field, dim, rng),
        BoundSet::Interval { lo, hi } => {
            let x = if lo == hi { *lo } else { rng.random_range(*lo..=*hi) };
            Vector::from_scalars(field, &[Scalar::real(x)]).expect("real value fits any field")
        }
        BoundSet::Polytope(points) => Vector::real(&polytope_point(points, rng)),
        BoundSet::FinitePoints(points) => Vector::real(&points[rng.random_range(0..points.len())]),
    }
}

/// An extreme point of `set`.
pub(crate) fn vertex<R: Rng + ?Sized>(set: &BoundSet, field: Field, rng: &mut R) -> Result<Vector> {
    match set {
        BoundSet::Ball { .. } => Err(Error::IncompatibleSampler { sampler: "vertex", set: set.kind() }),
        BoundSet::Interval { lo, hi } => {
            let x = if rng.random::<bool>() { *lo } else { *hi };
            Vector::from_scalars(field, &[Scalar::real(x)])
        }
        BoundSet::Polytope(points) | BoundSet::FinitePoints(points) => {
            Ok(Vector::real(&points[rng.random_range(0..points.len())]))
        }
    }
}

fn ball_point<R: Rng + ?Sized>(norm: &Seminorm, radius: f64, field: Field, dim: usize, rng: &mut R) -> Vector {
    let complex = field == Field::Complex;
    let disk = |rng: &mut R, r: f64| -> Complex64 {
        let rho = r * rng.random::<f64>().sqrt();
        Complex64::from_polar(rho, TAU * rng.random::<f64>())
    };
    let components: Vec<Complex64> = match norm {
        Seminorm::LInf | Seminorm::WeightedSup(_) => (0..dim)
            .map(|j| {
                let r = match norm {
                    Seminorm::WeightedSup(w) => radius / w[j],
                    _ => radius,
                };
                if complex {
                    disk(rng, r)
                } else {
                    Complex64::new(rng.random_range(-r..=r), 0.0)
                }
            })
            .collect(),
        Seminorm::L2 => {
            let real_dim = if complex { 2 * dim } else { dim };
            let g: Vec<f64> = (0..real_dim).map(|_| StandardNormal.sample(rng)).collect();
            let len = g.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
            let rho = radius * rng.random::<f64>().powf(1.0 / real_dim as f64) / len;
            if complex {
                g.chunks(2).map(|c| Complex64::new(c[0] * rho, c[1] * rho)).collect()
            } else {
                g.iter().map(|x| Complex64::new(x * rho, 0.0)).collect()
            }
        }
        Seminorm::L1 => {
            // d+1 exponentials normalized by their total give a uniform point of the simplex interior.
            let e: Vec<f64> = (0..=dim).map(|_| Exp1.sample(rng)).collect();
            let total: f64 = e.iter().sum();
            e[..dim]
                .iter()
                .map(|x| {
                    let m = radius * x / total;
                    if complex {
                        Complex64::from_polar(m, TAU * rng.random::<f64>())
                    } else if rng.random::<bool>() {
                        Complex64::new(m, 0.0)
                    } else {
                        Complex64::new(-m, 0.0)
                    }
                })
                .collect()
        }
    };
    let mut v = Vector::from_components(field, components);
    // Round-off may nudge a boundary draw past the radius.
    while norm.eval(&v).map(|n| n > radius).unwrap_or(false) {
        v = v.scale_real(1.0 - 4.0 * f64::EPSILON);
    }
    v
}

fn polytope_point<R: Rng + ?Sized>(points: &[Vec<f64>], rng: &mut R) -> Vec<f64> {
    let dim = points[0].len();
    if dim <= 3 && affine_rank(points) == dim {
        let lo: Vec<f64> = (0..dim).map(|j| points.iter().map(|p| p[j]).fold(f64::INFINITY, f64::min)).collect();
        let hi: Vec<f64> = (0..dim).map(|j| points.iter().map(|p| p[j]).fold(f64::NEG_INFINITY, f64::max)).collect();
        let slack = lp_slack(points);
        for _ in 0..REJECTION_ATTEMPTS {
            let candidate: Vec<f64> =
                lo.iter().zip(&hi).map(|(&l, &h)| if l == h { l } else { rng.random_range(l..=h) }).collect();
            if lp::hull_distance(points, &candidate).0 <= slack {
                return candidate;
            }
        }
    }
    // Flat polytopes defeat rejection; fall back to a Dirichlet(1, ..., 1) combination.
    let w: Vec<f64> = points.iter().map(|_| Exp1.sample(rng)).collect();
    let total: f64 = w.iter().sum();
    (0..dim).map(|j| w.iter().zip(points).map(|(w, p)| w / total * p[j]).sum()).collect()
}

/// Dimension of the affine hull, by elimination on the edge vectors from the first point.
fn affine_rank(points: &[Vec<f64>]) -> usize {
    let origin = &points[0];
    let mut rows: Vec<Vec<f64>> =
        points[1..].iter().map(|p| p.iter().zip(origin).map(|(x, o)| x - o).collect()).collect();
    let scale = rows.iter().flatten().map(|x| x.abs()).fold(0.0, f64::max);
    let eps = 1e-12 * scale.max(f64::MIN_POSITIVE);
    let dim = origin.len();
    let mut rank = 0;
    for col in 0..dim {
        let Some(pivot) = (rank..rows.len()).max_by(|&i, &j| rows[i][col].abs().total_cmp(&rows[j][col].abs())) else {
            break;
        };
        if rows[pivot][col].abs() <= eps {
            continue;
        }
        rows.swap(rank, pivot);
        let head = rows[rank].clone();
        for row in rows.iter_mut().skip(rank + 1) {
            let f = row[col] / head[col];
            for (v, h) in row.iter_mut().zip(&head) {
                *v -= f * h;
            }
        }
        rank += 1;
    }
    rank
}
