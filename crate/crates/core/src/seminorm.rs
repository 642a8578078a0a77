//! Finite seminorm families standing in for a locally convex topology on 𝕂^d.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Vector;

/// A seminorm on 𝕂^d, evaluated on component moduli.
#[derive(Debug, Clone, PartialEq)]
pub enum Seminorm {
    L1,
    L2,
    LInf,
    /// `max_j w_j |v_j|`. Zero weights are allowed and make this a proper seminorm.
    WeightedSup(Vec<f64>),
}

impl Seminorm {
    pub fn weighted_sup(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidParameter("weighted-sup seminorm needs at least one weight".into()));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::InvalidParameter(format!("weighted-sup weight {w} must be finite and nonnegative")));
        }
        if weights.iter().all(|&w| w == 0.0) {
            return Err(Error::InvalidParameter("weighted-sup seminorm with all-zero weights".into()));
        }
        Ok(Seminorm::WeightedSup(weights))
    }

    /// Whether this seminorm separates points (is a norm).
    pub fn is_norm(&self) -> bool {
        match self {
            Seminorm::WeightedSup(w) => w.iter().all(|&w| w > 0.0),
            _ => true,
        }
    }

    /// Checks that this seminorm can act on vectors of dimension `dim`.
    pub fn check_dim(&self, dim: usize) -> Result<()> {
        match self {
            Seminorm::WeightedSup(w) if w.len() != dim => {
                Err(Error::DimensionMismatch { expected: w.len(), found: dim })
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, v: &Vector) -> Result<f64> {
        self.check_dim(v.dim())?;
        Ok(self.eval_moduli(v.moduli()))
    }

    pub(crate) fn eval_moduli(&self, moduli: impl Iterator<Item = f64>) -> f64 {
        match self {
            Seminorm::L1 => moduli.sum(),
            Seminorm::L2 => {
                let m: Vec<f64> = moduli.collect();
                let scale = m.iter().copied().fold(0.0, f64::max);
                if scale == 0.0 || !scale.is_finite() {
                    return scale;
                }
                scale * m.iter().map(|x| (x / scale).powi(2)).sum::<f64>().sqrt()
            }
            Seminorm::LInf => moduli.fold(0.0, f64::max),
            Seminorm::WeightedSup(w) => moduli.zip(w).map(|(m, w)| m * w).fold(0.0, f64::max),
        }
    }

    /// Exact value of `sup { self(v) : ball(v) <= 1 }` on 𝕂^dim.
    ///
    /// `ball` must be a norm, otherwise its unit ball is unbounded.
    pub fn sup_over_unit_ball(&self, ball: &Seminorm, dim: usize) -> Result<f64> {
        self.check_dim(dim)?;
        ball.check_dim(dim)?;
        if !ball.is_norm() {
            return Err(Error::InvalidParameter("ball descriptor must be a norm to bound a set".into()));
        }
        let d = dim as f64;
        Ok(match (self, ball) {
            (Seminorm::WeightedSup(w), Seminorm::WeightedSup(u)) => {
                w.iter().zip(u).map(|(w, u)| w / u).fold(0.0, f64::max)
            }
            (Seminorm::WeightedSup(w), _) => w.iter().copied().fold(0.0, f64::max),
            (p, Seminorm::WeightedSup(u)) => p.eval_moduli(u.iter().map(|u| 1.0 / u)),
            (p, r) => {
                let exponent = (p.inverse_exponent() - r.inverse_exponent()).max(0.0);
                d.powf(exponent)
            }
        })
    }

    fn inverse_exponent(&self) -> f64 {
        match self {
            Seminorm::L1 => 1.0,
            Seminorm::L2 => 0.5,
            Seminorm::LInf | Seminorm::WeightedSup(_) => 0.0,
        }
    }
}

impl fmt::Display for Seminorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Seminorm::L1 => f.write_str("l1"),
            Seminorm::L2 => f.write_str("l2"),
            Seminorm::LInf => f.write_str("linf"),
            Seminorm::WeightedSup(w) => write!(f, "weighted_sup{w:?}"),
        }
    }
}

/// A nonempty finite family of seminorms.
#[derive(Debug, Clone, PartialEq)]
pub struct SeminormFamily {
    members: Vec<Seminorm>,
}

impl SeminormFamily {
    pub fn new(members: Vec<Seminorm>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidParameter("seminorm family must be nonempty".into()));
        }
        Ok(SeminormFamily { members })
    }

    /// A single-norm family.
    pub fn normed(norm: Seminorm) -> Result<Self> {
        if !norm.is_norm() {
            return Err(Error::InvalidParameter(format!("{norm} does not separate points")));
        }
        Ok(SeminormFamily { members: vec![norm] })
    }

    pub fn is_normed_mode(&self) -> bool {
        self.members.len() == 1 && self.members[0].is_norm()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Seminorm] {
        &self.members
    }

    pub fn get(&self, i: usize) -> Result<&Seminorm> {
        self.members.get(i).ok_or(Error::SeminormIndex { index: i, size: self.members.len() })
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        self.members.iter().try_for_each(|p| p.check_dim(dim))
    }

    pub fn eval(&self, i: usize, v: &Vector) -> Result<f64> {
        self.get(i)?.eval(v)
    }

    pub fn eval_all(&self, v: &Vector) -> Result<Vec<f64>> {
        self.members.iter().map(|p| p.eval(v)).collect()
    }

    /// Largest member value; itself a seminorm.
    pub fn eval_max(&self, v: &Vector) -> Result<f64> {
        Ok(self.eval_all(v)?.into_iter().fold(0.0, f64::max))
    }
}
