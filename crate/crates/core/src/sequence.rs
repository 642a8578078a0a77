//! Declarative coefficient sequences `(a_n)` and forcing sequences `(b_n)`.
//!
//! Asymptotic behaviour is declared through a tail law rather than inferred
//! from samples, so liminf/limsup of `|a_n|` are exact.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{Field, Scalar, Vector};

/// Anything that yields the coefficient `a_n` of `x_{n+1} = a_n x_n + b_n`.
pub trait Coefficients {
    fn coeff_at(&self, n: usize) -> Result<Scalar>;

    /// Number of defined coefficients, or `None` when defined for every `n`.
    fn horizon(&self) -> Option<usize>;
}

/// A constant scalar acts as the constant sequence `a_n = a`, zero included.
impl Coefficients for Scalar {
    fn coeff_at(&self, _n: usize) -> Result<Scalar> {
        Ok(*self)
    }

    fn horizon(&self) -> Option<usize> {
        None
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CoeffLaw {
    Constant(Scalar),
    Periodic(Vec<Scalar>),
    EventuallyConstant { prefix: Vec<Scalar>, tail: Scalar },
    ExplicitFinite(Vec<Scalar>),
}

/// A coefficient sequence with nonzero entries.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSpec {
    law: CoeffLaw,
}

impl CoefficientSpec {
    pub fn new(law: CoeffLaw) -> Result<Self> {
        let entries: Vec<&Scalar> = match &law {
            CoeffLaw::Constant(a) => vec![a],
            CoeffLaw::Periodic(values) => {
                if values.is_empty() {
                    return Err(Error::InvalidParameter("periodic coefficients need at least one value".into()));
                }
                values.iter().collect()
            }
            CoeffLaw::EventuallyConstant { prefix, tail } => prefix.iter().chain(std::iter::once(tail)).collect(),
            CoeffLaw::ExplicitFinite(values) => values.iter().collect(),
        };
        for (position, a) in entries.into_iter().enumerate() {
            if a.is_zero() {
                return Err(Error::ZeroCoefficient { position });
            }
            if !a.is_finite() {
                return Err(Error::InvalidParameter(format!("coefficient at position {position} is not finite")));
            }
        }
        Ok(CoefficientSpec { law })
    }

    pub fn constant(a: impl Into<Scalar>) -> Result<Self> {
        Self::new(CoeffLaw::Constant(a.into()))
    }

    pub fn periodic(values: Vec<Scalar>) -> Result<Self> {
        Self::new(CoeffLaw::Periodic(values))
    }

    pub fn eventually_constant(prefix: Vec<Scalar>, tail: impl Into<Scalar>) -> Result<Self> {
        Self::new(CoeffLaw::EventuallyConstant { prefix, tail: tail.into() })
    }

    pub fn explicit(values: Vec<Scalar>) -> Result<Self> {
        Self::new(CoeffLaw::ExplicitFinite(values))
    }

    /// Convenience for real coefficient lists.
    pub fn periodic_real(values: &[f64]) -> Result<Self> {
        Self::periodic(values.iter().map(|&a| Scalar::real(a)).collect())
    }

    pub fn law(&self) -> &CoeffLaw {
        &self.law
    }

    /// The field the coefficients live in; complex when any entry is complex.
    pub fn field(&self) -> Field {
        self.entries().map(|a| a.field()).max().unwrap_or(Field::Real)
    }

    pub(crate) fn entries(&self) -> impl Iterator<Item = &Scalar> + Clone {
        let (head, tail): (&[Scalar], Option<&Scalar>) = match &self.law {
            CoeffLaw::Constant(a) => (&[], Some(a)),
            CoeffLaw::Periodic(v) | CoeffLaw::ExplicitFinite(v) => (v, None),
            CoeffLaw::EventuallyConstant { prefix, tail } => (prefix, Some(tail)),
        };
        head.iter().chain(tail)
    }

    /// Exact `(liminf |a_n|, limsup |a_n|)` from the tail law.
    pub fn tail_bounds(&self) -> Result<(f64, f64)> {
        match &self.law {
            CoeffLaw::Constant(a) => Ok((a.abs(), a.abs())),
            CoeffLaw::Periodic(values) => {
                let lo = values.iter().map(Scalar::abs).fold(f64::INFINITY, f64::min);
                let hi = values.iter().map(Scalar::abs).fold(0.0, f64::max);
                Ok((lo, hi))
            }
            CoeffLaw::EventuallyConstant { tail, .. } => Ok((tail.abs(), tail.abs())),
            CoeffLaw::ExplicitFinite(_) => Err(Error::AsymptoticsUnavailable),
        }
    }

    /// Period of the eventual law and the index where it starts.
    #[cfg(test)]
    fn tail_start_and_period(&self) -> Option<(usize, usize)> {
        match &self.law {
            CoeffLaw::Constant(_) => Some((0, 1)),
            CoeffLaw::Periodic(values) => Some((0, values.len())),
            CoeffLaw::EventuallyConstant { prefix, .. } => Some((prefix.len(), 1)),
            CoeffLaw::ExplicitFinite(_) => None,
        }
    }
}

impl Coefficients for CoefficientSpec {
    fn coeff_at(&self, n: usize) -> Result<Scalar> {
        match &self.law {
            CoeffLaw::Constant(a) => Ok(*a),
            CoeffLaw::Periodic(values) => Ok(values[n % values.len()]),
            CoeffLaw::EventuallyConstant { prefix, tail } => Ok(prefix.get(n).copied().unwrap_or(*tail)),
            CoeffLaw::ExplicitFinite(values) => {
                values.get(n).copied().ok_or(Error::IndexOutOfRange { index: n, horizon: values.len() })
            }
        }
    }

    fn horizon(&self) -> Option<usize> {
        match &self.law {
            CoeffLaw::ExplicitFinite(values) => Some(values.len()),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Expanding,
    Contracting,
    Critical,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::Expanding => "expanding",
            Regime::Contracting => "contracting",
            Regime::Critical => "critical",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeClassification {
    pub regime: Regime,
    pub liminf_abs: f64,
    pub limsup_abs: f64,
}

impl RegimeClassification {
    pub fn from_bounds(liminf_abs: f64, limsup_abs: f64) -> Self {
        let regime = if liminf_abs > 1.0 {
            Regime::Expanding
        } else if limsup_abs < 1.0 {
            Regime::Contracting
        } else {
            Regime::Critical
        };
        RegimeClassification { regime, liminf_abs, limsup_abs }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ForcingTail {
    Zero,
    Constant(Vector),
    Periodic(Vec<Vector>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ForcingLaw {
    Zero,
    Constant(Vector),
    Periodic(Vec<Vector>),
    ExplicitFinite { values: Vec<Vector>, tail: ForcingTail },
}

/// The forcing sequence `(b_n)`; defined for every `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ForcingSpec {
    law: ForcingLaw,
}

impl ForcingSpec {
    pub fn new(law: ForcingLaw) -> Result<Self> {
        let vectors: Vec<&Vector> = match &law {
            ForcingLaw::Zero => vec![],
            ForcingLaw::Constant(b) => vec![b],
            ForcingLaw::Periodic(values) => {
                if values.is_empty() {
                    return Err(Error::InvalidParameter("periodic forcing needs at least one vector".into()));
                }
                values.iter().collect()
            }
            ForcingLaw::ExplicitFinite { values, tail } => {
                let tail: Vec<&Vector> = match tail {
                    ForcingTail::Zero => vec![],
                    ForcingTail::Constant(b) => vec![b],
                    ForcingTail::Periodic(v) if v.is_empty() => {
                        return Err(Error::InvalidParameter("periodic forcing tail needs at least one vector".into()))
                    }
                    ForcingTail::Periodic(v) => v.iter().collect(),
                };
                values.iter().chain(tail).collect()
            }
        };
        if let Some(first) = vectors.first() {
            for v in &vectors {
                v.check_dim(first.dim())?;
                if v.field() != first.field() {
                    return Err(Error::FieldMismatch("forcing vectors mix real and complex fields".into()));
                }
                if !v.is_finite() {
                    return Err(Error::InvalidParameter("forcing vector is not finite".into()));
                }
            }
        }
        Ok(ForcingSpec { law })
    }

    pub fn zero() -> Self {
        ForcingSpec { law: ForcingLaw::Zero }
    }

    pub fn constant(b: Vector) -> Result<Self> {
        Self::new(ForcingLaw::Constant(b))
    }

    pub fn law(&self) -> &ForcingLaw {
        &self.law
    }

    /// Dimension of the stored vectors; `None` for the zero forcing.
    pub fn dim(&self) -> Option<usize> {
        self.first_vector().map(Vector::dim)
    }

    pub fn field(&self) -> Option<Field> {
        self.first_vector().map(Vector::field)
    }

    fn first_vector(&self) -> Option<&Vector> {
        match &self.law {
            ForcingLaw::Zero => None,
            ForcingLaw::Constant(b) => Some(b),
            ForcingLaw::Periodic(v) => v.first(),
            ForcingLaw::ExplicitFinite { values, tail } => values.first().or(match tail {
                ForcingTail::Zero => None,
                ForcingTail::Constant(b) => Some(b),
                ForcingTail::Periodic(v) => v.first(),
            }),
        }
    }

    /// `b_n`, with the zero law rendered in the given dimension and field.
    pub fn at(&self, n: usize, dim: usize, field: Field) -> Vector {
        let zero = || Vector::zeros(field, dim);
        match &self.law {
            ForcingLaw::Zero => zero(),
            ForcingLaw::Constant(b) => b.clone(),
            ForcingLaw::Periodic(values) => values[n % values.len()].clone(),
            ForcingLaw::ExplicitFinite { values, tail } => match values.get(n) {
                Some(b) => b.clone(),
                None => {
                    let k = n - values.len();
                    match tail {
                        ForcingTail::Zero => zero(),
                        ForcingTail::Constant(b) => b.clone(),
                        ForcingTail::Periodic(v) => v[k % v.len()].clone(),
                    }
                }
            },
        }
    }

    /// Every forcing term multiplied by `t`.
    pub fn scaled(&self, t: f64) -> ForcingSpec {
        let s = |v: &Vector| v.scale_real(t);
        let law = match &self.law {
            ForcingLaw::Zero => ForcingLaw::Zero,
            ForcingLaw::Constant(b) => ForcingLaw::Constant(s(b)),
            ForcingLaw::Periodic(v) => ForcingLaw::Periodic(v.iter().map(s).collect()),
            ForcingLaw::ExplicitFinite { values, tail } => ForcingLaw::ExplicitFinite {
                values: values.iter().map(s).collect(),
                tail: match tail {
                    ForcingTail::Zero => ForcingTail::Zero,
                    ForcingTail::Constant(b) => ForcingTail::Constant(s(b)),
                    ForcingTail::Periodic(v) => ForcingTail::Periodic(v.iter().map(s).collect()),
                },
            },
        };
        ForcingSpec { law }
    }
}
