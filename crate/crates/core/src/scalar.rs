//! Scalars over the real or complex field and finite-dimensional vectors.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// The scalar field. `Complex` absorbs `Real` when the two meet in arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Field {
    Real,
    Complex,
}

impl Field {
    pub fn name(self) -> &'static str {
        match self {
            Field::Real => "real",
            Field::Complex => "complex",
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A field element. Real-tagged scalars always carry a zero imaginary part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scalar {
    field: Field,
    value: Complex64,
}

impl Scalar {
    pub fn real(re: f64) -> Self {
        Scalar { field: Field::Real, value: Complex64::new(re, 0.0) }
    }

    pub fn complex(re: f64, im: f64) -> Self {
        Scalar { field: Field::Complex, value: Complex64::new(re, im) }
    }

    pub fn zero(field: Field) -> Self {
        Scalar { field, value: Complex64::new(0.0, 0.0) }
    }

    pub fn one(field: Field) -> Self {
        Scalar { field, value: Complex64::new(1.0, 0.0) }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn re(&self) -> f64 {
        self.value.re
    }

    pub fn im(&self) -> f64 {
        self.value.im
    }

    pub fn as_complex(&self) -> Complex64 {
        self.value
    }

    /// Absolute value or modulus; `hypot` keeps the complex case overflow-safe.
    pub fn abs(&self) -> f64 {
        match self.field {
            Field::Real => self.value.re.abs(),
            Field::Complex => self.value.re.hypot(self.value.im),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.value.re == 0.0 && self.value.im == 0.0
    }

    pub fn is_finite(&self) -> bool {
        self.value.re.is_finite() && self.value.im.is_finite()
    }

    /// Re-tag into `field`. Narrowing to `Real` fails when the imaginary part is nonzero.
    pub fn into_field(self, field: Field) -> Result<Self> {
        match field {
            Field::Complex => Ok(Scalar { field, value: self.value }),
            Field::Real if self.value.im == 0.0 => Ok(Scalar { field, value: self.value }),
            Field::Real => {
                Err(Error::FieldMismatch(format!("scalar {self} has a nonzero imaginary part and cannot be real")))
            }
        }
    }

    pub fn recip(self) -> Self {
        Scalar::one(self.field) / self
    }

    fn from_parts(field: Field, value: Complex64) -> Self {
        match field {
            Field::Real => Scalar { field, value: Complex64::new(value.re, 0.0) },
            Field::Complex => Scalar { field, value },
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.field {
            Field::Real => write!(f, "{}", self.value.re),
            Field::Complex => write!(f, "{}{:+}i", self.value.re, self.value.im),
        }
    }
}

impl From<f64> for Scalar {
    fn from(re: f64) -> Self {
        Scalar::real(re)
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        Scalar::from_parts(self.field.max(rhs.field), self.value + rhs.value)
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        Scalar::from_parts(self.field.max(rhs.field), self.value - rhs.value)
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        let field = self.field.max(rhs.field);
        match field {
            Field::Real => Scalar::real(self.value.re * rhs.value.re),
            Field::Complex => Scalar::from_parts(field, self.value * rhs.value),
        }
    }
}

impl Div for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        let field = self.field.max(rhs.field);
        match field {
            Field::Real => Scalar::real(self.value.re / rhs.value.re),
            Field::Complex => Scalar::from_parts(field, self.value.fdiv(rhs.value)),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { field: self.field, value: -self.value }
    }
}

/// An element of 𝕂^d. All components share one field tag.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector {
    field: Field,
    components: Vec<Complex64>,
}

impl Vector {
    pub fn real(components: &[f64]) -> Self {
        Vector { field: Field::Real, components: components.iter().map(|&x| Complex64::new(x, 0.0)).collect() }
    }

    pub fn complex(components: &[(f64, f64)]) -> Self {
        Vector {
            field: Field::Complex,
            components: components.iter().map(|&(re, im)| Complex64::new(re, im)).collect(),
        }
    }

    pub fn from_scalars(field: Field, scalars: &[Scalar]) -> Result<Self> {
        let components =
            scalars.iter().map(|s| s.into_field(field).map(|s| s.as_complex())).collect::<Result<Vec<_>>>()?;
        Ok(Vector { field, components })
    }

    /// Builds from raw components; imaginary parts are dropped for the real field.
    pub fn from_components(field: Field, mut components: Vec<Complex64>) -> Self {
        if field == Field::Real {
            components.iter_mut().for_each(|c| c.im = 0.0);
        }
        Vector { field, components }
    }

    pub fn zeros(field: Field, dim: usize) -> Self {
        Vector { field, components: vec![Complex64::new(0.0, 0.0); dim] }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn component(&self, i: usize) -> Scalar {
        Scalar::from_parts(self.field, self.components[i])
    }

    pub fn components(&self) -> &[Complex64] {
        &self.components
    }

    /// Real parts, for real-field vectors.
    pub fn real_parts(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.re).collect()
    }

    /// Component moduli.
    pub fn moduli(&self) -> impl Iterator<Item = f64> + '_ {
        let field = self.field;
        self.components.iter().map(move |c| match field {
            Field::Real => c.re.abs(),
            Field::Complex => c.re.hypot(c.im),
        })
    }

    pub fn max_modulus(&self) -> f64 {
        self.moduli().fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.components.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn into_field(self, field: Field) -> Result<Self> {
        if field == Field::Real && self.components.iter().any(|c| c.im != 0.0) {
            return Err(Error::FieldMismatch("complex vector cannot be narrowed to the real field".into()));
        }
        Ok(Vector { field, components: self.components })
    }

    pub fn scale(&self, s: Scalar) -> Vector {
        let field = self.field.max(s.field());
        let value = s.as_complex();
        let components = match field {
            Field::Real => self.components.iter().map(|c| Complex64::new(c.re * value.re, 0.0)).collect(),
            Field::Complex => self.components.iter().map(|c| c * value).collect(),
        };
        Vector { field, components }
    }

    pub fn scale_real(&self, s: f64) -> Vector {
        Vector { field: self.field, components: self.components.iter().map(|c| c * s).collect() }
    }

    pub fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim() == expected {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected, found: self.dim() })
        }
    }

    fn zip_with(&self, rhs: &Vector, op: impl Fn(Complex64, Complex64) -> Complex64) -> Vector {
        assert_eq!(self.dim(), rhs.dim(), "vector dimension mismatch");
        Vector {
            field: self.field.max(rhs.field),
            components: self.components.iter().zip(&rhs.components).map(|(&a, &b)| op(a, b)).collect(),
        }
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for i in 0..self.dim() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}", self.component(i))?;
        }
        f.write_str(")")
    }
}

impl Add for &Vector {
    type Output = Vector;
    fn add(self, rhs: &Vector) -> Vector {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &Vector {
    type Output = Vector;
    fn sub(self, rhs: &Vector) -> Vector {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Neg for &Vector {
    type Output = Vector;
    fn neg(self) -> Vector {
        Vector { field: self.field, components: self.components.iter().map(|c| -c).collect() }
    }
}
