//! Compensated summation and overflow-safe products of moduli.

use std::ops::AddAssign;

use num_complex::Complex64;

use crate::scalar::{Field, Vector};

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl AddAssign<f64> for NeumaierSum {
    fn add_assign(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }
}

/// Componentwise compensated sum of vectors.
#[derive(Debug, Clone)]
pub struct VectorSum {
    field: Field,
    re: Vec<NeumaierSum>,
    im: Vec<NeumaierSum>,
}

impl VectorSum {
    pub fn new(field: Field, dim: usize) -> Self {
        VectorSum { field, re: vec![NeumaierSum::default(); dim], im: vec![NeumaierSum::default(); dim] }
    }

    pub fn add(&mut self, v: &Vector) {
        self.field = self.field.max(v.field());
        for (i, c) in v.components().iter().enumerate() {
            self.re[i] += c.re;
            self.im[i] += c.im;
        }
    }

    pub fn value(&self) -> Vector {
        let components = self.re.iter().zip(&self.im).map(|(r, i)| Complex64::new(r.value(), i.value())).collect();
        Vector::from_components(self.field, components)
    }
}

/// Largest magnitude of a running product kept in direct form, about e^600.
const DIRECT_LIMIT: f64 = 3.7e260;

/// `∏ |a_k|`, carried as a direct product that is folded into a logarithm
/// whenever it leaves `[1/DIRECT_LIMIT, DIRECT_LIMIT]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductAbs {
    direct: f64,
    log_offset: f64,
}

impl Default for ProductAbs {
    fn default() -> Self {
        ProductAbs { direct: 1.0, log_offset: 0.0 }
    }
}

impl ProductAbs {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn push(&mut self, modulus: f64) {
        self.direct *= modulus;
        if self.direct != 0.0 && (self.direct > DIRECT_LIMIT || self.direct < 1.0 / DIRECT_LIMIT) {
            self.log_offset += self.direct.ln();
            self.direct = 1.0;
        }
    }

    /// Natural logarithm of the product; `-inf` for a zero product.
    pub fn ln(&self) -> f64 {
        self.log_offset + self.direct.ln()
    }

    /// The product itself, which may overflow to `inf` or underflow to zero.
    pub fn value(&self) -> f64 {
        if self.log_offset == 0.0 {
            self.direct
        } else {
            self.ln().exp()
        }
    }

    /// True when the product was never folded into log form.
    pub fn is_direct(&self) -> bool {
        self.log_offset == 0.0
    }
}
