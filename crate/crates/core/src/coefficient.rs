//! Value spaces that forms, loops and finite differences can be built over.

use crate::liecore::AlgebraElement;

/// A real vector space whose elements carry their own shape (matrix rank, sample count).
pub trait Coefficient: Clone + Send + Sync + 'static {
    /// The zero element with the same shape as `self`.
    fn zero_like(&self) -> Self;
    /// `self += s * other`.
    fn add_scaled(&mut self, other: &Self, s: f64);
    /// A norm used for residuals: absolute value, Frobenius norm, or the maximum over samples.
    fn magnitude(&self) -> f64;

    fn scaled(&self, s: f64) -> Self {
        let mut out = self.zero_like();
        out.add_scaled(self, s);
        out
    }

    fn difference(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, -1.0);
        out
    }
}

impl Coefficient for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }
    fn add_scaled(&mut self, other: &Self, s: f64) {
        *self += s * other;
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Coefficient for AlgebraElement {
    fn zero_like(&self) -> Self {
        AlgebraElement::zero(self.rank())
    }
    fn add_scaled(&mut self, other: &Self, s: f64) {
        self.axpy(s, other);
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

impl Coefficient for crate::liecore::CMatrix {
    fn zero_like(&self) -> Self {
        Self::zeros(self.nrows(), self.ncols())
    }
    fn add_scaled(&mut self, other: &Self, s: f64) {
        *self += other * num_complex::Complex64::new(s, 0.0);
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}
