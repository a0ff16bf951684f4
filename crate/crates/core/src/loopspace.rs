//! Uniformly sampled loops in su(n), SU(n) and ℝ, their spectral calculus, and the
//! semidirect product LG ⋊ S¹ with its Lie algebra Lg ⋊ ℝ.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::coefficient::Coefficient;
use crate::error::{Error, Result};
use crate::liecore::{exponential, AlgebraElement, CMatrix, GroupElement};

/// θ_j = 2πj/N.
pub fn grid_angle(j: usize, n: usize) -> f64 {
    2.0 * PI * j as f64 / n as f64
}

fn check_sample_count(n: usize) -> Result<()> {
    if n < 4 || n % 2 != 0 {
        Err(Error::SampleCount(n))
    } else {
        Ok(())
    }
}

/// Samples of a periodic map [0, 2π) → V at the angles θ_j = 2πj/N.
#[derive(Clone, Debug, PartialEq)]
pub struct Loop<V> {
    samples: Vec<V>,
}

impl<V> Loop<V> {
    pub fn new(samples: Vec<V>) -> Result<Self> {
        check_sample_count(samples.len())?;
        Ok(Self { samples })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(f64) -> V) -> Result<Self> {
        check_sample_count(n)?;
        Ok(Self { samples: (0..n).map(|j| f(grid_angle(j, n))).collect() })
    }

    pub fn samples(&self) -> &[V] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<V> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn angle(&self, j: usize) -> f64 {
        grid_angle(j, self.samples.len())
    }

    pub fn iter(&self) -> std::slice::Iter<'_, V> {
        self.samples.iter()
    }

    pub fn map<W>(&self, f: impl FnMut(&V) -> W) -> Loop<W> {
        Loop { samples: self.samples.iter().map(f).collect() }
    }

    /// Pointwise combination; panics when the grids differ.
    pub fn zip_map<W, U>(&self, other: &Loop<W>, mut f: impl FnMut(&V, &W) -> U) -> Loop<U> {
        assert_eq!(self.len(), other.len(), "loop grids differ");
        Loop { samples: self.samples.iter().zip(other.samples.iter()).map(|(a, b)| f(a, b)).collect() }
    }

    pub fn check_grid<W>(&self, other: &Loop<W>) -> Result<()> {
        if self.len() == other.len() {
            Ok(())
        } else {
            Err(Error::GridMismatch { left: self.len(), right: other.len() })
        }
    }
}

impl<V: Clone> Loop<V> {
    pub fn constant(n: usize, value: V) -> Result<Self> {
        check_sample_count(n)?;
        Ok(Self { samples: vec![value; n] })
    }
}

impl<V: Coefficient> Coefficient for Loop<V> {
    fn zero_like(&self) -> Self {
        self.map(|v| v.zero_like())
    }
    fn add_scaled(&mut self, other: &Self, s: f64) {
        assert_eq!(self.len(), other.len(), "loop grids differ");
        for (a, b) in self.samples.iter_mut().zip(other.samples.iter()) {
            a.add_scaled(b, s);
        }
    }
    fn magnitude(&self) -> f64 {
        self.samples.iter().map(|v| v.magnitude()).fold(0.0, f64::max)
    }
}

/// Values that can be moved through the discrete Fourier transform channel by channel.
pub trait SpectralValue: Clone {
    fn channel_count(&self) -> usize;
    fn write_channels(&self, out: &mut [Complex64]);
    /// Rebuilds a value of the same kind as `template` from transformed channel data.
    fn from_channels(template: &Self, data: &[Complex64]) -> Self;
}

impl SpectralValue for f64 {
    fn channel_count(&self) -> usize {
        1
    }
    fn write_channels(&self, out: &mut [Complex64]) {
        out[0] = Complex64::new(*self, 0.0);
    }
    fn from_channels(_: &Self, data: &[Complex64]) -> Self {
        data[0].re
    }
}

impl SpectralValue for CMatrix {
    fn channel_count(&self) -> usize {
        self.len()
    }
    fn write_channels(&self, out: &mut [Complex64]) {
        out.copy_from_slice(self.as_slice());
    }
    fn from_channels(template: &Self, data: &[Complex64]) -> Self {
        CMatrix::from_column_slice(template.nrows(), template.ncols(), data)
    }
}

impl SpectralValue for AlgebraElement {
    fn channel_count(&self) -> usize {
        self.matrix().len()
    }
    fn write_channels(&self, out: &mut [Complex64]) {
        out.copy_from_slice(self.matrix().as_slice());
    }
    fn from_channels(template: &Self, data: &[Complex64]) -> Self {
        let n = template.rank();
        AlgebraElement::project(&CMatrix::from_column_slice(n, n, data))
    }
}

impl SpectralValue for GroupElement {
    fn channel_count(&self) -> usize {
        self.matrix().len()
    }
    fn write_channels(&self, out: &mut [Complex64]) {
        out.copy_from_slice(self.matrix().as_slice());
    }
    fn from_channels(template: &Self, data: &[Complex64]) -> Self {
        let n = template.rank();
        GroupElement::project(&CMatrix::from_column_slice(n, n, data))
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plans(n: usize) -> (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>) {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        (p.plan_fft_forward(n), p.plan_fft_inverse(n))
    })
}

/// Signed frequency of DFT bin `k` on an `n`-point grid (the Nyquist bin reports +n/2).
fn frequency(k: usize, n: usize) -> i64 {
    if k <= n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// Forward transform of every channel: returns `spectra[channel][bin]`.
fn spectra<V: SpectralValue>(s: &Loop<V>) -> Vec<Vec<Complex64>> {
    let n = s.len();
    let c = s.samples[0].channel_count();
    let mut buf = vec![Complex64::new(0.0, 0.0); c];
    let mut out = vec![vec![Complex64::new(0.0, 0.0); n]; c];
    for (j, v) in s.samples.iter().enumerate() {
        v.write_channels(&mut buf);
        for ch in 0..c {
            out[ch][j] = buf[ch];
        }
    }
    let (fwd, _) = plans(n);
    for row in out.iter_mut() {
        fwd.process(row);
    }
    out
}

/// Inverse transform of length `m` from spectra, scaled by `1/norm`.
fn synthesize<V: SpectralValue>(template: &V, mut spec: Vec<Vec<Complex64>>, m: usize, norm: f64) -> Loop<V> {
    let (_, inv) = plans(m);
    for row in spec.iter_mut() {
        inv.process(row);
    }
    let c = spec.len();
    let scale = 1.0 / norm;
    let mut buf = vec![Complex64::new(0.0, 0.0); c];
    let samples = (0..m)
        .map(|j| {
            for ch in 0..c {
                buf[ch] = spec[ch][j] * scale;
            }
            V::from_channels(template, &buf)
        })
        .collect();
    Loop { samples }
}

fn spectral_multiply<V: SpectralValue>(s: &Loop<V>, multiplier: impl Fn(i64) -> Complex64) -> Loop<V> {
    let n = s.len();
    let mut spec = spectra(s);
    for row in spec.iter_mut() {
        for (k, x) in row.iter_mut().enumerate() {
            *x *= multiplier(frequency(k, n));
        }
    }
    synthesize(&s.samples[0], spec, n, n as f64)
}

/// Spectral derivative ∂ in the loop direction; the Nyquist mode is dropped.
pub fn loop_derivative<V: SpectralValue>(xi: &Loop<V>) -> Loop<V> {
    let half = (xi.len() / 2) as i64;
    spectral_multiply(xi, |f| if f == half { Complex64::new(0.0, 0.0) } else { Complex64::new(0.0, f as f64) })
}

/// The periodic rectangle rule (2π/N) Σ s_j.
pub fn circle_integral<V: Coefficient>(s: &Loop<V>) -> V {
    let mut acc = s.samples[0].zero_like();
    let w = 2.0 * PI / s.len() as f64;
    for v in &s.samples {
        acc.add_scaled(v, w);
    }
    acc
}

/// ρ_φ(s)(θ) = s(θ − φ): a cyclic shift for grid multiples, trigonometric interpolation otherwise.
pub fn rotate<V: SpectralValue>(phi: f64, s: &Loop<V>) -> Loop<V> {
    let n = s.len();
    let steps = phi * n as f64 / (2.0 * PI);
    let nearest = steps.round();
    if (steps - nearest).abs() < 1e-12 {
        let shift = (nearest as i64).rem_euclid(n as i64) as usize;
        let samples = (0..n).map(|j| s.samples[(j + n - shift) % n].clone()).collect();
        return Loop { samples };
    }
    let half = (n / 2) as i64;
    spectral_multiply(s, |f| {
        if f == half {
            Complex64::new((half as f64 * phi).cos(), 0.0)
        } else {
            Complex64::from_polar(1.0, -(f as f64) * phi)
        }
    })
}

/// Trigonometric interpolation of `s` onto a grid `factor` times finer.
pub fn refine<V: SpectralValue>(s: &Loop<V>, factor: usize) -> Loop<V> {
    let n = s.len();
    let m = n * factor;
    let spec = spectra(s);
    let zero = Complex64::new(0.0, 0.0);
    let fine: Vec<Vec<Complex64>> = spec
        .iter()
        .map(|row| {
            let mut out = vec![zero; m];
            for (k, &x) in row.iter().enumerate() {
                let f = frequency(k, n);
                if factor > 1 && f == (n / 2) as i64 {
                    // split the Nyquist mode evenly between ±N/2
                    out[n / 2] += x * 0.5;
                    out[m - n / 2] += x * 0.5;
                } else {
                    out[f.rem_euclid(m as i64) as usize] += x;
                }
            }
            out
        })
        .collect();
    synthesize(&s.samples[0], fine, m, n as f64)
}

impl Loop<AlgebraElement> {
    pub fn rank(&self) -> usize {
        self.samples[0].rank()
    }

    pub fn zero(n_samples: usize, rank: usize) -> Result<Self> {
        Self::constant(n_samples, AlgebraElement::zero(rank))
    }

    pub fn bracket(&self, other: &Self) -> Self {
        self.zip_map(other, |a, b| a.bracket(b))
    }

    pub fn killing(&self, other: &Self) -> Loop<f64> {
        self.zip_map(other, |a, b| a.killing(b))
    }

    /// ∫⟨ξ, ζ⟩dθ.
    pub fn integrated_killing(&self, other: &Self) -> f64 {
        circle_integral(&self.killing(other))
    }

    pub fn scale_by(&self, s: &Loop<f64>) -> Self {
        self.zip_map(s, |a, c| a.scale(*c))
    }

    pub fn exp(&self) -> Loop<GroupElement> {
        self.map(exponential)
    }
}

impl Loop<GroupElement> {
    pub fn rank(&self) -> usize {
        self.samples[0].rank()
    }

    pub fn identity(n_samples: usize, rank: usize) -> Result<Self> {
        Self::constant(n_samples, GroupElement::identity(rank))
    }

    pub fn inverse(&self) -> Self {
        self.map(|g| g.inverse())
    }

    pub fn product(&self, other: &Self) -> Self {
        self.zip_map(other, |a, b| a * b)
    }

    /// Pointwise Ad(γ)ξ.
    pub fn adjoint(&self, xi: &Loop<AlgebraElement>) -> Loop<AlgebraElement> {
        self.zip_map(xi, |g, x| g.adjoint(x))
    }

    /// Entrywise spectral derivative of the defining matrices.
    pub fn matrix_derivative(&self) -> Loop<CMatrix> {
        loop_derivative(&self.map(|g| g.matrix().clone()))
    }

    /// γ⁻¹∂γ.
    pub fn left_log_derivative(&self) -> Loop<AlgebraElement> {
        let d = self.matrix_derivative();
        self.zip_map(&d, |g, dg| AlgebraElement::project(&(g.matrix().adjoint() * dg)))
    }

    pub fn max_distance(&self, other: &Self) -> f64 {
        self.zip_map(other, |a, b| a.distance(b)).samples.into_iter().fold(0.0, f64::max)
    }
}

/// Z(γ) = (∂γ)γ⁻¹.
pub fn z_map(gamma: &Loop<GroupElement>) -> Loop<AlgebraElement> {
    let d = gamma.matrix_derivative();
    gamma.zip_map(&d, |g, dg| AlgebraElement::project(&(dg * g.matrix().adjoint())))
}

/// An element (ξ, x) of Lg ⋊ ℝ; the circle coordinate x stands for ix.
#[derive(Clone, Debug, PartialEq)]
pub struct SemiDirectAlgebraElement {
    pub loop_part: Loop<AlgebraElement>,
    pub circle_part: f64,
}

impl SemiDirectAlgebraElement {
    pub fn new(loop_part: Loop<AlgebraElement>, circle_part: f64) -> Self {
        Self { loop_part, circle_part }
    }
}

impl Coefficient for SemiDirectAlgebraElement {
    fn zero_like(&self) -> Self {
        Self { loop_part: self.loop_part.zero_like(), circle_part: 0.0 }
    }
    fn add_scaled(&mut self, other: &Self, s: f64) {
        self.loop_part.add_scaled(&other.loop_part, s);
        self.circle_part += s * other.circle_part;
    }
    fn magnitude(&self) -> f64 {
        self.loop_part.magnitude().max(self.circle_part.abs())
    }
}

/// An element (γ, φ) of LG ⋊ S¹ with product (γ₁, φ₁)(γ₂, φ₂) = (γ₁ρ_φ₁(γ₂), φ₁ + φ₂).
///
/// The angle is kept unreduced so that finite differences across 2π stay smooth; only
/// its value mod 2π is meaningful.
#[derive(Clone, Debug, PartialEq)]
pub struct SemiDirectGroupElement {
    pub loop_part: Loop<GroupElement>,
    pub angle: f64,
}

impl SemiDirectGroupElement {
    pub fn new(loop_part: Loop<GroupElement>, angle: f64) -> Self {
        Self { loop_part, angle }
    }

    pub fn identity(n_samples: usize, rank: usize) -> Result<Self> {
        Ok(Self { loop_part: Loop::<GroupElement>::identity(n_samples, rank)?, angle: 0.0 })
    }

    pub fn product(&self, other: &Self) -> Self {
        let rotated = rotate(self.angle, &other.loop_part);
        Self { loop_part: self.loop_part.product(&rotated), angle: self.angle + other.angle }
    }

    /// (γ, φ)⁻¹ = (ρ_φ⁻¹(γ⁻¹), −φ).
    pub fn inverse(&self) -> Self {
        Self { loop_part: rotate(-self.angle, &self.loop_part.inverse()), angle: -self.angle }
    }
}

pub fn semidirect_bracket(a: &SemiDirectAlgebraElement, b: &SemiDirectAlgebraElement) -> Result<SemiDirectAlgebraElement> {
    a.loop_part.check_grid(&b.loop_part)?;
    if a.loop_part.rank() != b.loop_part.rank() {
        return Err(Error::DimensionMismatch { left: a.loop_part.rank(), right: b.loop_part.rank() });
    }
    let mut loop_part = a.loop_part.bracket(&b.loop_part);
    if a.circle_part != 0.0 {
        loop_part.add_scaled(&loop_derivative(&b.loop_part), -a.circle_part);
    }
    if b.circle_part != 0.0 {
        loop_part.add_scaled(&loop_derivative(&a.loop_part), b.circle_part);
    }
    Ok(SemiDirectAlgebraElement { loop_part, circle_part: 0.0 })
}

/// ad(γ, φ)(ξ, x) = (Ad(γ)ρ_φ(ξ) + x·Z(γ), x).
pub fn semidirect_adjoint(g: &SemiDirectGroupElement, a: &SemiDirectAlgebraElement) -> Result<SemiDirectAlgebraElement> {
    g.loop_part.check_grid(&a.loop_part)?;
    if g.loop_part.rank() != a.loop_part.rank() {
        return Err(Error::DimensionMismatch { left: g.loop_part.rank(), right: a.loop_part.rank() });
    }
    let mut loop_part = g.loop_part.adjoint(&rotate(g.angle, &a.loop_part));
    if a.circle_part != 0.0 {
        loop_part.add_scaled(&z_map(&g.loop_part), a.circle_part);
    }
    Ok(SemiDirectAlgebraElement { loop_part, circle_part: a.circle_part })
}

/// ad(γ, φ)⁻¹(ξ, x) = (ρ_φ⁻¹(Ad(γ⁻¹)ξ − x·γ⁻¹∂γ), x).
pub fn semidirect_adjoint_inverse(g: &SemiDirectGroupElement, a: &SemiDirectAlgebraElement) -> Result<SemiDirectAlgebraElement> {
    g.loop_part.check_grid(&a.loop_part)?;
    let mut inner = g.loop_part.inverse().adjoint(&a.loop_part);
    if a.circle_part != 0.0 {
        inner.add_scaled(&g.loop_part.left_log_derivative(), -a.circle_part);
    }
    Ok(SemiDirectAlgebraElement { loop_part: rotate(-g.angle, &inner), circle_part: a.circle_part })
}
