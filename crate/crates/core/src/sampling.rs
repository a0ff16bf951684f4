//! Seeded generation of band-limited test data. Every draw comes from one ChaCha8 stream, in
//! the order the calls are made, so a seed replays a whole run.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::connections::{LGConnectionData, LGxS1ConnectionData, LoopAlgebra, LoopForm, LoopGauge, SemiDirectGauge};
use crate::error::Result;
use crate::formscalc::{ChartPoint, FormField, FormValue};
use crate::liecore::{exponential, AlgebraElement, GroupElement};
use crate::loopspace::{Loop, SemiDirectGroupElement};

#[derive(Clone, Debug)]
struct Wave {
    amplitude: f64,
    wavevector: Vec<f64>,
    phase: f64,
}

impl Wave {
    fn value(&self, x: &ChartPoint, theta: f64, mode: usize) -> f64 {
        let dot: f64 = self.wavevector.iter().zip(x).map(|(w, x)| w * x).sum();
        self.amplitude * (dot + mode as f64 * theta + self.phase).cos()
    }
}

/// ξ(x)(θ) = Σ_a Σ_{m ≤ modes} c cos(w·x + mθ + φ) e_a with seeded c, w, φ.
#[derive(Clone, Debug)]
pub struct SmoothLoopField {
    basis: Vec<AlgebraElement>,
    /// waves[a][m]
    waves: Vec<Vec<Wave>>,
    n_samples: usize,
}

impl SmoothLoopField {
    pub fn evaluate(&self, x: &ChartPoint) -> LoopAlgebra {
        let rank = self.basis[0].rank();
        Loop::from_fn(self.n_samples, |theta| {
            let mut out = AlgebraElement::zero(rank);
            for (e, waves) in self.basis.iter().zip(&self.waves) {
                let c: f64 = waves.iter().enumerate().map(|(m, w)| w.value(x, theta, m)).sum();
                out.axpy(c, e);
            }
            out
        })
        .expect("sample count validated on construction")
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }
}

/// A real function c cos(w·x + φ) summed over a few waves.
#[derive(Clone, Debug)]
pub struct SmoothScalarField {
    waves: Vec<Wave>,
}

impl SmoothScalarField {
    pub fn evaluate(&self, x: &ChartPoint) -> f64 {
        self.waves.iter().map(|w| w.value(x, 0.0, 0)).sum()
    }
}

/// Shape of generated loop data.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LoopShape {
    pub n_samples: usize,
    pub rank: usize,
    /// Highest Fourier mode in θ.
    pub modes: usize,
    pub scale: f64,
}

impl LoopShape {
    pub fn new(n_samples: usize, rank: usize, modes: usize, scale: f64) -> Result<Self> {
        Loop::<f64>::from_fn(n_samples, |_| 0.0)?;
        if rank < 2 {
            return Err(crate::Error::Parameter(format!("group rank must be at least 2, got {rank}")));
        }
        Ok(Self { n_samples, rank, modes, scale })
    }
}

/// The seeded generator behind every random input.
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn uniform(&mut self, low: f64, high: f64) -> f64 {
        self.rng.random_range(low..high)
    }

    pub fn point(&mut self, dim: usize, radius: f64) -> Vec<f64> {
        (0..dim).map(|_| self.uniform(-radius, radius)).collect()
    }

    /// Gaussian coordinates in the standard basis, times `scale`.
    pub fn algebra_element(&mut self, rank: usize, scale: f64) -> AlgebraElement {
        let basis = AlgebraElement::basis(rank);
        let coefficients: Vec<f64> = basis.iter().map(|_| scale * self.normal()).collect();
        AlgebraElement::combination(&basis, &coefficients)
    }

    pub fn group_element(&mut self, rank: usize, scale: f64) -> GroupElement {
        exponential(&self.algebra_element(rank, scale))
    }

    fn wave(&mut self, dim: usize, scale: f64) -> Wave {
        Wave {
            amplitude: scale * self.normal(),
            wavevector: (0..dim).map(|_| self.normal()).collect(),
            phase: self.uniform(0.0, std::f64::consts::TAU),
        }
    }

    pub fn loop_field(&mut self, dim: usize, shape: LoopShape) -> SmoothLoopField {
        let basis = AlgebraElement::basis(shape.rank);
        let waves = basis
            .iter()
            .map(|_| {
                (0..=shape.modes)
                    .map(|m| self.wave(dim, shape.scale / (1.0 + m as f64)))
                    .collect()
            })
            .collect();
        SmoothLoopField { basis, waves, n_samples: shape.n_samples }
    }

    pub fn scalar_field(&mut self, dim: usize, waves: usize, scale: f64) -> SmoothScalarField {
        SmoothScalarField { waves: (0..waves).map(|_| self.wave(dim, scale)).collect() }
    }

    /// A single band-limited loop in the Lie algebra.
    pub fn algebra_loop(&mut self, shape: LoopShape) -> LoopAlgebra {
        self.loop_field(0, shape).evaluate(&[])
    }

    /// exp of a band-limited algebra loop.
    pub fn group_loop(&mut self, shape: LoopShape) -> Loop<GroupElement> {
        self.algebra_loop(shape).exp()
    }

    /// exp(ξ − ξ(0)), which is the identity at θ = 0.
    pub fn based_group_loop(&mut self, shape: LoopShape) -> Loop<GroupElement> {
        let xi = self.algebra_loop(shape);
        let start = xi.samples()[0].clone();
        xi.map(|x| x - &start).exp()
    }

    pub fn semidirect_element(&mut self, shape: LoopShape) -> SemiDirectGroupElement {
        let loop_part = self.group_loop(shape);
        let angle = self.uniform(-std::f64::consts::PI, std::f64::consts::PI);
        SemiDirectGroupElement::new(loop_part, angle)
    }

    /// A 1-form Σ_i A_i(x) dx^i with band-limited loop coefficients.
    pub fn loop_one_form(&mut self, dim: usize, shape: LoopShape) -> LoopForm {
        let fields: Vec<SmoothLoopField> = (0..dim).map(|_| self.loop_field(dim, shape)).collect();
        FormField::new(dim, 1, move |x| FormValue::from_fn(dim, 1, |t| fields[t[0]].evaluate(x)))
    }

    pub fn loop_zero_form(&mut self, dim: usize, shape: LoopShape) -> LoopForm {
        let field = self.loop_field(dim, shape);
        FormField::new(dim, 0, move |x| FormValue::from_fn(dim, 0, |_| field.evaluate(x)))
    }

    pub fn scalar_one_form(&mut self, dim: usize, scale: f64) -> FormField<f64> {
        let fields: Vec<SmoothScalarField> = (0..dim).map(|_| self.scalar_field(dim, 3, scale)).collect();
        FormField::new(dim, 1, move |x| FormValue::from_fn(dim, 1, |t| fields[t[0]].evaluate(x)))
    }

    pub fn lg_connection(&mut self, dim: usize, shape: LoopShape) -> LGConnectionData {
        let connection = self.loop_one_form(dim, shape);
        let higgs = self.loop_zero_form(dim, shape);
        LGConnectionData::new(connection, higgs).expect("degrees fixed by construction")
    }

    pub fn lgxs1_connection(&mut self, dim: usize, shape: LoopShape) -> LGxS1ConnectionData {
        let connection = self.loop_one_form(dim, shape);
        let circle = self.scalar_one_form(dim, shape.scale);
        let higgs = self.loop_zero_form(dim, shape);
        LGxS1ConnectionData::new(connection, circle, higgs).expect("degrees fixed by construction")
    }

    /// σ(x) = exp(S(x)) for a band-limited field S.
    pub fn loop_gauge(&mut self, dim: usize, shape: LoopShape) -> LoopGauge {
        let field = self.loop_field(dim, shape);
        Arc::new(move |x: &ChartPoint| field.evaluate(x).exp())
    }

    /// (exp S(x), φ(x)).
    pub fn semidirect_gauge(&mut self, dim: usize, shape: LoopShape) -> SemiDirectGauge {
        let field = self.loop_field(dim, shape);
        let angle = self.scalar_field(dim, 2, 1.0);
        Arc::new(move |x: &ChartPoint| SemiDirectGroupElement::new(field.evaluate(x).exp(), angle.evaluate(x)))
    }
}
