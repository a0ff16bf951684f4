//! Alternating forms on finite-dimensional charts.
//!
//! A q-form is stored through its coefficients ω_I on strictly increasing index tuples I,
//! ω = Σ_I ω_I dx^I. Evaluation on vectors carries the 1/q! alternation convention:
//! ω(X₁,…,X_q) = (1/q!) Σ_I ω_I det[X_j^{i_k}], so that (dx¹∧dx²)(e₁,e₂) = ½ and, for 1-forms,
//! dω(X,Y) = ½(Xω(Y) − Yω(X) − ω([X,Y])). Wedge products and d act on coefficients in the
//! usual way; only evaluation sees the normalization.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::combinatorics::{binomial, factorial, increasing_tuples, signed_permutations, sort_with_sign, tuple_rank};
pub use crate::coefficient::Coefficient;
use crate::error::{Error, Result};
use crate::liecore::AlgebraElement;
use crate::loopspace::{circle_integral, loop_derivative, Loop, SpectralValue};

/// A point of a chart.
pub type ChartPoint = [f64];

/// Lie-algebra-like coefficients: a bracket and a Killing-type pairing.
pub trait LieCoefficient: Coefficient {
    type Pairing: Coefficient;
    fn lie_bracket(&self, other: &Self) -> Self;
    fn pairing(&self, other: &Self) -> Self::Pairing;
}

impl LieCoefficient for AlgebraElement {
    type Pairing = f64;
    fn lie_bracket(&self, other: &Self) -> Self {
        self.bracket(other)
    }
    fn pairing(&self, other: &Self) -> f64 {
        self.killing(other)
    }
}

impl LieCoefficient for Loop<AlgebraElement> {
    type Pairing = Loop<f64>;
    fn lie_bracket(&self, other: &Self) -> Self {
        self.bracket(other)
    }
    fn pairing(&self, other: &Self) -> Loop<f64> {
        self.killing(other)
    }
}

/// The value of a form at a single point.
#[derive(Clone, Debug, PartialEq)]
pub struct FormValue<V> {
    dim: usize,
    degree: usize,
    components: Vec<V>,
}

impl<V> FormValue<V> {
    pub fn from_components(dim: usize, degree: usize, components: Vec<V>) -> Result<Self> {
        let expected = binomial(dim, degree);
        if components.len() != expected {
            return Err(Error::Arity { expected, found: components.len() });
        }
        Ok(Self { dim, degree, components })
    }

    /// Builds the value from a function of each increasing index tuple.
    pub fn from_fn(dim: usize, degree: usize, mut f: impl FnMut(&[usize]) -> V) -> Self {
        let components = increasing_tuples(dim, degree).iter().map(|t| f(t)).collect();
        Self { dim, degree, components }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn components(&self) -> &[V] {
        &self.components
    }

    /// Coefficient on a strictly increasing tuple.
    pub fn component(&self, tuple: &[usize]) -> &V {
        &self.components[tuple_rank(self.dim, tuple)]
    }

    pub fn component_mut(&mut self, tuple: &[usize]) -> &mut V {
        let r = tuple_rank(self.dim, tuple);
        &mut self.components[r]
    }

    pub fn map<W>(&self, f: impl FnMut(&V) -> W) -> FormValue<W> {
        FormValue { dim: self.dim, degree: self.degree, components: self.components.iter().map(f).collect() }
    }

    pub fn zip_map<W, U>(&self, other: &FormValue<W>, mut f: impl FnMut(&V, &W) -> U) -> FormValue<U> {
        assert_eq!((self.dim, self.degree), (other.dim, other.degree), "form shapes differ");
        FormValue {
            dim: self.dim,
            degree: self.degree,
            components: self.components.iter().zip(&other.components).map(|(a, b)| f(a, b)).collect(),
        }
    }
}

impl<V: Coefficient> FormValue<V> {
    /// Signed coefficient on an arbitrary index tuple (zero when an index repeats).
    pub fn signed_component(&self, indices: &[usize]) -> Option<V> {
        let (sorted, sign) = sort_with_sign(indices)?;
        Some(self.component(&sorted).scaled(sign))
    }

    /// ω(X₁,…,X_q) with the 1/q! convention.
    pub fn evaluate(&self, vectors: &[Vec<f64>]) -> Result<V> {
        if vectors.len() != self.degree {
            return Err(Error::Arity { expected: self.degree, found: vectors.len() });
        }
        for v in vectors {
            if v.len() != self.dim {
                return Err(Error::DimensionMismatch { left: self.dim, right: v.len() });
            }
        }
        if self.degree == 0 {
            return Ok(self.components[0].clone());
        }
        let q = self.degree;
        let tuples = increasing_tuples(self.dim, q);
        let mut acc = self.components[0].zero_like();
        for (t, c) in tuples.iter().zip(&self.components) {
            let m = DMatrix::from_fn(q, q, |r, s| vectors[s][t[r]]);
            acc.add_scaled(c, m.determinant());
        }
        Ok(acc.scaled(1.0 / factorial(q)))
    }

    /// Exterior product with coefficients combined by `product`.
    pub fn wedge_with<W, U: Coefficient>(&self, other: &FormValue<W>, product: impl Fn(&V, &W) -> U) -> FormValue<U> {
        assert_eq!(self.dim, other.dim, "chart dimensions differ");
        let dim = self.dim;
        let degree = self.degree + other.degree;
        let mut slots: Vec<Option<U>> = vec![None; binomial(dim, degree)];
        let left = increasing_tuples(dim, self.degree);
        let right = increasing_tuples(dim, other.degree);
        for (i, a) in left.iter().zip(&self.components) {
            for (j, b) in right.iter().zip(&other.components) {
                let mut joined = i.clone();
                joined.extend_from_slice(j);
                if let Some((sorted, sign)) = sort_with_sign(&joined) {
                    let value = product(a, b);
                    let slot = &mut slots[tuple_rank(dim, &sorted)];
                    match slot {
                        Some(acc) => acc.add_scaled(&value, sign),
                        None => *slot = Some(value.scaled(sign)),
                    }
                }
            }
        }
        FormValue { dim, degree, components: slots.into_iter().map(|s| s.expect("every tuple has a split")).collect() }
    }

    /// f(φ₁ ∧ ⋯ ∧ φ_k) for a k-multilinear `f` applied to the coefficients.
    pub fn multilinear<U: Coefficient>(forms: &[&FormValue<V>], f: impl Fn(&[&V]) -> U) -> FormValue<U> {
        let dim = forms[0].dim;
        let degree: usize = forms.iter().map(|p| p.degree).sum();
        let tuples: Vec<Vec<Vec<usize>>> = forms.iter().map(|p| increasing_tuples(dim, p.degree)).collect();
        let mut slots: Vec<Option<U>> = vec![None; binomial(dim, degree)];
        let mut chosen: Vec<usize> = Vec::with_capacity(forms.len());
        let mut used = vec![false; dim];
        fn recurse<V: Coefficient, U: Coefficient>(
            level: usize,
            forms: &[&FormValue<V>],
            tuples: &[Vec<Vec<usize>>],
            chosen: &mut Vec<usize>,
            used: &mut Vec<bool>,
            slots: &mut Vec<Option<U>>,
            f: &dyn Fn(&[&V]) -> U,
        ) {
            if level == forms.len() {
                let mut joined = Vec::new();
                for (l, &c) in chosen.iter().enumerate() {
                    joined.extend_from_slice(&tuples[l][c]);
                }
                let (sorted, sign) = sort_with_sign(&joined).expect("disjoint by construction");
                let args: Vec<&V> = chosen.iter().enumerate().map(|(l, &c)| &forms[l].components[c]).collect();
                let value = f(&args);
                let dim = forms[0].dim;
                let slot = &mut slots[tuple_rank(dim, &sorted)];
                match slot {
                    Some(acc) => acc.add_scaled(&value, sign),
                    None => *slot = Some(value.scaled(sign)),
                }
                return;
            }
            for (c, t) in tuples[level].iter().enumerate() {
                if t.iter().any(|&i| used[i]) {
                    continue;
                }
                for &i in t {
                    used[i] = true;
                }
                chosen.push(c);
                recurse(level + 1, forms, tuples, chosen, used, slots, f);
                chosen.pop();
                for &i in t {
                    used[i] = false;
                }
            }
        }
        recurse(0, forms, &tuples, &mut chosen, &mut used, &mut slots, &f);
        FormValue { dim, degree, components: slots.into_iter().map(|s| s.expect("every tuple has a split")).collect() }
    }

    /// Restriction to the coordinate subspace spanned by `coords` (the pullback along the
    /// inclusion), re-indexed in the order given.
    pub fn restrict(&self, coords: &[usize]) -> FormValue<V> {
        FormValue::from_fn(coords.len(), self.degree, |t| {
            let lifted: Vec<usize> = t.iter().map(|&i| coords[i]).collect();
            self.signed_component(&lifted).expect("distinct coordinates")
        })
    }
}

impl<V: LieCoefficient> FormValue<V> {
    /// Graded bracket [φ, ψ] = Σ [φ_I, ψ_J] dx^I ∧ dx^J.
    pub fn wedge_bracket(&self, other: &Self) -> Self {
        self.wedge_with(other, |a, b| a.lie_bracket(b))
    }

    /// Killing-paired wedge ⟨φ ∧ ψ⟩.
    pub fn wedge_pair(&self, other: &Self) -> FormValue<V::Pairing> {
        self.wedge_with(other, |a, b| a.pairing(b))
    }
}

impl<V: Coefficient> Coefficient for FormValue<V> {
    fn zero_like(&self) -> Self {
        self.map(|v| v.zero_like())
    }
    fn add_scaled(&mut self, other: &Self, s: f64) {
        assert_eq!((self.dim, self.degree), (other.dim, other.degree), "form shapes differ");
        for (a, b) in self.components.iter_mut().zip(&other.components) {
            a.add_scaled(b, s);
        }
    }
    fn magnitude(&self) -> f64 {
        self.components.iter().map(|c| c.magnitude()).fold(0.0, f64::max)
    }
}

type Coefficients<V> = Arc<dyn Fn(&ChartPoint) -> FormValue<V> + Send + Sync>;

/// A form field: a closure returning every coefficient at a point.
#[derive(Clone)]
pub struct FormField<V> {
    dim: usize,
    degree: usize,
    coefficients: Coefficients<V>,
}

impl<V: Coefficient> FormField<V> {
    pub fn new(dim: usize, degree: usize, f: impl Fn(&ChartPoint) -> FormValue<V> + Send + Sync + 'static) -> Self {
        Self { dim, degree, coefficients: Arc::new(f) }
    }

    /// A form whose value at every point is `value`.
    pub fn constant(value: FormValue<V>) -> Self {
        let (dim, degree) = (value.dim, value.degree);
        Self::new(dim, degree, move |_| value.clone())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn at(&self, p: &ChartPoint) -> FormValue<V> {
        (self.coefficients)(p)
    }

    pub fn coefficient(&self, p: &ChartPoint, tuple: &[usize]) -> V {
        self.at(p).component(tuple).clone()
    }

    pub fn map<W: Coefficient>(&self, f: impl Fn(&V) -> W + Send + Sync + 'static) -> FormField<W> {
        let inner = self.clone();
        FormField::new(self.dim, self.degree, move |p| inner.at(p).map(&f))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let (a, b) = (self.clone(), other.clone());
        Ok(Self::new(self.dim, self.degree, move |p| {
            let mut v = a.at(p);
            v.add_scaled(&b.at(p), 1.0);
            v
        }))
    }

    pub fn scaled(&self, s: f64) -> Self {
        let a = self.clone();
        Self::new(self.dim, self.degree, move |p| a.at(p).scaled(s))
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: other.dim });
        }
        if self.degree != other.degree {
            return Err(Error::Degree(format!("degrees {} and {} differ", self.degree, other.degree)));
        }
        Ok(())
    }
}

/// ω(X₁,…,X_q) at `p`.
pub fn evaluate<V: Coefficient>(omega: &FormField<V>, p: &ChartPoint, vectors: &[Vec<f64>]) -> Result<V> {
    if p.len() != omega.dim {
        return Err(Error::DimensionMismatch { left: omega.dim, right: p.len() });
    }
    omega.at(p).evaluate(vectors)
}

/// Finite-difference scheme for partial derivatives of coefficient closures.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Differentiation {
    pub step: f64,
    /// Combine central differences at h and h/2 into a fourth-order estimate.
    pub richardson: bool,
}

impl Default for Differentiation {
    fn default() -> Self {
        Self { step: 1e-4, richardson: false }
    }
}

impl Differentiation {
    pub fn central(step: f64) -> Self {
        Self { step, richardson: false }
    }

    pub fn extrapolated(step: f64) -> Self {
        Self { step, richardson: true }
    }

    pub fn validate(&self) -> Result<()> {
        if self.step > 0.0 && self.step.is_finite() {
            Ok(())
        } else {
            Err(Error::Step(self.step))
        }
    }

    /// d/dt g(t) at t = 0.
    pub fn derivative<T: Coefficient>(&self, mut g: impl FnMut(f64) -> T) -> T {
        let mut central = |h: f64| {
            let mut d = g(h);
            d.add_scaled(&g(-h), -1.0);
            d.scaled(0.5 / h)
        };
        if self.richardson {
            let coarse = central(self.step);
            let mut fine = central(0.5 * self.step).scaled(4.0 / 3.0);
            fine.add_scaled(&coarse, -1.0 / 3.0);
            fine
        } else {
            central(self.step)
        }
    }

    /// ∂ω/∂x^i at p.
    pub fn partial<V: Coefficient>(&self, omega: &FormField<V>, p: &ChartPoint, i: usize) -> FormValue<V> {
        let mut shifted = p.to_vec();
        self.derivative(|t| {
            shifted[i] = p[i] + t;
            omega.at(&shifted)
        })
    }
}

/// dω_K = Σ_m (−1)^m ∂_{K_m} ω_{K∖K_m}, from the partial derivatives of every coefficient.
fn assemble_exterior_derivative<V: Coefficient>(dim: usize, degree: usize, partials: &[FormValue<V>]) -> FormValue<V> {
    FormValue::from_fn(dim, degree + 1, |k| {
        let mut acc: Option<V> = None;
        for m in 0..k.len() {
            let rest: Vec<usize> = k.iter().enumerate().filter(|&(j, _)| j != m).map(|(_, &v)| v).collect();
            let term = partials[k[m]].component(&rest);
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            match acc.as_mut() {
                Some(a) => a.add_scaled(term, sign),
                None => acc = Some(term.scaled(sign)),
            }
        }
        acc.expect("non-empty tuple")
    })
}

/// Exterior derivative by central differences with the given step.
pub fn exterior_derivative<V: Coefficient>(omega: &FormField<V>, step: f64) -> Result<FormField<V>> {
    exterior_derivative_with(omega, Differentiation::central(step))
}

pub fn exterior_derivative_with<V: Coefficient>(omega: &FormField<V>, scheme: Differentiation) -> Result<FormField<V>> {
    scheme.validate()?;
    let inner = omega.clone();
    let (dim, degree) = (omega.dim, omega.degree);
    Ok(FormField::new(dim, degree + 1, move |p| {
        let partials: Vec<FormValue<V>> = (0..dim).map(|i| scheme.partial(&inner, p, i)).collect();
        assemble_exterior_derivative(dim, degree, &partials)
    }))
}

/// Exterior derivative of a loop-valued form whose coordinate `theta_index` is the loop
/// parameter: that partial is the spectral loop derivative, the others finite differences.
pub fn exterior_derivative_periodic<V>(omega: &FormField<Loop<V>>, scheme: Differentiation, theta_index: usize) -> Result<FormField<Loop<V>>>
where
    V: Coefficient + SpectralValue,
{
    scheme.validate()?;
    if theta_index >= omega.dim {
        return Err(Error::Coordinate { index: theta_index, dim: omega.dim });
    }
    let inner = omega.clone();
    let (dim, degree) = (omega.dim, omega.degree);
    Ok(FormField::new(dim, degree + 1, move |p| {
        let partials: Vec<FormValue<Loop<V>>> = (0..dim)
            .map(|i| if i == theta_index { inner.at(p).map(loop_derivative) } else { scheme.partial(&inner, p, i) })
            .collect();
        assemble_exterior_derivative(dim, degree, &partials)
    }))
}

fn check_chart<A, B>(a: &FormField<A>, b: &FormField<B>) -> Result<()> {
    if a.dim == b.dim {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { left: a.dim, right: b.dim })
    }
}

pub fn wedge_bracket<V: LieCoefficient>(a: &FormField<V>, b: &FormField<V>) -> Result<FormField<V>> {
    check_chart(a, b)?;
    let (a, b) = (a.clone(), b.clone());
    Ok(FormField::new(a.dim, a.degree + b.degree, move |p| a.at(p).wedge_bracket(&b.at(p))))
}

/// ⟨A ∧ B⟩ with the pointwise Killing pairing; loop-valued inputs give loop-valued output,
/// to be integrated over the circle by the caller.
pub fn wedge_pair<V: LieCoefficient>(a: &FormField<V>, b: &FormField<V>) -> Result<FormField<V::Pairing>> {
    check_chart(a, b)?;
    let (a, b) = (a.clone(), b.clone());
    Ok(FormField::new(a.dim, a.degree + b.degree, move |p| a.at(p).wedge_pair(&b.at(p))))
}

/// Componentwise ∫_{S¹} of a loop-valued form.
pub fn integrate_over_circle<V: Coefficient>(omega: &FormField<Loop<V>>) -> FormField<V> {
    let inner = omega.clone();
    FormField::new(omega.dim, omega.degree, move |p| inner.at(p).map(circle_integral))
}

/// Fiber integration over the circle coordinate `theta_index` of a form whose coefficients
/// are sampled on the loop grid in that coordinate (the coordinate value passed to the
/// closure is ignored). Writing ω = β + γ∧dθ, returns ∫ γ dθ on the reduced chart.
pub fn fiber_integrate_s1<V: Coefficient>(omega: &FormField<Loop<V>>, theta_index: usize) -> Result<FormField<V>> {
    if theta_index >= omega.dim {
        return Err(Error::Coordinate { index: theta_index, dim: omega.dim });
    }
    if omega.degree == 0 {
        return Err(Error::Degree("fiber integration needs degree ≥ 1".into()));
    }
    let inner = omega.clone();
    Ok(FormField::new(omega.dim - 1, omega.degree - 1, move |x| {
        let mut full = x.to_vec();
        full.insert(theta_index, 0.0);
        fiber_integrate_value(&inner.at(&full), theta_index)
    }))
}

/// Pointwise fiber integration of a single form value; see [`fiber_integrate_s1`].
pub fn fiber_integrate_value<V: Coefficient>(value: &FormValue<Loop<V>>, theta_index: usize) -> FormValue<V> {
    let (dim, degree) = (value.dim, value.degree);
    assert!(theta_index < dim && degree > 0, "no circle direction to integrate");
    FormValue::from_fn(dim - 1, degree - 1, |j| {
        let mut k: Vec<usize> = j.iter().map(|&i| if i >= theta_index { i + 1 } else { i }).collect();
        // k lists dx^J ∧ dθ; signed_component sorts it
        k.push(theta_index);
        circle_integral(&value.signed_component(&k).expect("distinct indices"))
    })
}

/// Fiber integration of a scalar form whose θ coordinate is an ordinary chart coordinate,
/// sampled on an `n_samples` grid.
pub fn fiber_integrate_s1_sampled(omega: &FormField<f64>, theta_index: usize, n_samples: usize) -> Result<FormField<f64>> {
    Loop::<f64>::from_fn(n_samples, |_| 0.0)?;
    let inner = omega.clone();
    let looped = FormField::new(omega.dim, omega.degree, move |p| {
        let values: Vec<FormValue<f64>> = (0..n_samples)
            .map(|j| {
                let mut q = p.to_vec();
                q[theta_index] = crate::loopspace::grid_angle(j, n_samples);
                inner.at(&q)
            })
            .collect();
        let template = &values[0];
        FormValue::from_fn(template.dim(), template.degree(), |t| {
            let r = tuple_rank(template.dim(), t);
            Loop::new(values.iter().map(|v| v.components()[r]).collect()).expect("validated grid")
        })
    });
    fiber_integrate_s1(&looped, theta_index)
}

/// Smooth chart map with an optional exact Jacobian (rows: target coordinates).
#[derive(Clone)]
pub struct ChartMap {
    pub source_dim: usize,
    pub target_dim: usize,
    pub map: Arc<dyn Fn(&ChartPoint) -> Vec<f64> + Send + Sync>,
    pub jacobian: Option<Arc<dyn Fn(&ChartPoint) -> DMatrix<f64> + Send + Sync>>,
}

impl ChartMap {
    pub fn new(source_dim: usize, target_dim: usize, map: impl Fn(&ChartPoint) -> Vec<f64> + Send + Sync + 'static) -> Self {
        Self { source_dim, target_dim, map: Arc::new(map), jacobian: None }
    }

    pub fn with_jacobian(mut self, jacobian: impl Fn(&ChartPoint) -> DMatrix<f64> + Send + Sync + 'static) -> Self {
        self.jacobian = Some(Arc::new(jacobian));
        self
    }

    fn jacobian_at(&self, p: &ChartPoint, scheme: Differentiation) -> DMatrix<f64> {
        if let Some(j) = &self.jacobian {
            return j(p);
        }
        let mut jac = DMatrix::zeros(self.target_dim, self.source_dim);
        for c in 0..self.source_dim {
            let mut q = p.to_vec();
            let col = scheme.derivative(|t| {
                q[c] = p[c] + t;
                FormValue { dim: self.target_dim, degree: 1, components: (self.map)(&q) }
            });
            for r in 0..self.target_dim {
                jac[(r, c)] = col.components[r];
            }
        }
        jac
    }
}

/// (φ*ω)_J(p) = Σ_I ω_I(φ(p)) det(∂φ^I/∂x^J).
pub fn pullback<V: Coefficient>(omega: &FormField<V>, map: &ChartMap, scheme: Differentiation) -> Result<FormField<V>> {
    if map.target_dim != omega.dim {
        return Err(Error::DimensionMismatch { left: omega.dim, right: map.target_dim });
    }
    scheme.validate()?;
    let inner = omega.clone();
    let map = map.clone();
    let q = omega.degree;
    Ok(FormField::new(map.source_dim, q, move |p| {
        let value = inner.at(&(map.map)(p));
        let jac = map.jacobian_at(p, scheme);
        let targets = increasing_tuples(map.target_dim, q);
        FormValue::from_fn(map.source_dim, q, |j| {
            let mut acc: Option<V> = None;
            for (i, c) in targets.iter().zip(value.components()) {
                let det = if q == 0 { 1.0 } else { DMatrix::from_fn(q, q, |r, s| jac[(i[r], j[s])]).determinant() };
                match acc.as_mut() {
                    Some(a) => a.add_scaled(c, det),
                    None => acc = Some(c.scaled(det)),
                }
            }
            acc.expect("non-empty target tuples")
        })
    }))
}

/// Value of f(φ₁ ∧ ⋯ ∧ φ_k) on a frame X₁,…,X_Q, for forms known only through their
/// contractions: `contract(blocks)` receives, for each factor, the frame indices it is fed.
/// The contractions are values in the 1/q! convention of [`FormValue::evaluate`], and so is
/// the result: (1/Q!) Σ_σ sgn(σ) f(φ₁(X_σ(block 1)), …).
pub fn alternate_on_frame(degrees: &[usize], contract: impl Fn(&[&[usize]]) -> f64) -> f64 {
    let total: usize = degrees.iter().sum();
    let weight = 1.0 / factorial(total);
    let mut acc = 0.0;
    for (perm, sign) in signed_permutations(total) {
        let mut blocks: Vec<&[usize]> = Vec::with_capacity(degrees.len());
        let mut start = 0;
        for &q in degrees {
            blocks.push(&perm[start..start + q]);
            start += q;
        }
        acc += sign * contract(&blocks);
    }
    weight * acc
}
