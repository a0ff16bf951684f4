//! Geometry of the path fibration PG → G, p ↦ p(2π): its connection, curvature, Higgs field
//! and Higgs-field holonomy, the comparison of its string form with the generator of H³(G),
//! and the transgression coefficients.
//!
//! PG is infinite dimensional, so forms on it are only ever contracted with tangent data
//! supplied by the caller.

use std::f64::consts::PI;

use nalgebra::linalg::Schur;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::coefficient::Coefficient;
use crate::error::{Error, Result};
use crate::formscalc::alternate_on_frame;
use crate::liecore::{exponential, AlgebraElement, CMatrix, GroupElement, InvariantPolynomial};
use crate::loopspace::{circle_integral, grid_angle, loop_derivative, refine, Loop};

/// Integration steps of the holonomy ODE per loop sample.
const HOLONOMY_REFINEMENT: usize = 8;
/// Quadrature panels per loop-grid interval when integrating the cutoff bump.
const CUTOFF_PANELS: usize = 32;

/// A path p with p(0) = 1 and periodic p⁻¹∂p, sampled on the loop grid, with its endpoint
/// p(2π) carried separately.
#[derive(Clone, Debug, PartialEq)]
pub struct PathPoint {
    pub path: Loop<GroupElement>,
    pub endpoint: GroupElement,
}

impl PathPoint {
    /// The path with Higgs field ξ, i.e. the solution of p⁻¹∂p = ξ, p(0) = 1.
    pub fn from_higgs(xi: &Loop<AlgebraElement>) -> Self {
        let (path, endpoint) = higgs_holonomy(xi);
        Self { path, endpoint }
    }

    pub fn identity(n_samples: usize, rank: usize) -> Result<Self> {
        Ok(Self { path: Loop::<GroupElement>::identity(n_samples, rank)?, endpoint: GroupElement::identity(rank) })
    }

    pub fn len(&self) -> usize {
        self.path.len()
    }

    pub fn is_empty(&self) -> bool {
        self.path.is_empty()
    }
}

/// A tangent vector X at a path p, stored right-translated: `right` = X p⁻¹ on the grid and
/// `endpoint` = X(2π)p(2π)⁻¹.
#[derive(Clone, Debug, PartialEq)]
pub struct PathTangent {
    pub right: Loop<AlgebraElement>,
    pub endpoint: AlgebraElement,
}

impl PathTangent {
    /// The fundamental vector p·ξ of a based loop ξ (ξ(0) = 0).
    pub fn fundamental(p: &PathPoint, xi: &Loop<AlgebraElement>) -> Self {
        let right = p.path.adjoint(xi);
        Self { right, endpoint: AlgebraElement::zero(p.endpoint.rank()) }
    }

    /// The horizontal lift hX = α·V·p of an endpoint direction V.
    pub fn horizontal(endpoint: &AlgebraElement, cutoff: &CutoffFunction) -> Self {
        let right = cutoff.values().map(|a| endpoint.scale(*a));
        Self { right, endpoint: endpoint.clone() }
    }
}

/// The cutoff α(θ) = ∫₀^θ b / ∫₀^{2π} b with b(t) = exp(−s/(t(2π − t))).
#[derive(Clone, Debug, PartialEq)]
pub struct CutoffFunction {
    sharpness: f64,
    normalizer: f64,
    values: Loop<f64>,
    derivative: Loop<f64>,
}

fn bump(sharpness: f64, t: f64) -> f64 {
    if t <= 0.0 || t >= 2.0 * PI {
        0.0
    } else {
        (-sharpness / (t * (2.0 * PI - t))).exp()
    }
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let panels = panels + panels % 2;
    let h = (b - a) / panels as f64;
    let mut acc = f(a) + f(b);
    for i in 1..panels {
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// The standard cutoff with sharpness 1.
pub fn default_cutoff(n_samples: usize) -> Result<CutoffFunction> {
    CutoffFunction::with_sharpness(n_samples, 1.0)
}

impl CutoffFunction {
    pub fn with_sharpness(n_samples: usize, sharpness: f64) -> Result<Self> {
        if !(sharpness > 0.0 && sharpness.is_finite()) {
            return Err(Error::Parameter(format!("cutoff sharpness must be positive, got {sharpness}")));
        }
        let b = |t: f64| bump(sharpness, t);
        let mut cumulative = Vec::with_capacity(n_samples);
        let mut running = 0.0;
        for j in 0..n_samples {
            cumulative.push(running);
            running += simpson(b, grid_angle(j, n_samples), grid_angle(j + 1, n_samples), CUTOFF_PANELS);
        }
        let normalizer = running;
        let values = Loop::new(cumulative.into_iter().map(|c| c / normalizer).collect())?;
        let derivative = Loop::from_fn(n_samples, |t| b(t) / normalizer)?;
        Ok(Self { sharpness, normalizer, values, derivative })
    }

    pub fn sharpness(&self) -> f64 {
        self.sharpness
    }

    /// α on the loop grid (α(0) = 0; the value 1 at 2π is not a grid point).
    pub fn values(&self) -> &Loop<f64> {
        &self.values
    }

    /// ∂α on the loop grid.
    pub fn derivative(&self) -> &Loop<f64> {
        &self.derivative
    }

    /// α extended to ℝ by 0 before 0 and 1 after 2π.
    pub fn value_at(&self, theta: f64) -> f64 {
        if theta <= 0.0 {
            return 0.0;
        }
        if theta >= 2.0 * PI {
            return 1.0;
        }
        // integrate from the nearer endpoint so values next to 2π round to exactly 1
        let b = |t: f64| bump(self.sharpness, t);
        let panels = |width: f64| (((width / (2.0 * PI)) * (CUTOFF_PANELS * 256) as f64).ceil() as usize).max(2);
        if theta <= PI {
            simpson(b, 0.0, theta, panels(theta)) / self.normalizer
        } else {
            1.0 - simpson(b, theta, 2.0 * PI, panels(2.0 * PI - theta)) / self.normalizer
        }
    }

    /// Derivatives of orders 1..=`orders` at θ = 0 and at θ = 2π, by central differences of
    /// the extended function with the given step; returns the largest magnitude.
    pub fn endpoint_derivative_bound(&self, orders: usize, step: f64) -> f64 {
        let mut worst: f64 = 0.0;
        for &center in &[0.0, 2.0 * PI] {
            for order in 1..=orders {
                // n-th central difference: Σ_j (−1)^j C(n, j) f(x + (n/2 − j)h) / h^n
                let mut acc = 0.0;
                for j in 0..=order {
                    let c = crate::combinatorics::binomial(order, j) as f64;
                    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                    acc += sign * c * self.value_at(center + (order as f64 / 2.0 - j as f64) * step);
                }
                worst = worst.max((acc / step.powi(order as i32)).abs());
            }
        }
        worst
    }
}

fn check_cutoff(p_len: usize, cutoff: &CutoffFunction) -> Result<()> {
    if p_len == cutoff.values.len() {
        Ok(())
    } else {
        Err(Error::GridMismatch { left: p_len, right: cutoff.values.len() })
    }
}

/// A(X) = Θ(X) − α·Ad(p⁻¹)X(2π)p(2π)⁻¹ = Ad(p⁻¹)(Xp⁻¹ − αV).
pub fn pf_connection(p: &PathPoint, x: &PathTangent, cutoff: &CutoffFunction) -> Result<Loop<AlgebraElement>> {
    p.path.check_grid(&x.right)?;
    check_cutoff(p.len(), cutoff)?;
    let shifted = x.right.zip_map(&cutoff.values, |r, a| r - &x.endpoint.scale(*a));
    Ok(p.path.inverse().adjoint(&shifted))
}

/// F(X, Y) = ½(α² − α)Ad(p⁻¹)[V, W] for endpoint data V, W.
pub fn pf_curvature(p: &PathPoint, v: &AlgebraElement, w: &AlgebraElement, cutoff: &CutoffFunction) -> Result<Loop<AlgebraElement>> {
    check_cutoff(p.len(), cutoff)?;
    let bracket = v.bracket(w);
    let inverse = p.path.inverse();
    Ok(inverse.zip_map(&cutoff.values, |g, a| g.adjoint(&bracket).scale(0.5 * (a * a - a))))
}

/// Φ(p) = p⁻¹∂p.
///
/// p itself is only quasi-periodic, p(θ + 2π) = p(2π)p(θ), so it is not differentiated
/// spectrally directly. With L = log(p(2π))/2π the loop q(θ) = exp(−θL)p(θ) is periodic and
/// p⁻¹∂p = q⁻¹Lq + q⁻¹∂q.
pub fn pf_higgs(p: &PathPoint) -> Loop<AlgebraElement> {
    let log = unitary_log(p.endpoint.matrix()) * Complex64::new(1.0 / (2.0 * PI), 0.0);
    let q = p.path.zip_map(&Loop::from_fn(p.len(), |t| t).expect("grid of an existing loop"), |g, t| {
        (&log * Complex64::new(-t, 0.0)).exp() * g.matrix()
    });
    let dq = loop_derivative(&q);
    q.zip_map(&dq, |q, dq| {
        let q_inv = q.adjoint();
        AlgebraElement::project(&(&q_inv * &log * q + &q_inv * dq))
    })
}

/// Principal logarithm of a unitary matrix through its (diagonal) complex Schur form.
fn unitary_log(u: &CMatrix) -> CMatrix {
    let (q, t) = Schur::new(u.clone()).unpack();
    let n = u.nrows();
    let diagonal = CMatrix::from_fn(n, n, |i, j| if i == j { Complex64::new(0.0, t[(i, i)].arg()) } else { Complex64::zero() });
    &q * diagonal * q.adjoint()
}

/// ∇Φ(X) = ∂α·Ad(p⁻¹)V.
pub fn pf_nabla_phi(p: &PathPoint, v: &AlgebraElement, cutoff: &CutoffFunction) -> Result<Loop<AlgebraElement>> {
    check_cutoff(p.len(), cutoff)?;
    Ok(p.path.inverse().zip_map(&cutoff.derivative, |g, da| g.adjoint(v).scale(*da)))
}

/// Solves g' = gξ, g(0) = 1 by classical RK4 with `HOLONOMY_REFINEMENT` steps per sample,
/// projecting back onto SU(n) after every step. Returns g on the grid and g(2π).
pub fn higgs_holonomy(xi: &Loop<AlgebraElement>) -> (Loop<GroupElement>, GroupElement) {
    let n = xi.len();
    let steps = n * HOLONOMY_REFINEMENT;
    // RK4 needs ξ at half steps
    let fine = refine(xi, 2 * HOLONOMY_REFINEMENT);
    let h = 2.0 * PI / steps as f64;
    let rank = xi.rank();
    let mut g = GroupElement::identity(rank);
    let mut samples = Vec::with_capacity(n);
    let hc = Complex64::new(h, 0.0);
    for step in 0..steps {
        if step % HOLONOMY_REFINEMENT == 0 {
            samples.push(g.clone());
        }
        let at = |k: usize| fine.samples()[k % fine.len()].matrix();
        let (x0, xm, x1) = (at(2 * step), at(2 * step + 1), at(2 * step + 2));
        let y = g.matrix();
        let k1 = y * x0;
        let k2 = (y + &k1 * (hc * 0.5)) * xm;
        let k3 = (y + &k2 * (hc * 0.5)) * xm;
        let k4 = (y + &k3 * hc) * x1;
        let next = y + (k1 + k2 * Complex64::new(2.0, 0.0) + k3 * Complex64::new(2.0, 0.0) + k4) * (hc / 6.0);
        g = GroupElement::project(&next);
    }
    (Loop::new(samples).expect("grid of the input loop"), g)
}

/// Tangent vector at p = hol(ϕ) of the curve t ↦ hol(ϕ + tψ), by central differences.
pub fn curve_tangent(phi: &Loop<AlgebraElement>, psi: &Loop<AlgebraElement>, step: f64) -> Result<(PathPoint, PathTangent)> {
    phi.check_grid(psi)?;
    if !(step > 0.0) {
        return Err(Error::Step(step));
    }
    let at = |t: f64| {
        let mut xi = phi.clone();
        xi.add_scaled(psi, t);
        PathPoint::from_higgs(&xi)
    };
    let (base, plus, minus) = (at(0.0), at(step), at(-step));
    let scale = Complex64::new(0.5 / step, 0.0);
    let right = Loop::new(
        (0..base.len())
            .map(|j| {
                let dp = (plus.path.samples()[j].matrix() - minus.path.samples()[j].matrix()) * scale;
                AlgebraElement::project(&(dp * base.path.samples()[j].matrix().adjoint()))
            })
            .collect(),
    )?;
    let de = (plus.endpoint.matrix() - minus.endpoint.matrix()) * scale;
    let endpoint = AlgebraElement::project(&(de * base.endpoint.matrix().adjoint()));
    Ok((base, PathTangent { right, endpoint }))
}

/// |dΦ(X) + [A(X), Φ] − ∂A(X) − ∂α·Ad(p⁻¹)V| along X = d/dt hol(ϕ + tψ), where dΦ(X) = ψ.
pub fn pf_nabla_phi_consistency(
    phi: &Loop<AlgebraElement>,
    psi: &Loop<AlgebraElement>,
    cutoff: &CutoffFunction,
    step: f64,
) -> Result<f64> {
    let (p, x) = curve_tangent(phi, psi, step)?;
    let a = pf_connection(&p, &x, cutoff)?;
    let mut lhs = psi.clone();
    lhs.add_scaled(&a.bracket(phi), 1.0);
    lhs.add_scaled(&loop_derivative(&a), -1.0);
    let rhs = pf_nabla_phi(&p, &x.endpoint, cutoff)?;
    Ok(lhs.difference(&rhs).magnitude())
}

/// Compares pf_curvature with dA + ½[A, A] on the coordinate fields of the surface
/// (s, t) ↦ hol(ϕ + sψ₁ + tψ₂), where dA(∂_s, ∂_t) = ½(∂_s A(∂_t) − ∂_t A(∂_s)).
pub fn pf_curvature_structure_residual(
    phi: &Loop<AlgebraElement>,
    psi: (&Loop<AlgebraElement>, &Loop<AlgebraElement>),
    cutoff: &CutoffFunction,
    step: f64,
) -> Result<f64> {
    let (psi1, psi2) = psi;
    let connection_along = |s: f64, t: f64, direction: &Loop<AlgebraElement>| -> Result<Loop<AlgebraElement>> {
        let mut base = phi.clone();
        base.add_scaled(psi1, s);
        base.add_scaled(psi2, t);
        let (p, x) = curve_tangent(&base, direction, step)?;
        pf_connection(&p, &x, cutoff)
    };
    let derivative = |f: &dyn Fn(f64) -> Result<Loop<AlgebraElement>>| -> Result<Loop<AlgebraElement>> {
        // fourth-order central difference
        let h = step;
        let mut d = f(h)?.scaled(8.0);
        d.add_scaled(&f(-h)?, -8.0);
        d.add_scaled(&f(2.0 * h)?, -1.0);
        d.add_scaled(&f(-2.0 * h)?, 1.0);
        Ok(d.scaled(1.0 / (12.0 * h)))
    };
    let ds_at = derivative(&|s| connection_along(s, 0.0, psi2))?;
    let dt_as = derivative(&|t| connection_along(0.0, t, psi1))?;
    let a_s = connection_along(0.0, 0.0, psi1)?;
    let a_t = connection_along(0.0, 0.0, psi2)?;
    let mut structure = ds_at.difference(&dt_as).scaled(0.5);
    structure.add_scaled(&a_s.bracket(&a_t), 0.5);
    let (p, xs) = curve_tangent(phi, psi1, step)?;
    let (_, xt) = curve_tangent(phi, psi2, step)?;
    let closed = pf_curvature(&p, &xs.endpoint, &xt.endpoint, cutoff)?;
    Ok(structure.difference(&closed).magnitude())
}

/// Both sides of the comparison of the path-fibration string form with the generator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneratorComparison {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

/// (1/48π²)⟨Θ, [Θ, Θ]⟩ on a frame of three algebra values.
pub fn generator_form(frame: &[AlgebraElement; 3]) -> f64 {
    let value = alternate_on_frame(&[1, 2], |blocks| {
        let (a, b) = (blocks[0], blocks[1]);
        frame[a[0]].killing(&frame[b[0]].bracket(&frame[b[1]]))
    });
    value / (48.0 * PI * PI)
}

/// lhs = −(1/4π²)∫⟨F, ∇Φ⟩dθ on the frame, rhs = the generator on the same endpoint frame.
pub fn pf_string_class_vs_generator(p: &PathPoint, frame: &[AlgebraElement; 3], cutoff: &CutoffFunction) -> Result<GeneratorComparison> {
    check_cutoff(p.len(), cutoff)?;
    let nabla: Vec<Loop<AlgebraElement>> = frame.iter().map(|v| pf_nabla_phi(p, v, cutoff)).collect::<Result<_>>()?;
    let mut curvature = vec![vec![None; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                curvature[i][j] = Some(pf_curvature(p, &frame[i], &frame[j], cutoff)?);
            }
        }
    }
    let integral = alternate_on_frame(&[2, 1], |blocks| {
        let (f, n) = (blocks[0], blocks[1]);
        let f_value = curvature[f[0]][f[1]].as_ref().expect("distinct frame slots");
        f_value.integrated_killing(&nabla[n[0]])
    });
    let lhs = -integral / (4.0 * PI * PI);
    let rhs = generator_form(frame);
    Ok(GeneratorComparison { lhs, rhs, residual: (lhs - rhs).abs() })
}

fn check_frame(f: &InvariantPolynomial, k: usize, frame: &[AlgebraElement]) -> Result<()> {
    if k == 0 || f.degree() != k {
        return Err(Error::Degree(format!("polynomial degree {} does not match k = {k}", f.degree())));
    }
    if frame.len() != 2 * k - 1 {
        return Err(Error::Arity { expected: 2 * k - 1, found: frame.len() });
    }
    let n = frame[0].rank();
    if let Some(bad) = frame.iter().find(|v| v.rank() != n) {
        return Err(Error::DimensionMismatch { left: n, right: bad.rank() });
    }
    Ok(())
}

/// f(Θ, [Θ,Θ], …, [Θ,Θ]) on a frame of 2k − 1 values, fully antisymmetrized.
fn transgression_core(f: &InvariantPolynomial, k: usize, frame: &[AlgebraElement]) -> f64 {
    let mut degrees = vec![1];
    degrees.extend(std::iter::repeat_n(2, k - 1));
    alternate_on_frame(&degrees, |blocks| {
        let mut args: Vec<AlgebraElement> = vec![frame[blocks[0][0]].clone()];
        for b in &blocks[1..] {
            args.push(frame[b[0]].bracket(&frame[b[1]]));
        }
        let refs: Vec<&AlgebraElement> = args.iter().collect();
        f.eval_unchecked(&refs)
    })
}

/// τ(f) = (−½)^{k−1} k!(k−1)!/(2k−1)! · f(Θ, [Θ,Θ], …, [Θ,Θ]) on the frame.
pub fn transgression_tau(f: &InvariantPolynomial, k: usize, frame: &[AlgebraElement]) -> Result<f64> {
    check_frame(f, k, frame)?;
    let coefficient = (-0.5f64).powi(k as i32 - 1) * factorial_ratio(k);
    Ok(coefficient * transgression_core(f, k, frame))
}

fn factorial_ratio(k: usize) -> f64 {
    use crate::combinatorics::factorial;
    factorial(k) * factorial(k - 1) / factorial(2 * k - 1)
}

/// k∫ f(∇Φ, F, …, F)dθ on the path fibration, contracted with a frame of endpoint values.
pub fn pf_higher_string_value(
    f: &InvariantPolynomial,
    k: usize,
    p: &PathPoint,
    frame: &[AlgebraElement],
    cutoff: &CutoffFunction,
) -> Result<f64> {
    check_frame(f, k, frame)?;
    check_cutoff(p.len(), cutoff)?;
    let m = frame.len();
    let nabla: Vec<Loop<AlgebraElement>> = frame.iter().map(|v| pf_nabla_phi(p, v, cutoff)).collect::<Result<_>>()?;
    let mut curvature: Vec<Vec<Option<Loop<AlgebraElement>>>> = vec![vec![None; m]; m];
    for i in 0..m {
        for j in 0..m {
            if i != j {
                curvature[i][j] = Some(pf_curvature(p, &frame[i], &frame[j], cutoff)?);
            }
        }
    }
    let mut degrees = vec![1];
    degrees.extend(std::iter::repeat_n(2, k - 1));
    let n = p.len();
    let value = alternate_on_frame(&degrees, |blocks| {
        let mut loops: Vec<&Loop<AlgebraElement>> = vec![&nabla[blocks[0][0]]];
        for b in &blocks[1..] {
            loops.push(curvature[b[0]][b[1]].as_ref().expect("distinct frame slots"));
        }
        let pointwise = Loop::new(
            (0..n)
                .map(|j| {
                    let args: Vec<&AlgebraElement> = loops.iter().map(|l| &l.samples()[j]).collect();
                    f.eval_unchecked(&args)
                })
                .collect(),
        )
        .expect("grid of the path");
        circle_integral(&pointwise)
    });
    Ok(k as f64 * value)
}

/// Exact sides of k·Σ_{i<k} C(k−1, i)(−1)^i/(k+i) = k!(k−1)!/(2k−1)!.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientIdentity {
    pub k: usize,
    pub lhs: BigRational,
    pub rhs: BigRational,
    pub equal: bool,
}

fn big_factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

pub fn coefficient_identity(k: usize) -> Result<CoefficientIdentity> {
    if k < 1 {
        return Err(Error::Parameter("coefficient identity needs k ≥ 1".into()));
    }
    let mut sum = BigRational::zero();
    let mut binom = BigInt::one();
    for i in 0..k {
        let term = BigRational::new(binom.clone(), BigInt::from(k + i));
        if i % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        // C(k−1, i+1) = C(k−1, i)(k−1−i)/(i+1)
        binom = binom * BigInt::from(k - 1 - i) / BigInt::from(i + 1);
    }
    let lhs = sum * BigRational::from_integer(BigInt::from(k));
    let rhs = BigRational::new(big_factorial(k) * big_factorial(k - 1), big_factorial(2 * k - 1));
    let equal = lhs == rhs;
    Ok(CoefficientIdentity { k, lhs, rhs, equal })
}

/// exp(θX) on the grid with endpoint exp(2πX): the path of a constant Higgs field.
pub fn one_parameter_path(x: &AlgebraElement, n_samples: usize) -> Result<PathPoint> {
    let path = Loop::from_fn(n_samples, |t| exponential(&x.scale(t)))?;
    Ok(PathPoint { path, endpoint: exponential(&x.scale(2.0 * PI)) })
}
