//! Form data of the central extensions of LG and LG ⋊ S¹ and of the lifting bundle gerbe:
//! the curvature R, the 1-form α with dα = δR, the connection correction ε, curvings and the
//! descent of their 3-curvature.
//!
//! Quantities that the geometry makes iℝ-valued are returned as reals with the i stripped,
//! which turns the gerbe normalization i/2π into 1/2π; [`GERBE_TO_STRING`] converts to the
//! −1/4π² normalization of the string forms. Tangent vectors to groups are left-trivialized:
//! the value v at g stands for g·v.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::coefficient::Coefficient;
use crate::connections::{
    gauge_transform_lg, gauge_transform_lgxs1, string_form_lg, string_form_lgxs1, LGConnectionData, LGxS1ConnectionData,
    LocalData, LoopAlgebra, LoopGauge, SemiDirectGauge,
};
use crate::error::{Error, Result};
use crate::formscalc::{exterior_derivative_with, ChartPoint, Differentiation, FormField, FormValue};
use crate::liecore::{AlgebraElement, GroupElement};
use crate::loopspace::{
    loop_derivative, semidirect_adjoint_inverse, semidirect_bracket, z_map, Loop, SemiDirectAlgebraElement,
    SemiDirectGroupElement,
};

/// dB = GERBE_TO_STRING · (string form): −(1/2π) = 2π · (−1/4π²).
pub const GERBE_TO_STRING: f64 = 2.0 * PI;

/// A Lie group usable as an entry of a point of the nerve.
pub trait NerveGroup: Clone + Send + Sync + 'static {
    type Tangent: Coefficient;
    fn product(&self, other: &Self) -> Self;
    /// g·exp(tv), a curve through g with left-trivialized velocity v.
    fn exp_curve(&self, v: &Self::Tangent, t: f64) -> Self;
    /// Left-trivialized velocity c(0)⁻¹c'(0) by a central difference of the given step.
    fn velocity(curve: &dyn Fn(f64) -> Self, step: f64) -> Self::Tangent;
    /// Bracket of the left-invariant fields generated by a and b.
    fn tangent_bracket(a: &Self::Tangent, b: &Self::Tangent) -> Self::Tangent;
}

fn matrix_velocity(base: &Loop<GroupElement>, plus: &Loop<GroupElement>, minus: &Loop<GroupElement>, step: f64) -> LoopAlgebra {
    let scale = Complex64::new(0.5 / step, 0.0);
    let inverse = base.inverse();
    Loop::new(
        (0..base.len())
            .map(|j| {
                let d = (plus.samples()[j].matrix() - minus.samples()[j].matrix()) * scale;
                AlgebraElement::project(&(inverse.samples()[j].matrix() * d))
            })
            .collect(),
    )
    .expect("grid of an existing loop")
}

impl NerveGroup for Loop<GroupElement> {
    type Tangent = LoopAlgebra;

    fn product(&self, other: &Self) -> Self {
        Loop::<GroupElement>::product(self, other)
    }

    fn exp_curve(&self, v: &LoopAlgebra, t: f64) -> Self {
        Loop::<GroupElement>::product(self, &v.scaled(t).exp())
    }

    fn velocity(curve: &dyn Fn(f64) -> Self, step: f64) -> LoopAlgebra {
        matrix_velocity(&curve(0.0), &curve(step), &curve(-step), step)
    }

    fn tangent_bracket(a: &LoopAlgebra, b: &LoopAlgebra) -> LoopAlgebra {
        a.bracket(b)
    }
}

impl NerveGroup for SemiDirectGroupElement {
    type Tangent = SemiDirectAlgebraElement;

    fn product(&self, other: &Self) -> Self {
        SemiDirectGroupElement::product(self, other)
    }

    fn exp_curve(&self, v: &SemiDirectAlgebraElement, t: f64) -> Self {
        let step = SemiDirectGroupElement::new(v.loop_part.scaled(t).exp(), t * v.circle_part);
        SemiDirectGroupElement::product(self, &step)
    }

    fn velocity(curve: &dyn Fn(f64) -> Self, step: f64) -> SemiDirectAlgebraElement {
        let inverse = curve(0.0).inverse();
        let plus = inverse.product(&curve(step));
        let minus = inverse.product(&curve(-step));
        let identity = Loop::<GroupElement>::identity(plus.loop_part.len(), plus.loop_part.rank()).expect("grid of an existing loop");
        let loop_part = matrix_velocity(&identity, &plus.loop_part, &minus.loop_part, step);
        SemiDirectAlgebraElement::new(loop_part, (plus.angle - minus.angle) / (2.0 * step))
    }

    fn tangent_bracket(a: &SemiDirectAlgebraElement, b: &SemiDirectAlgebraElement) -> SemiDirectAlgebraElement {
        semidirect_bracket(a, b).expect("tangents at one point share a grid")
    }
}

/// One tangent vector to a point of G^m: an entry per factor.
pub type TupleTangent<G> = Vec<<G as NerveGroup>::Tangent>;

type Evaluator<G> = Arc<dyn Fn(&[G], &[TupleTangent<G>]) -> f64 + Send + Sync>;

/// A real q-form on G^m, evaluated at a point on q tuple tangents.
#[derive(Clone)]
pub struct SimplicialForm<G: NerveGroup> {
    arity: usize,
    degree: usize,
    evaluator: Evaluator<G>,
}

impl<G: NerveGroup> SimplicialForm<G> {
    pub fn new(arity: usize, degree: usize, f: impl Fn(&[G], &[TupleTangent<G>]) -> f64 + Send + Sync + 'static) -> Self {
        Self { arity, degree, evaluator: Arc::new(f) }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn evaluate(&self, point: &[G], tangents: &[TupleTangent<G>]) -> Result<f64> {
        if point.len() != self.arity {
            return Err(Error::Arity { expected: self.arity, found: point.len() });
        }
        if tangents.len() != self.degree {
            return Err(Error::Arity { expected: self.degree, found: tangents.len() });
        }
        if let Some(t) = tangents.iter().find(|t| t.len() != self.arity) {
            return Err(Error::Arity { expected: self.arity, found: t.len() });
        }
        Ok((self.evaluator)(point, tangents))
    }

    /// δ = Σ_i (−1)^i d_i* on G^{m+1}; face differentials by central differences through
    /// the multiplication with the given step.
    pub fn delta(&self, step: f64) -> SimplicialForm<G> {
        let inner = self.clone();
        let m = self.arity;
        SimplicialForm::new(m + 1, self.degree, move |point, tangents| {
            (0..=m + 1)
                .map(|i| {
                    let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                    let face_point = face(point, i);
                    let face_tangents: Vec<TupleTangent<G>> = tangents.iter().map(|t| face_tangent(point, t, i, step)).collect();
                    sign * (inner.evaluator)(&face_point, &face_tangents)
                })
                .sum()
        })
    }
}

/// Face map d_i: G^{m+1} → G^m. d_0 and d_{m+1} drop an end, d_i multiplies entries i−1, i.
pub fn face<G: NerveGroup>(point: &[G], i: usize) -> Vec<G> {
    let m1 = point.len();
    if i == 0 {
        point[1..].to_vec()
    } else if i == m1 {
        point[..m1 - 1].to_vec()
    } else {
        let mut out = point[..i - 1].to_vec();
        out.push(point[i - 1].product(&point[i]));
        out.extend_from_slice(&point[i + 1..]);
        out
    }
}

/// Differential of d_i on a tuple tangent.
pub fn face_tangent<G: NerveGroup>(point: &[G], tangent: &TupleTangent<G>, i: usize, step: f64) -> TupleTangent<G> {
    let m1 = point.len();
    if i == 0 {
        tangent[1..].to_vec()
    } else if i == m1 {
        tangent[..m1 - 1].to_vec()
    } else {
        let (g, h) = (&point[i - 1], &point[i]);
        let (v, w) = (&tangent[i - 1], &tangent[i]);
        let curve = |t: f64| g.exp_curve(v, t).product(&h.exp_curve(w, t));
        let mut out = tangent[..i - 1].to_vec();
        out.push(G::velocity(&curve, step));
        out.extend_from_slice(&tangent[i + 1..]);
        out
    }
}

/// δ(form) at a point of G^{m+1}.
pub fn simplicial_delta_eval<G: NerveGroup>(form: &SimplicialForm<G>, point: &[G], tangents: &[TupleTangent<G>], step: f64) -> Result<f64> {
    if point.len() != form.arity + 1 {
        return Err(Error::Arity { expected: form.arity + 1, found: point.len() });
    }
    form.delta(step).evaluate(point, tangents)
}

/// R(X, Y) = (1/4π)∫⟨ξ, ∂ζ⟩dθ for left-invariant probes ξ, ζ.
pub fn r_form(xi: &LoopAlgebra, zeta: &LoopAlgebra) -> Result<f64> {
    xi.check_grid(zeta)?;
    Ok(xi.integrated_killing(&loop_derivative(zeta)) / (4.0 * PI))
}

/// R on LG as a simplicial 2-form of arity 1.
pub fn r_form_lg() -> SimplicialForm<Loop<GroupElement>> {
    SimplicialForm::new(1, 2, |_, t: &[TupleTangent<Loop<GroupElement>>]| r_form(&t[0][0], &t[1][0]).expect("tangents share the point's grid"))
}

/// R on LG ⋊ S¹; the circle directions do not enter.
pub fn r_form_lgxs1() -> SimplicialForm<SemiDirectGroupElement> {
    SimplicialForm::new(1, 2, |_, t: &[TupleTangent<SemiDirectGroupElement>]| r_form(&t[0][0].loop_part, &t[1][0].loop_part).expect("tangents share the point's grid"))
}

/// α_{(γ₁,γ₂)}(ξ₁, ξ₂) = (1/2π)∫⟨ξ₁, ∂γ₂γ₂⁻¹⟩dθ.
pub fn alpha_form_lg(point: &[Loop<GroupElement>; 2], tangent: &[LoopAlgebra; 2]) -> Result<f64> {
    point[1].check_grid(&tangent[0])?;
    Ok(tangent[0].integrated_killing(&z_map(&point[1])) / (2.0 * PI))
}

/// α_{((γ₁,φ₁),(γ₂,φ₂))}((ξ₁,x₁), ·) = (1/2π)∫⟨ξ₁ − ½x₁Z(γ₂), Z(γ₂)⟩dθ.
pub fn alpha_form_lgxs1(point: &[SemiDirectGroupElement; 2], tangent: &[SemiDirectAlgebraElement; 2]) -> Result<f64> {
    point[1].loop_part.check_grid(&tangent[0].loop_part)?;
    let z = z_map(&point[1].loop_part);
    let mut first = tangent[0].loop_part.clone();
    first.add_scaled(&z, -0.5 * tangent[0].circle_part);
    Ok(first.integrated_killing(&z) / (2.0 * PI))
}

pub fn alpha_lg() -> SimplicialForm<Loop<GroupElement>> {
    SimplicialForm::new(2, 1, |p: &[Loop<GroupElement>], t: &[TupleTangent<Loop<GroupElement>>]| {
        alpha_form_lg(&[p[0].clone(), p[1].clone()], &[t[0][0].clone(), t[0][1].clone()]).expect("shared grid")
    })
}

pub fn alpha_lgxs1() -> SimplicialForm<SemiDirectGroupElement> {
    SimplicialForm::new(2, 1, |p: &[SemiDirectGroupElement], t: &[TupleTangent<SemiDirectGroupElement>]| {
        alpha_form_lgxs1(&[p[0].clone(), p[1].clone()], &[t[0][0].clone(), t[0][1].clone()]).expect("shared grid")
    })
}

/// dω(X, Y) = ½(X̃ω(Ỹ) − Ỹω(X̃) − ω([X̃, Ỹ])) for a 1-form, with X̃, Ỹ the left-invariant
/// extensions and the directional derivatives taken along g·exp(tv) (fourth order).
pub fn exterior_derivative_one_form<G: NerveGroup>(
    form: &SimplicialForm<G>,
    point: &[G],
    x: &TupleTangent<G>,
    y: &TupleTangent<G>,
    step: f64,
) -> Result<f64> {
    if form.degree != 1 {
        return Err(Error::Degree(format!("expected a 1-form, got degree {}", form.degree)));
    }
    let along = |v: &TupleTangent<G>, w: &TupleTangent<G>| -> Result<f64> {
        let at = |t: f64| -> Result<f64> {
            let moved: Vec<G> = point.iter().zip(v).map(|(g, v)| g.exp_curve(v, t)).collect();
            form.evaluate(&moved, std::slice::from_ref(w))
        };
        let h = step;
        Ok((8.0 * (at(h)? - at(-h)?) - (at(2.0 * h)? - at(-2.0 * h)?)) / (12.0 * h))
    };
    let bracket: TupleTangent<G> = x.iter().zip(y).map(|(a, b)| G::tangent_bracket(a, b)).collect();
    Ok(0.5 * (along(x, y)? - along(y, x)? - form.evaluate(point, &[bracket])?))
}

/// |dα − δR| at a pair (g₁, g₂) on two tuple tangents.
pub fn d_alpha_minus_delta_r<G: NerveGroup>(
    alpha: &SimplicialForm<G>,
    r: &SimplicialForm<G>,
    point: &[G; 2],
    x: &TupleTangent<G>,
    y: &TupleTangent<G>,
    step: f64,
) -> Result<f64> {
    let d_alpha = exterior_derivative_one_form(alpha, point, x, y, step)?;
    let delta_r = simplicial_delta_eval(r, point, &[x.clone(), y.clone()], step)?;
    Ok((d_alpha - delta_r).abs())
}

/// |δα| at a point of G³ on one tuple tangent.
pub fn verify_delta_alpha_zero<G: NerveGroup>(alpha: &SimplicialForm<G>, point: &[G; 3], tangent: &TupleTangent<G>, step: f64) -> Result<f64> {
    Ok(simplicial_delta_eval(alpha, point, std::slice::from_ref(tangent), step)?.abs())
}

fn chart_velocity<G: NerveGroup>(map: &dyn Fn(&ChartPoint) -> G, p: &ChartPoint, direction: &[f64], step: f64) -> G::Tangent {
    let curve = |t: f64| {
        let q: Vec<f64> = p.iter().zip(direction).map(|(p, d)| p + t * d).collect();
        map(&q)
    };
    G::velocity(&curve, step)
}

fn contract(form: &FormValue<LoopAlgebra>, direction: &[f64]) -> LoopAlgebra {
    let mut out = form.components()[0].zero_like();
    for (c, d) in form.components().iter().zip(direction) {
        out.add_scaled(c, *d);
    }
    out
}

/// ε(X) = (1/2π)∫⟨A(X), Z(τ)⟩dθ at p, A in the first trivialization, τ relating the two.
pub fn epsilon_form_lg(c: &LGConnectionData, tau: &LoopGauge, p: &ChartPoint, direction: &[f64]) -> f64 {
    let a = contract(&c.connection.at(p), direction);
    a.integrated_killing(&z_map(&tau(p))) / (2.0 * PI)
}

/// ε(X) = (1/2π)∫⟨A(X) − ½a(X)Z(τ), Z(τ)⟩dθ.
pub fn epsilon_form_lgxs1(c: &LGxS1ConnectionData, tau: &SemiDirectGauge, p: &ChartPoint, direction: &[f64]) -> f64 {
    let a: f64 = c.circle.at(p).components().iter().zip(direction).map(|(a, d)| a * d).sum();
    let z = z_map(&tau(p).loop_part);
    let mut first = contract(&c.connection.at(p), direction);
    first.add_scaled(&z, -0.5 * a);
    first.integrated_killing(&z) / (2.0 * PI)
}

/// |δε − τ*α| for sections s₁, s₂ = s₁τ₁₂, s₃ = s₂τ₂₃ of an LG-bundle over the chart.
pub fn verify_delta_epsilon_lg(
    c: &LGConnectionData,
    tau12: &LoopGauge,
    tau23: &LoopGauge,
    p: &ChartPoint,
    direction: &[f64],
    step: f64,
) -> Result<f64> {
    check_direction(c.dim(), p, direction)?;
    let (t12, t23) = (tau12.clone(), tau23.clone());
    let tau13: LoopGauge = Arc::new(move |x: &ChartPoint| t12(x).product(&t23(x)));
    let c2 = gauge_transform_lg(c, tau12.clone())?;
    let delta = epsilon_form_lg(&c2, tau23, p, direction) - epsilon_form_lg(c, &tau13, p, direction)
        + epsilon_form_lg(c, tau12, p, direction);
    let v12 = chart_velocity(&|x: &ChartPoint| tau12(x), p, direction, step);
    let v23 = chart_velocity(&|x: &ChartPoint| tau23(x), p, direction, step);
    let pulled = alpha_form_lg(&[tau12(p), tau23(p)], &[v12, v23])?;
    Ok((delta - pulled).abs())
}

/// The LG ⋊ S¹ analogue of [`verify_delta_epsilon_lg`].
pub fn verify_delta_epsilon_lgxs1(
    c: &LGxS1ConnectionData,
    tau12: &SemiDirectGauge,
    tau23: &SemiDirectGauge,
    p: &ChartPoint,
    direction: &[f64],
    step: f64,
) -> Result<f64> {
    check_direction(c.dim(), p, direction)?;
    let (t12, t23) = (tau12.clone(), tau23.clone());
    let tau13: SemiDirectGauge = Arc::new(move |x: &ChartPoint| t12(x).product(&t23(x)));
    let c2 = gauge_transform_lgxs1(c, tau12.clone())?;
    let delta = epsilon_form_lgxs1(&c2, tau23, p, direction) - epsilon_form_lgxs1(c, &tau13, p, direction)
        + epsilon_form_lgxs1(c, tau12, p, direction);
    let v12 = chart_velocity(&|x: &ChartPoint| tau12(x), p, direction, step);
    let v23 = chart_velocity(&|x: &ChartPoint| tau23(x), p, direction, step);
    let pulled = alpha_form_lgxs1(&[tau12(p), tau23(p)], &[v12, v23])?;
    Ok((delta - pulled).abs())
}

fn check_direction(dim: usize, p: &ChartPoint, direction: &[f64]) -> Result<()> {
    for len in [p.len(), direction.len()] {
        if len != dim {
            return Err(Error::DimensionMismatch { left: dim, right: len });
        }
    }
    Ok(())
}

/// (1/2π)∫(½⟨A∧∂A⟩ − ⟨F', Φ⟩)dθ with F' = F (LG) or F + ½fΦ (LG ⋊ S¹).
fn curving_value(local: &LocalData) -> FormValue<f64> {
    let a = &local.connection;
    let mut shifted = local.curvature.clone();
    if let Some(f) = &local.circle_curvature {
        shifted.add_scaled(&f.map(|x| local.higgs.scaled(*x)), 0.5);
    }
    let da = a.map(loop_derivative);
    let mut integrand = a.wedge_pair(&da).scaled(0.5);
    integrand.add_scaled(&shifted.map(|f| f.killing(&local.higgs)), -1.0);
    integrand.map(|l| crate::loopspace::circle_integral(l) / (2.0 * PI))
}

/// B = (1/2π)∫(½⟨A, ∂A⟩ − ⟨F, Φ⟩)dθ.
pub fn curving_direct_lg(c: &LGConnectionData) -> Result<FormField<f64>> {
    c.differentiation.validate()?;
    let data = c.clone();
    Ok(FormField::new(c.dim(), 2, move |p| curving_value(&data.local(p))))
}

/// B = (1/2π)∫(½⟨A, ∂A⟩ − ⟨F + ½fΦ, Φ⟩)dθ.
pub fn curving_direct_lgxs1(c: &LGxS1ConnectionData) -> Result<FormField<f64>> {
    c.differentiation.validate()?;
    let data = c.clone();
    Ok(FormField::new(c.dim(), 2, move |p| curving_value(&data.local(p))))
}

/// ω((ξ, x), (ζ, y)) = (1/2π)∫⟨ξ, ∂ζ⟩dθ.
pub fn omega_cocycle(xi: &LoopAlgebra, zeta: &LoopAlgebra) -> f64 {
    xi.integrated_killing(&loop_derivative(zeta)) / (2.0 * PI)
}

/// Gomi's reduced splitting ℓ(Φ, (ξ, x)) = −(1/2π)∫⟨ξ + ½xΦ, Φ⟩dθ.
pub fn reduced_splitting(higgs: &LoopAlgebra, v: &SemiDirectAlgebraElement) -> f64 {
    let mut first = v.loop_part.clone();
    first.add_scaled(higgs, 0.5 * v.circle_part);
    -first.integrated_killing(higgs) / (2.0 * PI)
}

/// B = ½ω(A, A) + ℓ(Φ, (F, f)), assembled coefficient by coefficient.
pub fn gomi_curving(c: &LGxS1ConnectionData) -> Result<FormField<f64>> {
    c.differentiation.validate()?;
    let data = c.clone();
    let dim = c.dim();
    Ok(FormField::new(dim, 2, move |p| {
        let local = data.local(p);
        let circle = local.circle_curvature.as_ref().expect("twisted data carries f");
        let a = local.connection.components();
        FormValue::from_fn(dim, 2, |t| {
            let (i, j) = (t[0], t[1]);
            let curvature = SemiDirectAlgebraElement::new(local.curvature.component(t).clone(), circle.component(t).to_owned());
            omega_cocycle(&a[i], &a[j]) + reduced_splitting(&local.higgs, &curvature)
        })
    }))
}

/// σ(g⁻¹, (ξ, x)) = α_{(1, g)}((ξ, x), 0) = (1/2π)∫⟨ξ − ½xZ(γ), Z(γ)⟩dθ.
pub fn splitting_cocycle(g: &SemiDirectGroupElement, v: &SemiDirectAlgebraElement) -> f64 {
    let z = z_map(&g.loop_part);
    let mut first = v.loop_part.clone();
    first.add_scaled(&z, -0.5 * v.circle_part);
    first.integrated_killing(&z) / (2.0 * PI)
}

/// Φ·(γ, φ) = ρ_φ⁻¹(Ad(γ⁻¹)Φ + γ⁻¹∂γ).
pub fn higgs_action(higgs: &LoopAlgebra, g: &SemiDirectGroupElement) -> LoopAlgebra {
    let mut inner = g.loop_part.inverse().adjoint(higgs);
    inner.add_scaled(&g.loop_part.left_log_derivative(), 1.0);
    crate::loopspace::rotate(-g.angle, &inner)
}

/// |ℓ(Φ, v) − ℓ(Φ·g, ad(g)⁻¹v) − σ(g⁻¹, v)|.
pub fn splitting_transformation_residual(higgs: &LoopAlgebra, g: &SemiDirectGroupElement, v: &SemiDirectAlgebraElement) -> Result<f64> {
    let moved = semidirect_adjoint_inverse(g, v)?;
    let lhs = reduced_splitting(higgs, v);
    let rhs = reduced_splitting(&higgs_action(higgs, g), &moved) + splitting_cocycle(g, v);
    Ok((lhs - rhs).abs())
}

/// Residuals of the descent check at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DescentResidual {
    /// |dB − 2π·s|.
    pub descent: f64,
    /// |dB − dB'| with B' the curving after a change of trivialization.
    pub gauge: f64,
}

fn descent(b: &FormField<f64>, b_gauged: &FormField<f64>, s: &FormField<f64>, p: &ChartPoint, outer: Differentiation) -> Result<DescentResidual> {
    let db = exterior_derivative_with(b, outer)?.at(p);
    let db_gauged = exterior_derivative_with(b_gauged, outer)?.at(p);
    let target = s.at(p).scaled(GERBE_TO_STRING);
    Ok(DescentResidual { descent: db.difference(&target).magnitude(), gauge: db.difference(&db_gauged).magnitude() })
}

pub fn three_curvature_descent_check_lg(c: &LGConnectionData, sigma: LoopGauge, p: &ChartPoint, outer: Differentiation) -> Result<DescentResidual> {
    let gauged = gauge_transform_lg(c, sigma)?;
    descent(&curving_direct_lg(c)?, &curving_direct_lg(&gauged)?, &string_form_lg(c)?, p, outer)
}

pub fn three_curvature_descent_check_lgxs1(
    c: &LGxS1ConnectionData,
    sigma: SemiDirectGauge,
    p: &ChartPoint,
    outer: Differentiation,
) -> Result<DescentResidual> {
    let gauged = gauge_transform_lgxs1(c, sigma)?;
    descent(&curving_direct_lgxs1(c)?, &curving_direct_lgxs1(&gauged)?, &string_form_lgxs1(c)?, p, outer)
}
