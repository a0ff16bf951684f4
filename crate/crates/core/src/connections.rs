//! Connections and Higgs fields on trivialized LG- and LG ⋊ S¹-bundles over a chart, with
//! their curvatures, covariant derivatives and string forms.
//!
//! The Higgs field is stored as a loop-valued 0-form so that dΦ is an ordinary exterior
//! derivative; ∂ acts on loop values spectrally. The circle part a of an LG ⋊ S¹ connection is
//! real with the factor i left implicit.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::coefficient::Coefficient;
use crate::error::{Error, Result};
use crate::formscalc::{
    exterior_derivative_with, fiber_integrate_value, integrate_over_circle, ChartPoint, Differentiation, FormField,
    FormValue,
};
use crate::liecore::{AlgebraElement, CMatrix, GroupElement, InvariantPolynomial};
use crate::loopspace::{loop_derivative, rotate, Loop, SemiDirectGroupElement};

pub type LoopAlgebra = Loop<AlgebraElement>;
pub type LoopForm = FormField<LoopAlgebra>;

/// −1/4π², the normalization of the string form −(1/4π²)∫⟨F, ∇Φ⟩dθ.
pub const STRING_FORM_NORMALIZATION: f64 = -1.0 / (4.0 * PI * PI);

/// A map from the chart into LG.
pub type LoopGauge = Arc<dyn Fn(&ChartPoint) -> Loop<GroupElement> + Send + Sync>;
/// A map from the chart into LG ⋊ S¹.
pub type SemiDirectGauge = Arc<dyn Fn(&ChartPoint) -> SemiDirectGroupElement + Send + Sync>;

/// Connection A and Higgs field Φ of an LG-bundle over a chart.
#[derive(Clone)]
pub struct LGConnectionData {
    pub connection: LoopForm,
    pub higgs: LoopForm,
    /// Scheme for the chart derivatives dA and dΦ.
    pub differentiation: Differentiation,
}

/// Connection (A, a) and Higgs field Φ of an LG ⋊ S¹-bundle over a chart.
#[derive(Clone)]
pub struct LGxS1ConnectionData {
    pub connection: LoopForm,
    pub circle: FormField<f64>,
    pub higgs: LoopForm,
    pub differentiation: Differentiation,
}

/// Curvature (F, f); f is present only for LG ⋊ S¹.
#[derive(Clone)]
pub struct CurvaturePair {
    pub curvature: LoopForm,
    pub circle: Option<FormField<f64>>,
}

fn check_pair(connection: &LoopForm, higgs: &LoopForm) -> Result<()> {
    if connection.degree() != 1 {
        return Err(Error::Degree(format!("connection has degree {}", connection.degree())));
    }
    if higgs.degree() != 0 {
        return Err(Error::Degree(format!("Higgs field has degree {}", higgs.degree())));
    }
    if connection.dim() != higgs.dim() {
        return Err(Error::DimensionMismatch { left: connection.dim(), right: higgs.dim() });
    }
    Ok(())
}

impl LGConnectionData {
    pub fn new(connection: LoopForm, higgs: LoopForm) -> Result<Self> {
        check_pair(&connection, &higgs)?;
        Ok(Self { connection, higgs, differentiation: Differentiation::default() })
    }

    pub fn with_differentiation(mut self, differentiation: Differentiation) -> Self {
        self.differentiation = differentiation;
        self
    }

    pub fn dim(&self) -> usize {
        self.connection.dim()
    }

    /// The same data viewed as an LG ⋊ S¹ connection with a = 0.
    pub fn untwisted(&self) -> LGxS1ConnectionData {
        let dim = self.dim();
        LGxS1ConnectionData {
            connection: self.connection.clone(),
            circle: FormField::constant(FormValue::from_fn(dim, 1, |_| 0.0)),
            higgs: self.higgs.clone(),
            differentiation: self.differentiation,
        }
    }
}

impl LGxS1ConnectionData {
    pub fn new(connection: LoopForm, circle: FormField<f64>, higgs: LoopForm) -> Result<Self> {
        check_pair(&connection, &higgs)?;
        if circle.degree() != 1 {
            return Err(Error::Degree(format!("circle connection has degree {}", circle.degree())));
        }
        if circle.dim() != connection.dim() {
            return Err(Error::DimensionMismatch { left: connection.dim(), right: circle.dim() });
        }
        Ok(Self { connection, circle, higgs, differentiation: Differentiation::default() })
    }

    pub fn with_differentiation(mut self, differentiation: Differentiation) -> Self {
        self.differentiation = differentiation;
        self
    }

    pub fn dim(&self) -> usize {
        self.connection.dim()
    }

    /// Drops the circle part.
    pub fn loop_part(&self) -> LGConnectionData {
        LGConnectionData {
            connection: self.connection.clone(),
            higgs: self.higgs.clone(),
            differentiation: self.differentiation,
        }
    }
}

fn spectral(v: &FormValue<LoopAlgebra>) -> FormValue<LoopAlgebra> {
    v.map(loop_derivative)
}

fn scalar_times(s: &f64, l: &LoopAlgebra) -> LoopAlgebra {
    l.scaled(*s)
}

/// Pointwise values of everything the string forms are built from.
pub(crate) struct LocalData {
    pub connection: FormValue<LoopAlgebra>,
    pub curvature: FormValue<LoopAlgebra>,
    pub higgs: LoopAlgebra,
    pub nabla_higgs: FormValue<LoopAlgebra>,
    pub circle_curvature: Option<FormValue<f64>>,
}

fn local_data(
    connection: &LoopForm,
    circle: Option<&FormField<f64>>,
    higgs: &LoopForm,
    scheme: Differentiation,
    p: &ChartPoint,
) -> LocalData {
    let a = connection.at(p);
    let d_a = assemble_d(connection, scheme, p);
    let phi_value = higgs.at(p);
    let d_phi = assemble_d(higgs, scheme, p);
    let phi = phi_value.components()[0].clone();
    let phi_form = phi_value;

    let mut curvature = d_a;
    curvature.add_scaled(&a.wedge_bracket(&a), 0.5);
    let da_theta = spectral(&a);
    let mut nabla = d_phi;
    nabla.add_scaled(&a.wedge_bracket(&phi_form), 1.0);
    nabla.add_scaled(&da_theta, -1.0);

    let circle_curvature = circle.map(|c| {
        let a_circle = c.at(p);
        curvature.add_scaled(&a_circle.wedge_with(&da_theta, scalar_times), -1.0);
        let dphi_theta = spectral(&phi_form);
        nabla.add_scaled(&a_circle.wedge_with(&dphi_theta, scalar_times), -1.0);
        assemble_d(c, scheme, p)
    });
    LocalData { connection: a, curvature, higgs: phi, nabla_higgs: nabla, circle_curvature }
}

fn assemble_d<V: Coefficient>(omega: &FormField<V>, scheme: Differentiation, p: &ChartPoint) -> FormValue<V> {
    exterior_derivative_with(omega, scheme).expect("scheme validated at construction").at(p)
}

impl LGConnectionData {
    pub(crate) fn local(&self, p: &ChartPoint) -> LocalData {
        local_data(&self.connection, None, &self.higgs, self.differentiation, p)
    }
}

impl LGxS1ConnectionData {
    pub(crate) fn local(&self, p: &ChartPoint) -> LocalData {
        local_data(&self.connection, Some(&self.circle), &self.higgs, self.differentiation, p)
    }
}

fn validated(scheme: Differentiation) -> Result<()> {
    scheme.validate()
}

/// F = dA + ½[A, A].
pub fn curvature_lg(c: &LGConnectionData) -> Result<CurvaturePair> {
    validated(c.differentiation)?;
    let data = c.clone();
    let curvature = FormField::new(c.dim(), 2, move |p| data.local(p).curvature);
    Ok(CurvaturePair { curvature, circle: None })
}

/// ∇Φ = dΦ + [A, Φ] − ∂A.
pub fn covariant_higgs_lg(c: &LGConnectionData) -> Result<LoopForm> {
    validated(c.differentiation)?;
    let data = c.clone();
    Ok(FormField::new(c.dim(), 1, move |p| data.local(p).nabla_higgs))
}

/// −(1/4π²)∫⟨F, ∇Φ⟩dθ.
pub fn string_form_lg(c: &LGConnectionData) -> Result<FormField<f64>> {
    validated(c.differentiation)?;
    let data = c.clone();
    let pairing = FormField::new(c.dim(), 3, move |p| {
        let local = data.local(p);
        local.curvature.wedge_pair(&local.nabla_higgs)
    });
    Ok(integrate_over_circle(&pairing).scaled(STRING_FORM_NORMALIZATION))
}

/// k f(∇Φ, F, …, F) paired pointwise along the loop; the circle integral is left to the caller.
fn chern_weil_integrand(f: &InvariantPolynomial, nabla: &FormValue<LoopAlgebra>, curvature: &FormValue<LoopAlgebra>) -> FormValue<Loop<f64>> {
    let k = f.degree();
    let mut args: Vec<&FormValue<LoopAlgebra>> = vec![nabla];
    args.extend(std::iter::repeat_n(curvature, k - 1));
    pointwise_polynomial(f, &args).scaled(k as f64)
}

/// f(φ₁ ∧ ⋯ ∧ φ_k) for loop-valued forms, evaluated sample by sample.
pub(crate) fn pointwise_polynomial(f: &InvariantPolynomial, forms: &[&FormValue<LoopAlgebra>]) -> FormValue<Loop<f64>> {
    FormValue::multilinear(forms, |loops: &[&LoopAlgebra]| {
        let n = loops[0].len();
        let samples = (0..n)
            .map(|j| {
                let args: Vec<&AlgebraElement> = loops.iter().map(|l| &l.samples()[j]).collect();
                f.eval_unchecked(&args)
            })
            .collect();
        Loop::new(samples).expect("grid shared with the inputs")
    })
}

fn check_polynomial(f: &InvariantPolynomial, k: usize, dim: usize) -> Result<()> {
    if f.degree() != k {
        return Err(Error::Degree(format!("polynomial has degree {} but k = {k}", f.degree())));
    }
    if dim < 2 * k - 1 {
        return Err(Error::Degree(format!("a {}-form needs a chart of dimension at least {}", 2 * k - 1, 2 * k - 1)));
    }
    Ok(())
}

/// The string (2k−1)-form k∫ f(∇Φ, F, …, F)dθ.
pub fn higher_string_form(f: &InvariantPolynomial, k: usize, c: &LGConnectionData) -> Result<FormField<f64>> {
    check_polynomial(f, k, c.dim())?;
    validated(c.differentiation)?;
    let (f, data) = (*f, c.clone());
    let integrand = FormField::new(c.dim(), 2 * k - 1, move |p| {
        let local = data.local(p);
        chern_weil_integrand(&f, &local.nabla_higgs, &local.curvature)
    });
    Ok(integrate_over_circle(&integrand))
}

/// (F, f) = (dA + ½[A, A] − a∧∂A, da).
pub fn curvature_lgxs1(c: &LGxS1ConnectionData) -> Result<CurvaturePair> {
    validated(c.differentiation)?;
    let data = c.clone();
    let curvature = FormField::new(c.dim(), 2, move |p| data.local(p).curvature);
    let circle = exterior_derivative_with(&c.circle, c.differentiation)?;
    Ok(CurvaturePair { curvature, circle: Some(circle) })
}

/// ∇Φ = dΦ + [A, Φ] − ∂A − a∂Φ.
pub fn covariant_higgs_lgxs1(c: &LGxS1ConnectionData) -> Result<LoopForm> {
    validated(c.differentiation)?;
    let data = c.clone();
    Ok(FormField::new(c.dim(), 1, move |p| data.local(p).nabla_higgs))
}

/// F + fΦ for the twisted string form.
pub(crate) fn shifted_curvature(local: &LocalData) -> FormValue<LoopAlgebra> {
    let mut shifted = local.curvature.clone();
    if let Some(f) = &local.circle_curvature {
        shifted.add_scaled(&f.map(|x| local.higgs.scaled(*x)), 1.0);
    }
    shifted
}

/// −(1/4π²)∫⟨F + fΦ, ∇Φ⟩dθ.
pub fn string_form_lgxs1(c: &LGxS1ConnectionData) -> Result<FormField<f64>> {
    validated(c.differentiation)?;
    let data = c.clone();
    let pairing = FormField::new(c.dim(), 3, move |p| {
        let local = data.local(p);
        shifted_curvature(&local).wedge_pair(&local.nabla_higgs)
    });
    Ok(integrate_over_circle(&pairing).scaled(STRING_FORM_NORMALIZATION))
}

/// Composite Simpson weights on `steps` (even) subintervals of [0, 1].
pub(crate) fn simpson_weights(steps: usize) -> Vec<f64> {
    let h = 1.0 / steps as f64;
    (0..=steps)
        .map(|i| {
            let w = if i == 0 || i == steps {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * h / 3.0
        })
        .collect()
}

/// Embeds a base form and a loop-direction form into the chart M × S¹ (θ last):
/// base + extra∧dθ.
fn with_theta(base: &FormValue<LoopAlgebra>, extra: &FormValue<LoopAlgebra>) -> FormValue<LoopAlgebra> {
    let dim = base.dim();
    FormValue::from_fn(dim + 1, base.degree(), |t| {
        if t.last() == Some(&dim) {
            extra.component(&t[..t.len() - 1]).clone()
        } else {
            base.component(t).clone()
        }
    })
}

/// The transgression form ψ with dψ = s(c₁) − s(c₀), from the straight-line path between
/// the two pairs on M × S¹ fiber-integrated back to M; Simpson's rule in t.
pub fn independence_homotopy_form(
    f: &InvariantPolynomial,
    k: usize,
    c0: &LGConnectionData,
    c1: &LGConnectionData,
    t_steps: usize,
) -> Result<FormField<f64>> {
    check_polynomial(f, k, c0.dim())?;
    if c0.dim() != c1.dim() {
        return Err(Error::DimensionMismatch { left: c0.dim(), right: c1.dim() });
    }
    if t_steps < 8 || t_steps % 2 != 0 {
        return Err(Error::Parameter(format!("t_steps must be even and at least 8, got {t_steps}")));
    }
    validated(c0.differentiation)?;
    let origin = vec![0.0; c0.dim()];
    c0.higgs.at(&origin).components()[0].check_grid(&c1.higgs.at(&origin).components()[0])?;
    let (f, c0, c1) = (*f, c0.clone(), c1.clone());
    let dim = c0.dim();
    let weights = simpson_weights(t_steps);
    Ok(FormField::new(dim, 2 * k - 2, move |p| {
        let scheme = c0.differentiation;
        let a0 = c0.connection.at(p);
        let a1 = c1.connection.at(p);
        let da0 = assemble_d(&c0.connection, scheme, p);
        let da1 = assemble_d(&c1.connection, scheme, p);
        let phi0 = c0.higgs.at(p);
        let phi1 = c1.higgs.at(p);
        let dphi0 = assemble_d(&c0.higgs, scheme, p);
        let dphi1 = assemble_d(&c1.higgs, scheme, p);
        let delta_a = a1.difference(&a0);
        let delta_phi = phi1.difference(&phi0);
        let alpha = with_theta(&delta_a, &delta_phi);

        let mut total: Option<FormValue<Loop<f64>>> = None;
        for (i, w) in weights.iter().enumerate() {
            let t = i as f64 / t_steps as f64;
            let lerp = |x: &FormValue<LoopAlgebra>, y: &FormValue<LoopAlgebra>| {
                let mut out = x.scaled(1.0 - t);
                out.add_scaled(y, t);
                out
            };
            let a = lerp(&a0, &a1);
            let phi = lerp(&phi0, &phi1);
            let mut curvature = lerp(&da0, &da1);
            curvature.add_scaled(&a.wedge_bracket(&a), 0.5);
            let mut nabla = lerp(&dphi0, &dphi1);
            nabla.add_scaled(&a.wedge_bracket(&phi), 1.0);
            nabla.add_scaled(&spectral(&a), -1.0);
            let extended = with_theta(&curvature, &nabla);
            let mut args: Vec<&FormValue<LoopAlgebra>> = vec![&alpha];
            args.extend(std::iter::repeat_n(&extended, k - 1));
            let term = pointwise_polynomial(&f, &args);
            match total.as_mut() {
                Some(acc) => acc.add_scaled(&term, *w),
                None => total = Some(term.scaled(*w)),
            }
        }
        fiber_integrate_value(&total.expect("at least one node").scaled(k as f64), dim)
    }))
}

/// σ⁻¹dσ on the chart, σ loop-valued, by differentiating the defining matrices.
fn gauge_maurer_cartan(sigma: &LoopGauge, p: &ChartPoint, scheme: Differentiation) -> FormValue<LoopAlgebra> {
    let inverse = sigma(p).inverse();
    let dim = p.len();
    FormValue::from_fn(dim, 1, |t| {
        let i = t[0];
        let mut q = p.to_vec();
        let derivative: Loop<CMatrix> = scheme.derivative(|s| {
            q[i] = p[i] + s;
            sigma(&q).map(|g| g.matrix().clone())
        });
        inverse.zip_map(&derivative, |g, dg| AlgebraElement::project(&(g.matrix() * dg)))
    })
}

/// Change of trivialization by σ: A ↦ Ad(σ⁻¹)A + σ⁻¹dσ, Φ ↦ Ad(σ⁻¹)Φ + σ⁻¹∂σ.
pub fn gauge_transform_lg(c: &LGConnectionData, sigma: LoopGauge) -> Result<LGConnectionData> {
    validated(c.differentiation)?;
    let scheme = c.differentiation;
    let dim = c.dim();
    let (connection, s) = (c.connection.clone(), sigma.clone());
    let new_connection = FormField::new(dim, 1, move |p| {
        let g_inv = s(p).inverse();
        let mut out = connection.at(p).map(|a| g_inv.adjoint(a));
        out.add_scaled(&gauge_maurer_cartan(&s, p, scheme), 1.0);
        out
    });
    let (higgs, s) = (c.higgs.clone(), sigma);
    let new_higgs = FormField::new(dim, 0, move |p| {
        let g = s(p);
        let mut phi = g.inverse().adjoint(&higgs.at(p).components()[0]);
        phi.add_scaled(&g.left_log_derivative(), 1.0);
        FormValue::from_fn(dim, 0, |_| phi.clone())
    });
    Ok(LGConnectionData { connection: new_connection, higgs: new_higgs, differentiation: scheme })
}

/// Change of trivialization by (γ, φ):
/// A ↦ ρ_φ⁻¹(Ad(γ⁻¹)A − a·γ⁻¹∂γ + γ⁻¹dγ), a ↦ a + dφ, Φ ↦ ρ_φ⁻¹(Ad(γ⁻¹)Φ + γ⁻¹∂γ).
pub fn gauge_transform_lgxs1(c: &LGxS1ConnectionData, sigma: SemiDirectGauge) -> Result<LGxS1ConnectionData> {
    validated(c.differentiation)?;
    let scheme = c.differentiation;
    let dim = c.dim();
    let loop_part: LoopGauge = {
        let s = sigma.clone();
        Arc::new(move |p: &ChartPoint| s(p).loop_part)
    };
    let (connection, circle, s, lp) = (c.connection.clone(), c.circle.clone(), sigma.clone(), loop_part.clone());
    let new_connection = FormField::new(dim, 1, move |p| {
        let g = s(p);
        let g_inv = g.loop_part.inverse();
        let log_derivative = g.loop_part.left_log_derivative();
        let a = circle.at(p);
        let mut inner = connection.at(p).map(|x| g_inv.adjoint(x));
        inner.add_scaled(&a.map(|x| log_derivative.scaled(*x)), -1.0);
        inner.add_scaled(&gauge_maurer_cartan(&lp, p, scheme), 1.0);
        inner.map(|x| rotate(-g.angle, x))
    });
    let s = sigma.clone();
    let angle = FormField::new(dim, 0, move |p| FormValue::from_fn(dim, 0, |_| s(p).angle));
    let new_circle = c.circle.add(&exterior_derivative_with(&angle, scheme)?)?;
    let (higgs, s) = (c.higgs.clone(), sigma);
    let new_higgs = FormField::new(dim, 0, move |p| {
        let g = s(p);
        let mut phi = g.loop_part.inverse().adjoint(&higgs.at(p).components()[0]);
        phi.add_scaled(&g.loop_part.left_log_derivative(), 1.0);
        let phi = rotate(-g.angle, &phi);
        FormValue::from_fn(dim, 0, |_| phi.clone())
    });
    Ok(LGxS1ConnectionData { connection: new_connection, circle: new_circle, higgs: new_higgs, differentiation: scheme })
}

/// Max over components of D(∇Φ) − ([F, Φ] − ∂F) at `p`, with D = d + [A, ·] and the outer
/// derivative taken with `outer`.
pub fn covariant_higgs_derivative_residual(c: &LGConnectionData, p: &ChartPoint, outer: Differentiation) -> Result<f64> {
    outer.validate()?;
    let nabla = covariant_higgs_lg(c)?;
    let local = c.local(p);
    let mut lhs = exterior_derivative_with(&nabla, outer)?.at(p);
    lhs.add_scaled(&local.connection.wedge_bracket(&local.nabla_higgs), 1.0);
    let higgs_form = FormValue::from_fn(c.dim(), 0, |_| local.higgs.clone());
    let mut rhs = local.curvature.wedge_bracket(&higgs_form);
    rhs.add_scaled(&spectral(&local.curvature), -1.0);
    Ok(lhs.difference(&rhs).magnitude())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_weights_integrate_cubics_exactly() {
        let w = simpson_weights(8);
        let integral: f64 = w.iter().enumerate().map(|(i, w)| w * (i as f64 / 8.0).powi(3)).sum();
        assert!((integral - 0.25).abs() < 1e-15);
    }
}
