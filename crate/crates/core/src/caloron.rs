//! The caloron correspondence at the level of connections: LG data over a chart M turns into
//! a G-connection on M × S¹ × G (and its twisted analogue over an S¹-bundle), where curvature
//! and Pontryagin forms can be compared against the loop-side string forms.
//!
//! Coordinates on the extended chart are (x, θ, u): x on the base, θ the circle (sampled on
//! the loop grid, so form coefficients are loops and ∂_θ is spectral) and u in the exponential
//! chart g(u) = g₀ exp(Σ u_a e_a) of G.

use crate::coefficient::Coefficient;
use crate::connections::{
    shifted_curvature, LGConnectionData, LGxS1ConnectionData, LoopAlgebra, LoopForm,
};
use crate::error::{Error, Result};
use crate::formscalc::{exterior_derivative_periodic, fiber_integrate_value, ChartPoint, Differentiation, FormField, FormValue};
use crate::liecore::{exponential, AlgebraElement, GroupElement, InvariantPolynomial};
use crate::loopspace::Loop;

#[derive(Clone, Debug)]
pub struct ExtendedChart {
    base_dim: usize,
    basis: Vec<AlgebraElement>,
    base_point: GroupElement,
}

impl ExtendedChart {
    pub fn new(base_dim: usize, base_point: GroupElement) -> Self {
        let basis = AlgebraElement::basis(base_point.rank());
        Self { base_dim, basis, base_point }
    }

    pub fn at_identity(base_dim: usize, rank: usize) -> Self {
        Self::new(base_dim, GroupElement::identity(rank))
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn theta_index(&self) -> usize {
        self.base_dim
    }

    pub fn group_dim(&self) -> usize {
        self.basis.len()
    }

    pub fn dim(&self) -> usize {
        self.base_dim + 1 + self.basis.len()
    }

    pub fn base_point(&self) -> &GroupElement {
        &self.base_point
    }

    /// Assembles a chart point from base coordinates and group coordinates.
    pub fn point(&self, x: &[f64], u: &[f64]) -> Vec<f64> {
        let mut p = x.to_vec();
        p.push(0.0);
        p.extend_from_slice(u);
        p
    }

    fn split<'a>(&self, p: &'a ChartPoint) -> (&'a [f64], &'a [f64]) {
        (&p[..self.base_dim], &p[self.base_dim + 1..])
    }

    pub fn group_at(&self, u: &[f64]) -> GroupElement {
        &self.base_point * &exponential(&AlgebraElement::combination(&self.basis, u))
    }

    /// Θ(∂/∂u_a) = g⁻¹∂_a g = Σ_m (−1)^m/(m+1)! ad_U^m(e_a), independent of g₀. The series
    /// is summed until its terms drop below 1e−18; being analytic in u it carries no
    /// finite-difference noise into derivatives taken on top of it.
    pub fn maurer_cartan(&self, u: &[f64]) -> Vec<AlgebraElement> {
        let exponent = AlgebraElement::combination(&self.basis, u);
        self.basis
            .iter()
            .map(|e| {
                let mut term = e.clone();
                let mut sum = e.clone();
                for m in 1..200 {
                    term = exponent.bracket(&term).scale(-1.0 / (m as f64 + 1.0));
                    sum.axpy(1.0, &term);
                    if term.norm() < 1e-18 {
                        break;
                    }
                }
                sum
            })
            .collect()
    }

    fn check_base(&self, dim: usize) -> Result<()> {
        if dim == self.base_dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { left: self.base_dim, right: dim })
        }
    }
}

/// A G-connection Ã on an extended chart, with loop-valued coefficients in θ.
#[derive(Clone)]
pub struct GConnectionField {
    pub chart: ExtendedChart,
    pub form: LoopForm,
}

impl GConnectionField {
    /// The curvature dÃ + ½[Ã, Ã], with finite differences of the given step off the circle.
    pub fn curvature(&self, scheme: Differentiation) -> Result<LoopForm> {
        let d = exterior_derivative_periodic(&self.form, scheme, self.chart.theta_index())?;
        let form = self.form.clone();
        Ok(FormField::new(self.chart.dim(), 2, move |p| {
            let a = form.at(p);
            let mut f = d.at(p);
            f.add_scaled(&a.wedge_bracket(&a), 0.5);
            f
        }))
    }

    /// Ã restricted to the slice of fixed group coordinates `u`, as a form on M × S¹.
    pub fn restrict_to_slice(&self, u: &[f64]) -> LoopForm {
        let chart = self.chart.clone();
        let form = self.form.clone();
        let u = u.to_vec();
        let slice_dim = chart.base_dim + 1;
        let coords: Vec<usize> = (0..slice_dim).collect();
        FormField::new(slice_dim, 1, move |y| {
            let mut p = y.to_vec();
            p.extend_from_slice(&u);
            form.at(&p).restrict(&coords)
        })
    }
}

fn constant_loop(n_samples: usize, x: &AlgebraElement) -> LoopAlgebra {
    Loop::constant(n_samples, x.clone()).expect("grid taken from existing loops")
}

/// Shared assembly: base components Ad(g⁻¹)(A + Φa), θ component Ad(g⁻¹)Φ, group components Θ.
fn assemble(chart: &ExtendedChart, connection: LoopForm, circle: Option<FormField<f64>>, higgs: LoopForm) -> GConnectionField {
    let c = chart.clone();
    let dim = chart.dim();
    let base_dim = chart.base_dim;
    let form = FormField::new(dim, 1, move |p| {
        let (x, u) = c.split(p);
        let g_inv = c.group_at(u).inverse();
        let a = connection.at(x);
        let phi = higgs.at(x).components()[0].clone();
        let a_circle = circle.as_ref().map(|f| f.at(x));
        let n_samples = phi.len();
        let theta = c.maurer_cartan(u);
        FormValue::from_fn(dim, 1, |t| {
            let i = t[0];
            if i < base_dim {
                let mut value = a.components()[i].clone();
                if let Some(ac) = &a_circle {
                    value.add_scaled(&phi, ac.components()[i]);
                }
                value.map(|v| g_inv.adjoint(v))
            } else if i == base_dim {
                phi.map(|v| g_inv.adjoint(v))
            } else {
                constant_loop(n_samples, &theta[i - base_dim - 1])
            }
        })
    });
    GConnectionField { chart: chart.clone(), form }
}

/// Ã = Ad(g⁻¹)A(θ) + Θ + Ad(g⁻¹)Φ dθ.
pub fn to_g_connection(c: &LGConnectionData, chart: &ExtendedChart) -> Result<GConnectionField> {
    chart.check_base(c.dim())?;
    Ok(assemble(chart, c.connection.clone(), None, c.higgs.clone()))
}

/// Ã = Ad(g⁻¹)A + Θ + Ad(g⁻¹)Φ(a + dθ), θ now the fiber coordinate of the circle bundle.
pub fn to_g_connection_twisted(c: &LGxS1ConnectionData, chart: &ExtendedChart) -> Result<GConnectionField> {
    chart.check_base(c.dim())?;
    Ok(assemble(chart, c.connection.clone(), Some(c.circle.clone()), c.higgs.clone()))
}

/// Reads (A, Φ) off Ã along the section θ ↦ (x, θ, g₀), undoing the Ad(g₀⁻¹) twist.
pub fn from_g_connection(a: &GConnectionField) -> LGConnectionData {
    let chart = a.chart.clone();
    let base_dim = chart.base_dim;
    let g0 = chart.base_point.clone();
    let zero_u = vec![0.0; chart.group_dim()];
    let (form, g, u) = (a.form.clone(), g0.clone(), zero_u.clone());
    let ch = chart.clone();
    let connection = FormField::new(base_dim, 1, move |x| {
        let value = form.at(&ch.point(x, &u));
        FormValue::from_fn(base_dim, 1, |t| value.components()[t[0]].map(|v| g.adjoint(v)))
    });
    let (form, g, u) = (a.form.clone(), g0, zero_u);
    let higgs = FormField::new(base_dim, 0, move |x| {
        let value = form.at(&chart.point(x, &u));
        let phi = value.components()[base_dim].map(|v| g.adjoint(v));
        FormValue::from_fn(base_dim, 0, |_| phi.clone())
    });
    LGConnectionData::new(connection, higgs).expect("degrees fixed by construction")
}

/// Closed form Ad(g⁻¹)(F' + ∇Φ∧(a + dθ)) on the extended chart, where F' = F + fΦ.
fn transported_curvature(
    chart: &ExtendedChart,
    p: &ChartPoint,
    shifted: &FormValue<LoopAlgebra>,
    nabla: &FormValue<LoopAlgebra>,
    circle: Option<&FormValue<f64>>,
) -> FormValue<LoopAlgebra> {
    let (_, u) = chart.split(p);
    let g_inv = chart.group_at(u).inverse();
    let base_dim = chart.base_dim;
    let mut base = shifted.clone();
    if let Some(a) = circle {
        base.add_scaled(&nabla.wedge_with(a, |l, s| l.scaled(*s)), 1.0);
    }
    let zero = nabla.components()[0].zero_like();
    FormValue::from_fn(chart.dim(), 2, |t| {
        let (i, j) = (t[0], t[1]);
        let value = if j < base_dim {
            base.component(&[i, j]).clone()
        } else if j == base_dim {
            nabla.components()[i].clone()
        } else {
            zero.clone()
        };
        value.map(|v| g_inv.adjoint(v))
    })
}

fn max_residual(
    chart: &ExtendedChart,
    field: &GConnectionField,
    probes: &[Vec<f64>],
    fd_step: f64,
    closed_form: impl Fn(&ChartPoint) -> FormValue<LoopAlgebra>,
) -> Result<f64> {
    let numeric = field.curvature(Differentiation::central(fd_step))?;
    let mut worst: f64 = 0.0;
    for p in probes {
        if p.len() != chart.dim() {
            return Err(Error::DimensionMismatch { left: chart.dim(), right: p.len() });
        }
        worst = worst.max(numeric.at(p).difference(&closed_form(p)).magnitude());
    }
    Ok(worst)
}

/// max over probes of |F̃ − Ad(g⁻¹)(F + ∇Φ∧dθ)|, F̃ by central differences of step `fd_step`.
/// The closed form uses the data's own differentiation scheme.
pub fn g_curvature_transport_check(c: &LGConnectionData, chart: &ExtendedChart, probes: &[Vec<f64>], fd_step: f64) -> Result<f64> {
    let field = to_g_connection(c, chart)?;
    max_residual(chart, &field, probes, fd_step, |p| {
        let local = c.local(&p[..chart.base_dim]);
        transported_curvature(chart, p, &local.curvature, &local.nabla_higgs, None)
    })
}

/// As [`g_curvature_transport_check`] against Ad(g⁻¹)(F + fΦ + ∇Φ∧(a + dθ)).
pub fn g_curvature_transport_check_twisted(
    c: &LGxS1ConnectionData,
    chart: &ExtendedChart,
    probes: &[Vec<f64>],
    fd_step: f64,
) -> Result<f64> {
    let field = to_g_connection_twisted(c, chart)?;
    max_residual(chart, &field, probes, fd_step, |p| {
        let x = &p[..chart.base_dim];
        let local = c.local(x);
        let a = c.circle.at(x);
        transported_curvature(chart, p, &shifted_curvature(&local), &local.nabla_higgs, Some(&a))
    })
}

/// ∫_{S¹} f(F̃, …, F̃) over the fiber, with F̃ the finite-difference curvature of Ã on the
/// slice u = 0.
pub fn chern_weil_fiber_integral(f: &InvariantPolynomial, field: &GConnectionField, scheme: Differentiation) -> Result<FormField<f64>> {
    let k = f.degree();
    let base_dim = field.chart.base_dim;
    if base_dim < 2 * k - 1 {
        return Err(Error::Degree(format!("a {}-form needs a base of dimension at least {}", 2 * k - 1, 2 * k - 1)));
    }
    let slice = GConnectionField {
        chart: ExtendedChart { base_dim, basis: Vec::new(), base_point: field.chart.base_point.clone() },
        form: field.restrict_to_slice(&vec![0.0; field.chart.group_dim()]),
    };
    let curvature = slice.curvature(scheme)?;
    let f = *f;
    Ok(FormField::new(base_dim, 2 * k - 1, move |x| {
        let mut y = x.to_vec();
        y.push(0.0);
        let value = curvature.at(&y);
        let args = vec![&value; k];
        fiber_integrate_value(&crate::connections::pointwise_polynomial(&f, &args), base_dim)
    }))
}

/// ∫_{S¹} p₁(F̃) with p₁ = −(1/8π²)⟨F̃, F̃⟩.
pub fn pontrjagyn_fiber_integral(c: &LGConnectionData, chart: &ExtendedChart) -> Result<FormField<f64>> {
    chern_weil_fiber_integral(&InvariantPolynomial::pontryagin(), &to_g_connection(c, chart)?, c.differentiation)
}

/// The twisted analogue; the θ coordinate is the circle-bundle fiber.
pub fn pontrjagyn_fiber_integral_twisted(c: &LGxS1ConnectionData, chart: &ExtendedChart) -> Result<FormField<f64>> {
    chern_weil_fiber_integral(&InvariantPolynomial::pontryagin(), &to_g_connection_twisted(c, chart)?, c.differentiation)
}
