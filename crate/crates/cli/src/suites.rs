//! The verification suites.
//!
//! Every suite starts its own sampler from the configured seed and draws its random data in
//! the order its checks appear below, so a suite run alone and the same suite inside `all`
//! see identical data. Reports list checks sorted by name.

use std::time::Instant;

use loopforms::caloron::*;
use loopforms::centralext::*;
use loopforms::coefficient::Coefficient;
use loopforms::connections::*;
use loopforms::formscalc::*;
use loopforms::liecore::{eval_invariant_polynomial, exponential, AlgebraElement, GroupElement, InvariantPolynomial};
use loopforms::loopspace::{circle_integral, loop_derivative, rotate, z_map, Loop, SemiDirectAlgebraElement, SemiDirectGroupElement};
use loopforms::pathfibration::*;
use loopforms::sampling::{LoopShape, Sampler};

use crate::config::{RunConfig, Suite};
use crate::report::{CheckRecord, VerificationReport};
use crate::Result;

/// Random draws per check.
const PROBES: usize = 3;

pub fn run_suite(config: &RunConfig) -> Result<VerificationReport> {
    config.validate()?;
    let suites: Vec<Suite> = if config.suite == Suite::All { Suite::CONCRETE.to_vec() } else { vec![config.suite] };
    let mut checks = Vec::new();
    for suite in suites {
        let mut runner = Runner::new(config, suite)?;
        match suite {
            Suite::Lie => lie(&mut runner),
            Suite::Loops => loops(&mut runner),
            Suite::Forms => forms(&mut runner),
            Suite::String => string(&mut runner),
            Suite::Caloron => caloron(&mut runner),
            Suite::Pathfib => pathfib(&mut runner),
            Suite::Centralext => centralext(&mut runner),
            Suite::All => unreachable!("expanded above"),
        }
        checks.extend(runner.checks);
    }
    checks.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(VerificationReport { config: config.clone(), seed: config.seed, checks })
}

struct Runner<'a> {
    config: &'a RunConfig,
    suite: Suite,
    sampler: Sampler,
    shape: LoopShape,
    checks: Vec<CheckRecord>,
}

impl<'a> Runner<'a> {
    fn new(config: &'a RunConfig, suite: Suite) -> Result<Self> {
        let samples = config.samples_for(suite);
        let modes = 3.min((samples - 1) / 2);
        let shape = LoopShape::new(samples, config.rank, modes, 0.6)?;
        Ok(Self { config, suite, sampler: Sampler::new(config.seed), shape, checks: Vec::new() })
    }

    fn rank(&self) -> usize {
        self.config.rank
    }

    fn samples(&self) -> usize {
        self.shape.n_samples
    }

    fn step(&self) -> f64 {
        self.config.fd_step
    }

    /// Chart derivatives: Richardson-extrapolated central differences, coarse enough that
    /// nested differences stay clear of rounding.
    fn scheme(&self) -> Differentiation {
        Differentiation::extrapolated(10.0 * self.config.fd_step)
    }

    /// Runs one check; a numeric error is recorded as a NaN residual, which fails.
    fn check(&mut self, name: &str, anchor: &str, tolerance: f64, f: impl FnOnce(&mut Self) -> loopforms::Result<f64>) {
        let name = format!("{}.{}", self.suite, name);
        let start = Instant::now();
        let residual = f(self).unwrap_or(f64::NAN);
        let millis = start.elapsed().as_millis() as u64;
        let tolerance = self.config.tolerance(&name, tolerance);
        self.checks.push(CheckRecord::new(name, anchor, residual, tolerance, millis));
    }

    fn lg(&mut self, dim: usize) -> LGConnectionData {
        let scheme = self.scheme();
        self.sampler.lg_connection(dim, self.shape).with_differentiation(scheme)
    }

    fn lgxs1(&mut self, dim: usize) -> LGxS1ConnectionData {
        let scheme = self.scheme();
        self.sampler.lgxs1_connection(dim, self.shape).with_differentiation(scheme)
    }

    fn element(&mut self) -> AlgebraElement {
        self.sampler.algebra_element(self.config.rank, 1.0)
    }

    fn algebra_loop(&mut self) -> Loop<AlgebraElement> {
        self.sampler.algebra_loop(self.shape)
    }

    fn semidirect_tangent(&mut self) -> SemiDirectAlgebraElement {
        SemiDirectAlgebraElement::new(self.algebra_loop(), self.sampler.normal())
    }
}

/// Largest value, with NaN winning so that a broken probe cannot hide.
fn worst(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |acc, v| if acc.is_nan() || v.is_nan() { f64::NAN } else { acc.max(v) })
}

fn try_worst(values: impl IntoIterator<Item = loopforms::Result<f64>>) -> loopforms::Result<f64> {
    Ok(worst(values.into_iter().collect::<loopforms::Result<Vec<f64>>>()?))
}

fn lie(r: &mut Runner) {
    r.check("killing_ad_invariance", "⟨Ad(g)X, Ad(g)Y⟩ = ⟨X, Y⟩", 1e-10, |r| {
        Ok(worst((0..PROBES).map(|_| {
            let g = r.sampler.group_element(r.rank(), 1.0);
            let (x, y) = (r.element(), r.element());
            (g.adjoint(&x).killing(&g.adjoint(&y)) - x.killing(&y)).abs()
        })))
    });
    r.check("jacobi", "[X,[Y,Z]] + [Y,[Z,X]] + [Z,[X,Y]] = 0", 1e-13, |r| {
        Ok(worst((0..PROBES).map(|_| {
            let (x, y, z) = (r.element(), r.element(), r.element());
            (x.bracket(&y.bracket(&z)) + y.bracket(&z.bracket(&x)) + z.bracket(&x.bracket(&y))).norm()
        })))
    });
    r.check("exponential_unitarity", "exp maps su(n) into SU(n)", 1e-12, |r| {
        Ok(worst((0..PROBES).map(|_| exponential(&r.element()).unitarity_defect())))
    });
    r.check("invariant_polynomial_ad_invariance", "f(Ad(g)X, Ad(g)Y) = f(X, Y)", 1e-12, |r| {
        let f = InvariantPolynomial::pontryagin();
        try_worst((0..PROBES).map(|_| {
            let g = r.sampler.group_element(r.rank(), 1.0);
            let (x, y) = (r.element(), r.element());
            let moved = eval_invariant_polynomial(&f, &[&g.adjoint(&x), &g.adjoint(&y)])?;
            Ok((moved - eval_invariant_polynomial(&f, &[&x, &y])?).abs())
        }))
    });
}

fn loops(r: &mut Runner) {
    r.check("derivative_integrates_to_zero", "∫∂ξ dθ = 0", 1e-12, |r| {
        Ok(worst((0..PROBES).map(|_| circle_integral(&loop_derivative(&r.algebra_loop())).norm())))
    });
    r.check("rotation_action", "ρ_a ρ_b = ρ_{a+b}", 1e-12, |r| {
        Ok(worst((0..PROBES).map(|_| {
            let xi = r.algebra_loop();
            let (a, b) = (r.sampler.uniform(-3.0, 3.0), r.sampler.uniform(-3.0, 3.0));
            rotate(a, &rotate(b, &xi)).difference(&rotate(a + b, &xi)).magnitude()
        })))
    });
    r.check("z_cocycle", "Z(γ₁γ₂) = Z(γ₁) + Ad(γ₁)Z(γ₂)", 1e-9, |r| {
        Ok(worst((0..PROBES).map(|_| {
            let (g1, g2) = (r.sampler.group_loop(r.shape), r.sampler.group_loop(r.shape));
            let mut rhs = z_map(&g1);
            rhs.add_scaled(&g1.adjoint(&z_map(&g2)), 1.0);
            z_map(&g1.product(&g2)).difference(&rhs).magnitude()
        })))
    });
    r.check("holonomy_round_trip", "Φ(hol(ξ)) = ξ", 1e-8, |r| {
        Ok(worst((0..PROBES).map(|_| {
            let xi = r.algebra_loop();
            pf_higgs(&PathPoint::from_higgs(&xi)).difference(&xi).magnitude()
        })))
    });
}

fn forms(r: &mut Runner) {
    r.check("d_squared", "d² = 0", 1e-6, |r| {
        let scheme = r.scheme();
        let omega = r.sampler.scalar_one_form(4, 0.8);
        let dd = exterior_derivative_with(&exterior_derivative_with(&omega, scheme)?, scheme)?;
        Ok(worst((0..PROBES).map(|_| dd.at(&r.sampler.point(4, 0.7)).magnitude())))
    });
    r.check("pullback_commutes_with_d", "d f*ω = f*dω", 1e-6, |r| {
        let scheme = r.scheme();
        let omega = r.sampler.scalar_one_form(3, 0.8);
        let (a, b) = (r.sampler.point(3, 1.0), r.sampler.point(3, 1.0));
        let map = ChartMap::new(2, 3, move |u| (0..3).map(|i| (a[i] * u[0]).sin() + b[i] * u[0] * u[1]).collect());
        let lhs = exterior_derivative_with(&pullback(&omega, &map, scheme)?, scheme)?;
        let rhs = pullback(&exterior_derivative_with(&omega, scheme)?, &map, scheme)?;
        Ok(worst((0..PROBES).map(|_| {
            let u = r.sampler.point(2, 0.7);
            lhs.at(&u).difference(&rhs.at(&u)).magnitude()
        })))
    });
    r.check("pure_gauge_flatness", "F = 0 for A = σ⁻¹dσ", 1e-6, |r| {
        let n = r.samples();
        let zero = Loop::<AlgebraElement>::zero(n, r.rank())?;
        let connection = FormField::constant(FormValue::from_fn(3, 1, |_| zero.clone()));
        let phi = r.algebra_loop();
        let higgs = FormField::constant(FormValue::from_fn(3, 0, |_| phi.clone()));
        let flat = LGConnectionData::new(connection, higgs)?.with_differentiation(r.scheme());
        let gauged = gauge_transform_lg(&flat, r.sampler.loop_gauge(3, r.shape))?;
        let curvature = curvature_lg(&gauged)?.curvature;
        Ok(worst((0..PROBES).map(|_| curvature.at(&r.sampler.point(3, 0.7)).magnitude())))
    });
}

fn string(r: &mut Runner) {
    r.check("closed_k2", "d s₃ = 0", 1e-5, |r| {
        let c = r.lg(4);
        let d = exterior_derivative_with(&string_form_lg(&c)?, r.scheme())?;
        Ok(d.at(&r.sampler.point(4, 0.5)).magnitude())
    });
    if r.rank() >= 3 {
        // the cubic invariant vanishes identically on su(2)
        r.check("closed_k3", "d s₅ = 0", 1e-5, |r| {
            let c = r.lg(6);
            let d = exterior_derivative_with(&higher_string_form(&InvariantPolynomial::new(3, 1.0)?, 3, &c)?, r.scheme())?;
            Ok(d.at(&r.sampler.point(6, 0.5)).magnitude())
        });
    }
    r.check("gauge_invariance", "s(c·σ) = s(c)", 1e-5, |r| {
        let c = r.lg(3);
        let gauged = gauge_transform_lg(&c, r.sampler.loop_gauge(3, r.shape))?;
        let (s0, s1) = (string_form_lg(&c)?, string_form_lg(&gauged)?);
        Ok(worst((0..PROBES).map(|_| {
            let p = r.sampler.point(3, 0.5);
            s0.at(&p).difference(&s1.at(&p)).magnitude()
        })))
    });
    r.check("independence", "s(c₁) − s(c₀) = dψ", 1e-4, |r| {
        let (c0, c1) = (r.lg(3), r.lg(3));
        let psi = independence_homotopy_form(&InvariantPolynomial::pontryagin(), 2, &c0, &c1, 16)?;
        let d_psi = exterior_derivative_with(&psi, r.scheme())?;
        let (s0, s1) = (string_form_lg(&c0)?, string_form_lg(&c1)?);
        Ok(worst((0..PROBES).map(|_| {
            let p = r.sampler.point(3, 0.5);
            d_psi.at(&p).difference(&s1.at(&p).difference(&s0.at(&p))).magnitude()
        })))
    });
    r.check("covariant_higgs_derivative", "D∇Φ = [F, Φ] − ∂F", 1e-4, |r| {
        let c = r.lg(3);
        let outer = r.scheme();
        try_worst((0..PROBES).map(|_| covariant_higgs_derivative_residual(&c, &r.sampler.point(3, 0.5), outer)))
    });
}

fn caloron(r: &mut Runner) {
    fn probes(r: &mut Runner, chart: &ExtendedChart) -> Vec<Vec<f64>> {
        (0..PROBES).map(|_| chart.point(&r.sampler.point(chart.base_dim(), 0.5), &r.sampler.point(chart.group_dim(), 0.3))).collect()
    }
    r.check("transport_lg", "F̃ = Ad(g⁻¹)(F + ∇Φ∧dθ)", 1e-4, |r| {
        let c = r.lg(3);
        let chart = ExtendedChart::new(3, r.sampler.group_element(r.rank(), 1.0));
        let ps = probes(r, &chart);
        g_curvature_transport_check(&c, &chart, &ps, r.step())
    });
    r.check("transport_lgxs1", "F̃ = Ad(g⁻¹)(F + fΦ + ∇Φ∧(a + dθ))", 1e-4, |r| {
        let c = r.lgxs1(3);
        let chart = ExtendedChart::new(3, r.sampler.group_element(r.rank(), 1.0));
        let ps = probes(r, &chart);
        g_curvature_transport_check_twisted(&c, &chart, &ps, r.step())
    });
    r.check("fiber_integral_lg", "∫ p₁(F̃) = s", 1e-4, |r| {
        let c = r.lg(3);
        let chart = ExtendedChart::new(3, r.sampler.group_element(r.rank(), 1.0));
        let (fiber, string) = (pontrjagyn_fiber_integral(&c, &chart)?, string_form_lg(&c)?);
        Ok(worst((0..PROBES).map(|_| {
            let p = r.sampler.point(3, 0.5);
            fiber.at(&p).difference(&string.at(&p)).magnitude()
        })))
    });
    r.check("fiber_integral_lgxs1", "∫ p₁(F̃) = s, twisted", 1e-4, |r| {
        let c = r.lgxs1(3);
        let chart = ExtendedChart::new(3, r.sampler.group_element(r.rank(), 1.0));
        let (fiber, string) = (pontrjagyn_fiber_integral_twisted(&c, &chart)?, string_form_lgxs1(&c)?);
        Ok(worst((0..PROBES).map(|_| {
            let p = r.sampler.point(3, 0.5);
            fiber.at(&p).difference(&string.at(&p)).magnitude()
        })))
    });
}

fn pathfib(r: &mut Runner) {
    r.check("coefficient_identity", "k Σ C(k−1,i)(−1)^i/(k+i) = k!(k−1)!/(2k−1)!, k ≤ 20, unequal rows", 0.0, |_| {
        let rows = (1..=20).map(coefficient_identity).collect::<loopforms::Result<Vec<_>>>()?;
        Ok(rows.iter().filter(|row| !row.equal).count() as f64)
    });
    r.check("generator", "string class of the path fibration = (1/48π²)⟨Θ, [Θ, Θ]⟩", 1e-8, |r| {
        let cutoff = default_cutoff(r.samples())?;
        try_worst((0..PROBES).map(|_| {
            let p = PathPoint::from_higgs(&r.algebra_loop());
            let frame = [r.element(), r.element(), r.element()];
            Ok(pf_string_class_vs_generator(&p, &frame, &cutoff)?.residual)
        }))
    });
    r.check("cutoff_independence", "string class unchanged under a sharper cutoff", 1e-8, |r| {
        let (soft, sharp) = (default_cutoff(r.samples())?, CutoffFunction::with_sharpness(r.samples(), 2.0)?);
        try_worst((0..PROBES).map(|_| {
            let p = PathPoint::from_higgs(&r.algebra_loop());
            let frame = [r.element(), r.element(), r.element()];
            Ok((pf_string_class_vs_generator(&p, &frame, &soft)?.lhs - pf_string_class_vs_generator(&p, &frame, &sharp)?.lhs).abs())
        }))
    });
    r.check("nabla_phi_consistency", "∇Φ = ∂α Ad(p⁻¹)V", 1e-6, |r| {
        let cutoff = CutoffFunction::with_sharpness(r.samples(), 8.0)?;
        let (phi, psi) = (r.algebra_loop(), r.algebra_loop());
        pf_nabla_phi_consistency(&phi, &psi, &cutoff, r.step())
    });
    r.check("curvature_structure", "F = dA + ½[A, A]", 1e-6, |r| {
        let cutoff = CutoffFunction::with_sharpness(r.samples(), 8.0)?;
        let (phi, psi1, psi2) = (r.algebra_loop(), r.algebra_loop(), r.algebra_loop());
        pf_curvature_structure_residual(&phi, (&psi1, &psi2), &cutoff, 10.0 * r.step())
    });
    r.check("higher_string_k2", "k∫f(∇Φ, F) = τ(f), k = 2", 1e-6, |r| {
        let f = InvariantPolynomial::pontryagin();
        let p = PathPoint::from_higgs(&r.algebra_loop());
        let frame = [r.element(), r.element(), r.element()];
        Ok((pf_higher_string_value(&f, 2, &p, &frame, &default_cutoff(r.samples())?)? - transgression_tau(&f, 2, &frame)?).abs())
    });
}

fn centralext(r: &mut Runner) {
    let step = r.step();
    r.check("d_alpha_delta_r_lg", "dα = δR on LG", 1e-5, |r| {
        try_worst((0..PROBES).map(|_| {
            let point = [r.sampler.group_loop(r.shape), r.sampler.group_loop(r.shape)];
            let (x, y) = (vec![r.algebra_loop(), r.algebra_loop()], vec![r.algebra_loop(), r.algebra_loop()]);
            d_alpha_minus_delta_r(&alpha_lg(), &r_form_lg(), &point, &x, &y, step)
        }))
    });
    r.check("d_alpha_delta_r_lgxs1", "dα = δR on LG⋊S¹", 1e-5, |r| {
        try_worst((0..PROBES).map(|_| {
            let point = [r.sampler.semidirect_element(r.shape), r.sampler.semidirect_element(r.shape)];
            let x = vec![r.semidirect_tangent(), r.semidirect_tangent()];
            let y = vec![r.semidirect_tangent(), r.semidirect_tangent()];
            d_alpha_minus_delta_r(&alpha_lgxs1(), &r_form_lgxs1(), &point, &x, &y, step)
        }))
    });
    r.check("delta_alpha_lg", "δα = 0 on LG", 1e-6, |r| {
        try_worst((0..PROBES).map(|_| {
            let point: [Loop<GroupElement>; 3] = std::array::from_fn(|_| r.sampler.group_loop(r.shape));
            let tangent = vec![r.algebra_loop(), r.algebra_loop(), r.algebra_loop()];
            verify_delta_alpha_zero(&alpha_lg(), &point, &tangent, step)
        }))
    });
    r.check("delta_alpha_lgxs1", "δα = 0 on LG⋊S¹", 1e-6, |r| {
        try_worst((0..PROBES).map(|_| {
            let point: [SemiDirectGroupElement; 3] = std::array::from_fn(|_| r.sampler.semidirect_element(r.shape));
            let tangent = vec![r.semidirect_tangent(), r.semidirect_tangent(), r.semidirect_tangent()];
            verify_delta_alpha_zero(&alpha_lgxs1(), &point, &tangent, step)
        }))
    });
    r.check("delta_epsilon_lg", "δε = τ*α on LG", 1e-5, |r| {
        let c = r.lg(3);
        let (t12, t23) = (r.sampler.loop_gauge(3, r.shape), r.sampler.loop_gauge(3, r.shape));
        try_worst((0..PROBES).map(|_| {
            let (p, dir) = (r.sampler.point(3, 0.5), r.sampler.point(3, 1.0));
            verify_delta_epsilon_lg(&c, &t12, &t23, &p, &dir, step)
        }))
    });
    r.check("delta_epsilon_lgxs1", "δε = τ*α on LG⋊S¹", 1e-5, |r| {
        let c = r.lgxs1(3);
        let (t12, t23) = (r.sampler.semidirect_gauge(3, r.shape), r.sampler.semidirect_gauge(3, r.shape));
        try_worst((0..PROBES).map(|_| {
            let (p, dir) = (r.sampler.point(3, 0.5), r.sampler.point(3, 1.0));
            verify_delta_epsilon_lgxs1(&c, &t12, &t23, &p, &dir, step)
        }))
    });
    r.check("gomi_curving", "½ω(A, A) + ℓ(Φ, F) = direct curving", 1e-6, |r| {
        let c = r.lgxs1(3);
        let (gomi, direct) = (gomi_curving(&c)?, curving_direct_lgxs1(&c)?);
        Ok(worst((0..PROBES).map(|_| {
            let p = r.sampler.point(3, 0.5);
            gomi.at(&p).difference(&direct.at(&p)).magnitude()
        })))
    });
    r.check("splitting_transformation", "ℓ(Φ, ξ) = ℓ(Φ·g, ad(g)⁻¹ξ) + σ(g⁻¹, ξ)", 1e-6, |r| {
        try_worst((0..PROBES).map(|_| {
            let higgs = r.algebra_loop();
            let g = r.sampler.semidirect_element(r.shape);
            let v = r.semidirect_tangent();
            splitting_transformation_residual(&higgs, &g, &v)
        }))
    });
    let mut lg_descent = None;
    r.check("descent_lg", "dB = 2π s on LG", 1e-4, |r| {
        let c = r.lg(3);
        let sigma = r.sampler.loop_gauge(3, r.shape);
        let residual = three_curvature_descent_check_lg(&c, sigma, &r.sampler.point(3, 0.5), r.scheme())?;
        lg_descent = Some(residual.gauge);
        Ok(residual.descent)
    });
    r.check("descent_gauge_lg", "dB is gauge invariant on LG", 1e-4, |_| Ok(lg_descent.unwrap_or(f64::NAN)));
    let mut sd_descent = None;
    r.check("descent_lgxs1", "dB = 2π s on LG⋊S¹", 1e-4, |r| {
        let c = r.lgxs1(3);
        let sigma = r.sampler.semidirect_gauge(3, r.shape);
        let residual = three_curvature_descent_check_lgxs1(&c, sigma, &r.sampler.point(3, 0.5), r.scheme())?;
        sd_descent = Some(residual.gauge);
        Ok(residual.descent)
    });
    r.check("descent_gauge_lgxs1", "dB is gauge invariant on LG⋊S¹", 1e-4, |_| Ok(sd_descent.unwrap_or(f64::NAN)));
}
