use std::f64::consts::PI;
use std::sync::Arc;

use loopforms::connections::*;
use loopforms::formscalc::*;
use loopforms::liecore::{AlgebraElement, InvariantPolynomial};
use loopforms::loopspace::{loop_derivative, Loop};
use loopforms::sampling::{LoopShape, Sampler};
use loopforms::Error;

fn shape() -> LoopShape {
    LoopShape::new(32, 2, 3, 0.6).unwrap()
}

fn scheme() -> Differentiation {
    Differentiation::extrapolated(1e-3)
}

fn lg(s: &mut Sampler, dim: usize) -> LGConnectionData {
    s.lg_connection(dim, shape()).with_differentiation(scheme())
}

fn lgxs1(s: &mut Sampler, dim: usize) -> LGxS1ConnectionData {
    s.lgxs1_connection(dim, shape()).with_differentiation(scheme())
}

fn zero_connection(dim: usize) -> LoopForm {
    FormField::constant(FormValue::from_fn(dim, 1, |_| Loop::<AlgebraElement>::zero(32, 2).unwrap()))
}

fn constant_higgs(dim: usize, phi: LoopAlgebra) -> LoopForm {
    FormField::constant(FormValue::from_fn(dim, 0, |_| phi.clone()))
}

/// Independent central difference of a loop-valued coefficient in coordinate i.
fn partial(f: &LoopForm, p: &[f64], tuple: &[usize], i: usize) -> LoopAlgebra {
    let h = 1e-5;
    let (mut a, mut b) = (p.to_vec(), p.to_vec());
    a[i] += h;
    b[i] -= h;
    f.coefficient(&a, tuple).difference(&f.coefficient(&b, tuple)).scaled(0.5 / h)
}

#[test]
fn zero_connection_has_zero_curvature() {
    let c = LGConnectionData::new(zero_connection(3), constant_higgs(3, Loop::zero(32, 2).unwrap())).unwrap();
    let f = curvature_lg(&c).unwrap();
    assert!(f.circle.is_none());
    assert_eq!(f.curvature.at(&[0.1, 0.2, 0.3]).magnitude(), 0.0);
}

#[test]
fn pure_gauge_connection_is_flat() {
    let mut s = Sampler::new(1);
    let phi = s.algebra_loop(shape());
    let c = LGConnectionData::new(zero_connection(3), constant_higgs(3, phi)).unwrap().with_differentiation(scheme());
    let gauged = gauge_transform_lg(&c, s.loop_gauge(3, shape())).unwrap();
    let f = curvature_lg(&gauged).unwrap().curvature;
    for _ in 0..3 {
        assert!(f.at(&s.point(3, 0.7)).magnitude() < 1e-6);
    }
}

#[test]
fn curvature_of_quadratic_coefficient() {
    let xi = Sampler::new(2).algebra_loop(shape());
    let x = xi.clone();
    let a = FormField::new(2, 1, move |p| FormValue::from_fn(2, 1, |t| if t[0] == 0 { x.scaled(p[1] * p[1]) } else { x.zero_like() }));
    let c = LGConnectionData::new(a.clone(), constant_higgs(2, xi.zero_like())).unwrap();
    let f = curvature_lg(&c).unwrap().curvature;
    for p in [[0.3, 0.8], [-1.0, -0.4]] {
        let value = evaluate(&f, &p, &[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(value.difference(&xi.scaled(-p[1])).magnitude() < 1e-9);
        // dense oracle: F₁₂ = ∂₁A₂ − ∂₂A₁
        let oracle = partial(&a, &p, &[1], 0).difference(&partial(&a, &p, &[0], 1));
        assert!(f.coefficient(&p, &[0, 1]).difference(&oracle).magnitude() < 1e-8);
    }
}

#[test]
fn covariant_higgs_of_constant_data_vanishes() {
    let mut s = Sampler::new(3);
    let x = s.algebra_element(2, 1.0);
    let c = LGConnectionData::new(zero_connection(3), constant_higgs(3, Loop::constant(32, x).unwrap())).unwrap();
    assert!(covariant_higgs_lg(&c).unwrap().at(&[0.2, 0.1, 0.0]).magnitude() < 1e-10);
}

#[test]
fn covariant_higgs_without_connection_is_gradient() {
    let mut s = Sampler::new(4);
    let higgs = s.loop_zero_form(3, shape());
    let c = LGConnectionData::new(zero_connection(3), higgs.clone()).unwrap().with_differentiation(scheme());
    let p = s.point(3, 0.5);
    let nabla = covariant_higgs_lg(&c).unwrap().at(&p);
    for i in 0..3 {
        assert!(nabla.components()[i].difference(&partial(&higgs, &p, &[], i)).magnitude() < 1e-8);
    }
}

/// A loop-valued field whose samples do not depend on θ.
fn theta_independent(s: &mut Sampler, dim: usize, degree: usize) -> LoopForm {
    let fields: Vec<_> = (0..loopforms::combinatorics::binomial(dim, degree))
        .map(|_| (s.algebra_element(2, 0.6), s.algebra_element(2, 0.6), s.point(dim, 1.0)))
        .collect();
    FormField::new(dim, degree, move |p| {
        FormValue::from_components(
            dim,
            degree,
            fields
                .iter()
                .map(|(a, b, k)| {
                    let phase: f64 = k.iter().zip(p).map(|(k, x)| k * x).sum();
                    Loop::constant(32, a.scale(phase.sin()) + b.scale(phase.cos())).unwrap()
                })
                .collect(),
        )
        .unwrap()
    })
}

#[test]
fn covariant_higgs_for_theta_independent_data() {
    let mut s = Sampler::new(5);
    let (a, higgs) = (theta_independent(&mut s, 3, 1), theta_independent(&mut s, 3, 0));
    let c = LGConnectionData::new(a.clone(), higgs.clone()).unwrap().with_differentiation(scheme());
    let p = s.point(3, 0.5);
    let nabla = covariant_higgs_lg(&c).unwrap().at(&p);
    let phi = higgs.coefficient(&p, &[]);
    for i in 0..3 {
        let mut oracle = partial(&higgs, &p, &[], i);
        oracle.add_scaled(&a.coefficient(&p, &[i]).bracket(&phi), 1.0);
        assert!(nabla.components()[i].difference(&oracle).magnitude() < 1e-8);
    }
}

#[test]
fn string_form_of_flat_data_with_parallel_higgs_vanishes() {
    let mut s = Sampler::new(6);
    let x = s.algebra_element(2, 1.0);
    let flat = LGConnectionData::new(zero_connection(3), constant_higgs(3, Loop::constant(32, x).unwrap())).unwrap().with_differentiation(scheme());
    let gauged = gauge_transform_lg(&flat, s.loop_gauge(3, shape())).unwrap();
    for c in [flat, gauged] {
        assert!(string_form_lg(&c).unwrap().at(&s.point(3, 0.5)).magnitude() < 1e-9);
    }
}

#[test]
fn string_form_is_the_quadratic_higher_form() {
    let mut s = Sampler::new(7);
    let c = lg(&mut s, 3);
    let p = s.point(3, 0.5);
    let string = string_form_lg(&c).unwrap().at(&p);
    let higher = higher_string_form(&InvariantPolynomial::pontryagin(), 2, &c).unwrap().at(&p);
    assert!(string.difference(&higher).magnitude() < 1e-14);
}

#[test]
fn string_form_matches_direct_integral() {
    let mut s = Sampler::new(8);
    let c = lg(&mut s, 3);
    let p = s.point(3, 0.5);
    let f = curvature_lg(&c).unwrap().curvature.at(&p);
    let nabla = covariant_higgs_lg(&c).unwrap().at(&p);
    // s₀₁₂ = −(1/4π²)∫(F₀₁·∇Φ₂ − F₀₂·∇Φ₁ + F₁₂·∇Φ₀)
    let term = |a: &[usize], b: usize| f.component(a).integrated_killing(&nabla.components()[b]);
    let oracle = -(term(&[0, 1], 2) - term(&[0, 2], 1) + term(&[1, 2], 0)) / (4.0 * PI * PI);
    let got = string_form_lg(&c).unwrap().at(&p).components()[0];
    assert!((got - oracle).abs() < 1e-13);
}

#[test]
fn higher_form_checks_degree_and_chart() {
    let mut s = Sampler::new(9);
    let c = lg(&mut s, 2);
    assert!(matches!(higher_string_form(&InvariantPolynomial::pontryagin(), 2, &c), Err(Error::Degree(_))));
    let c = lg(&mut s, 3);
    assert!(higher_string_form(&InvariantPolynomial::new(3, 1.0).unwrap(), 2, &c).is_err());
}

#[test]
fn linear_higher_form_vanishes_for_parallel_higgs() {
    let mut s = Sampler::new(10);
    let x = s.algebra_element(2, 1.0);
    let c = LGConnectionData::new(zero_connection(2), constant_higgs(2, Loop::constant(32, x).unwrap())).unwrap();
    let f = InvariantPolynomial::new(1, 1.0).unwrap();
    assert!(higher_string_form(&f, 1, &c).unwrap().at(&[0.1, 0.4]).magnitude() < 1e-12);
}

#[test]
fn closedness_of_linear_and_quadratic_forms() {
    let mut s = Sampler::new(11);
    for k in [1, 2] {
        let c = lg(&mut s, 2 * k);
        let f = InvariantPolynomial::new(k, 1.0).unwrap();
        let form = higher_string_form(&f, k, &c).unwrap();
        let d = exterior_derivative_with(&form, scheme()).unwrap();
        let r = d.at(&s.point(2 * k, 0.5)).magnitude();
        assert!(r < 1e-5, "k = {k}: {r}");
    }
}

#[test]
fn twisted_curvature_reduces_without_circle_part() {
    let mut s = Sampler::new(12);
    let c = lg(&mut s, 3);
    let p = s.point(3, 0.5);
    let plain = curvature_lg(&c).unwrap().curvature.at(&p);
    let twisted = curvature_lgxs1(&c.untwisted()).unwrap();
    assert!(plain.difference(&twisted.curvature.at(&p)).magnitude() < 1e-12);
    assert!(twisted.circle.unwrap().at(&p).magnitude() < 1e-12);
    let nabla = covariant_higgs_lg(&c).unwrap().at(&p);
    assert!(nabla.difference(&covariant_higgs_lgxs1(&c.untwisted()).unwrap().at(&p)).magnitude() < 1e-12);
    let string = string_form_lg(&c).unwrap().at(&p);
    assert!(string.difference(&string_form_lgxs1(&c.untwisted()).unwrap().at(&p)).magnitude() < 1e-12);
}

#[test]
fn twisted_curvature_of_theta_independent_connection() {
    let mut s = Sampler::new(13);
    let a = theta_independent(&mut s, 3, 1);
    let higgs = s.loop_zero_form(3, shape());
    let circle = s.scalar_one_form(3, 0.6);
    let twisted = LGxS1ConnectionData::new(a, circle, higgs).unwrap().with_differentiation(scheme());
    let p = s.point(3, 0.5);
    let plain = curvature_lg(&twisted.loop_part()).unwrap().curvature.at(&p);
    assert!(plain.difference(&curvature_lgxs1(&twisted).unwrap().curvature.at(&p)).magnitude() < 1e-12);
}

#[test]
fn twisted_curvature_and_higgs_match_term_by_term() {
    let mut s = Sampler::new(14);
    let c = lgxs1(&mut s, 3);
    let p = s.point(3, 0.5);
    let pair = curvature_lgxs1(&c).unwrap();
    let nabla = covariant_higgs_lgxs1(&c).unwrap().at(&p);
    let a = |i: usize| c.connection.coefficient(&p, &[i]);
    let circle = |i: usize| c.circle.coefficient(&p, &[i]);
    let phi = c.higgs.coefficient(&p, &[]);
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let mut oracle = partial(&c.connection, &p, &[j], i).difference(&partial(&c.connection, &p, &[i], j));
        oracle.add_scaled(&a(i).bracket(&a(j)), 1.0);
        oracle.add_scaled(&loop_derivative(&a(j)), -circle(i));
        oracle.add_scaled(&loop_derivative(&a(i)), circle(j));
        assert!(pair.curvature.coefficient(&p, &[i, j]).difference(&oracle).magnitude() < 1e-8);
        let h = 1e-5;
        let (mut u, mut v) = (p.clone(), p.clone());
        u[i] += h;
        v[i] -= h;
        let da = (c.circle.coefficient(&u, &[j]) - c.circle.coefficient(&v, &[j])) / (2.0 * h);
        let (mut u, mut v) = (p.clone(), p.clone());
        u[j] += h;
        v[j] -= h;
        let db = (c.circle.coefficient(&u, &[i]) - c.circle.coefficient(&v, &[i])) / (2.0 * h);
        let f = pair.circle.as_ref().unwrap().coefficient(&p, &[i, j]);
        assert!((f - (da - db)).abs() < 1e-8);
    }
    for i in 0..3 {
        let mut oracle = partial(&c.higgs, &p, &[], i);
        oracle.add_scaled(&a(i).bracket(&phi), 1.0);
        oracle.add_scaled(&loop_derivative(&a(i)), -1.0);
        oracle.add_scaled(&loop_derivative(&phi), -circle(i));
        assert!(nabla.components()[i].difference(&oracle).magnitude() < 1e-8);
    }
}

#[test]
fn twisted_higgs_for_theta_independent_field() {
    let mut s = Sampler::new(15);
    let higgs = theta_independent(&mut s, 3, 0);
    let a = s.loop_one_form(3, shape());
    let with_circle = LGxS1ConnectionData::new(a.clone(), s.scalar_one_form(3, 0.6), higgs.clone()).unwrap().with_differentiation(scheme());
    let p = s.point(3, 0.5);
    let plain = covariant_higgs_lg(&with_circle.loop_part()).unwrap().at(&p);
    assert!(plain.difference(&covariant_higgs_lgxs1(&with_circle).unwrap().at(&p)).magnitude() < 1e-12);
}

#[test]
fn twisted_string_form_of_flat_data_vanishes() {
    let mut s = Sampler::new(16);
    let x = s.algebra_element(2, 1.0);
    let zero_circle = FormField::constant(FormValue::from_fn(3, 1, |_| 0.0));
    let flat = LGxS1ConnectionData::new(zero_connection(3), zero_circle, constant_higgs(3, Loop::constant(32, x).unwrap())).unwrap();
    assert!(string_form_lgxs1(&flat).unwrap().at(&[0.3, 0.1, -0.2]).magnitude() < 1e-12);
}

#[test]
fn homotopy_form_between_equal_data_vanishes() {
    let mut s = Sampler::new(17);
    let c = lg(&mut s, 3);
    let psi = independence_homotopy_form(&InvariantPolynomial::pontryagin(), 2, &c, &c, 8).unwrap();
    assert!(psi.at(&s.point(3, 0.5)).magnitude() < 1e-14);
}

#[test]
fn homotopy_form_checks_quadrature_steps() {
    let mut s = Sampler::new(18);
    let c = lg(&mut s, 3);
    for steps in [6, 9] {
        assert!(matches!(
            independence_homotopy_form(&InvariantPolynomial::pontryagin(), 2, &c, &c, steps),
            Err(Error::Parameter(_))
        ));
    }
}

#[test]
fn homotopy_form_bounds_the_difference() {
    let mut s = Sampler::new(19);
    let (c0, c1) = (lg(&mut s, 3), lg(&mut s, 3));
    let f = InvariantPolynomial::pontryagin();
    let psi = independence_homotopy_form(&f, 2, &c0, &c1, 16).unwrap();
    let d_psi = exterior_derivative_with(&psi, scheme()).unwrap();
    let p = s.point(3, 0.5);
    let difference = string_form_lg(&c1).unwrap().at(&p).difference(&string_form_lg(&c0).unwrap().at(&p));
    assert!(d_psi.at(&p).difference(&difference).magnitude() < 1e-4);
}

#[test]
fn homotopy_form_is_linear_to_first_order() {
    let mut s = Sampler::new(20);
    let c0 = lg(&mut s, 3);
    let delta_a = s.loop_one_form(3, shape());
    let delta_phi = s.loop_zero_form(3, shape());
    let shifted = |eps: f64| {
        LGConnectionData::new(c0.connection.add(&delta_a.scaled(eps)).unwrap(), c0.higgs.add(&delta_phi.scaled(eps)).unwrap())
            .unwrap()
            .with_differentiation(scheme())
    };
    let f = InvariantPolynomial::pontryagin();
    let p = s.point(3, 0.5);
    let psi = |eps: f64| independence_homotopy_form(&f, 2, &c0, &shifted(eps), 8).unwrap().at(&p);
    let (small, half) = (psi(1e-3), psi(5e-4));
    // ψ = εL + O(ε²), so ψ(ε) − 2ψ(ε/2) is second order
    let nonlinear = small.difference(&half.scaled(2.0)).magnitude();
    assert!(nonlinear < 1e-2 * small.magnitude(), "{nonlinear} vs {}", small.magnitude());
}

#[test]
fn identity_gauge_leaves_data_unchanged() {
    let mut s = Sampler::new(21);
    let c = lg(&mut s, 3);
    let identity: LoopGauge = Arc::new(|_| Loop::constant(32, loopforms::liecore::GroupElement::identity(2)).unwrap());
    let same = gauge_transform_lg(&c, identity).unwrap();
    let p = s.point(3, 0.5);
    assert!(same.connection.at(&p).difference(&c.connection.at(&p)).magnitude() < 1e-14);
    assert!(same.higgs.at(&p).difference(&c.higgs.at(&p)).magnitude() < 1e-14);
}

#[test]
fn string_form_is_gauge_invariant() {
    let mut s = Sampler::new(22);
    let c = lg(&mut s, 3);
    let gauged = gauge_transform_lg(&c, s.loop_gauge(3, shape())).unwrap();
    let p = s.point(3, 0.5);
    let r = string_form_lg(&c).unwrap().at(&p).difference(&string_form_lg(&gauged).unwrap().at(&p)).magnitude();
    assert!(r < 1e-5, "{r}");
    let t = lgxs1(&mut s, 3);
    let t_gauged = gauge_transform_lgxs1(&t, s.semidirect_gauge(3, shape())).unwrap();
    let r = string_form_lgxs1(&t).unwrap().at(&p).difference(&string_form_lgxs1(&t_gauged).unwrap().at(&p)).magnitude();
    assert!(r < 1e-5, "{r}");
}

#[test]
fn curvature_transforms_by_adjoint() {
    let mut s = Sampler::new(23);
    let c = lg(&mut s, 3);
    let sigma = s.loop_gauge(3, shape());
    let gauged = gauge_transform_lg(&c, sigma.clone()).unwrap();
    let p = s.point(3, 0.5);
    let g_inv = sigma(&p).inverse();
    let expected = curvature_lg(&c).unwrap().curvature.at(&p).map(|f| g_inv.adjoint(f));
    assert!(curvature_lg(&gauged).unwrap().curvature.at(&p).difference(&expected).magnitude() < 1e-6);
}

#[test]
fn covariant_derivative_of_nabla_higgs() {
    let mut s = Sampler::new(24);
    let c = lg(&mut s, 3);
    let r = covariant_higgs_derivative_residual(&c, &s.point(3, 0.5), scheme()).unwrap();
    assert!(r < 1e-4, "{r}");
}

#[test]
fn connection_data_validates_degrees() {
    let mut s = Sampler::new(25);
    let a = s.loop_one_form(3, shape());
    assert!(matches!(LGConnectionData::new(a.clone(), a.clone()), Err(Error::Degree(_))));
    let higgs = s.loop_zero_form(2, shape());
    assert!(matches!(LGConnectionData::new(a.clone(), higgs), Err(Error::DimensionMismatch { .. })));
    let higgs = s.loop_zero_form(3, shape());
    assert!(LGxS1ConnectionData::new(a, s.scalar_one_form(2, 1.0), higgs).is_err());
}

mod properties {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(8))]

        #[test]
        fn reduction_chain_is_exact(seed in any::<u64>()) {
            let mut s = Sampler::new(seed);
            let c = lg(&mut s, 3);
            let p = s.point(3, 0.5);
            let plain = string_form_lg(&c).unwrap().at(&p);
            let twisted = string_form_lgxs1(&c.untwisted()).unwrap().at(&p);
            prop_assert!(plain.difference(&twisted).magnitude() < 1e-12);
        }

        #[test]
        fn string_form_gauge_invariance(seed in any::<u64>()) {
            let mut s = Sampler::new(seed);
            let c = lg(&mut s, 3);
            let gauged = gauge_transform_lg(&c, s.loop_gauge(3, shape())).unwrap();
            let p = s.point(3, 0.5);
            let r = string_form_lg(&c).unwrap().at(&p).difference(&string_form_lg(&gauged).unwrap().at(&p)).magnitude();
            prop_assert!(r < 1e-5);
        }

        #[test]
        fn quadratic_string_form_is_closed(seed in any::<u64>()) {
            let mut s = Sampler::new(seed);
            let c = lg(&mut s, 4);
            let d = exterior_derivative_with(&string_form_lg(&c).unwrap(), scheme()).unwrap();
            prop_assert!(d.at(&s.point(4, 0.5)).magnitude() < 1e-5);
        }
    }
}
