use std::f64::consts::PI;

use loopforms::caloron::*;
use loopforms::connections::*;
use loopforms::formscalc::*;
use loopforms::liecore::{AlgebraElement, InvariantPolynomial};
use loopforms::loopspace::Loop;
use loopforms::sampling::{LoopShape, Sampler};

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

fn probes(s: &mut Sampler, chart: &ExtendedChart, count: usize) -> Vec<Vec<f64>> {
    (0..count).map(|_| chart.point(&s.point(chart.base_dim(), 0.5), &s.point(chart.group_dim(), 0.3))).collect()
}

fn zero_data(dim: usize) -> LGConnectionData {
    let zero = Loop::<AlgebraElement>::zero(32, 2).unwrap();
    let z = zero.clone();
    LGConnectionData::new(
        FormField::constant(FormValue::from_fn(dim, 1, |_| z.clone())),
        FormField::constant(FormValue::from_fn(dim, 0, |_| zero.clone())),
    )
    .unwrap()
    .with_differentiation(scheme())
}

#[test]
fn maurer_cartan_only_for_trivial_data() {
    let chart = ExtendedChart::at_identity(2, 2);
    let field = to_g_connection(&zero_data(2), &chart).unwrap();
    let mut s = Sampler::new(1);
    for p in probes(&mut s, &chart, 3) {
        let value = field.form.at(&p);
        assert!(value.components()[..3].iter().all(|c| c.magnitude() == 0.0));
        let theta = chart.maurer_cartan(&p[3..]);
        for (got, want) in value.components()[3..].iter().zip(&theta) {
            assert!(got.difference(&Loop::constant(32, want.clone()).unwrap()).magnitude() < 1e-15);
        }
        assert!(field.curvature(scheme()).unwrap().at(&p).magnitude() < 1e-8);
    }
}

#[test]
fn maurer_cartan_matches_a_difference_quotient() {
    let mut s = Sampler::new(2);
    let chart = ExtendedChart::new(1, s.group_element(2, 1.0));
    let u = s.point(3, 0.4);
    let theta = chart.maurer_cartan(&u);
    let h = 1e-6;
    for a in 0..3 {
        let (mut up, mut down) = (u.clone(), u.clone());
        up[a] += h;
        down[a] -= h;
        let dg = (chart.group_at(&up).matrix() - chart.group_at(&down).matrix()) / num_complex::Complex64::new(2.0 * h, 0.0);
        let oracle = AlgebraElement::project(&(chart.group_at(&u).inverse().matrix() * dg));
        assert!((&theta[a] - &oracle).norm() < 1e-8);
    }
}

#[test]
fn readout_at_identity_gives_higgs_and_connection() {
    let mut s = Sampler::new(3);
    let c = lg(&mut s, 3);
    let chart = ExtendedChart::at_identity(3, 2);
    let field = to_g_connection(&c, &chart).unwrap();
    let x = s.point(3, 0.5);
    let value = field.form.at(&chart.point(&x, &[0.0; 3]));
    let higgs = c.higgs.coefficient(&x, &[]);
    assert!(value.components()[3].difference(&higgs).magnitude() < 1e-15);
    for i in 0..3 {
        assert!(value.components()[i].difference(&c.connection.coefficient(&x, &[i])).magnitude() < 1e-15);
    }
}

#[test]
fn round_trip_recovers_the_data() {
    let mut s = Sampler::new(4);
    let c = lg(&mut s, 3);
    for chart in [ExtendedChart::at_identity(3, 2), ExtendedChart::new(3, s.group_element(2, 1.0))] {
        let back = from_g_connection(&to_g_connection(&c, &chart).unwrap());
        let x = s.point(3, 0.5);
        assert!(back.connection.at(&x).difference(&c.connection.at(&x)).magnitude() < 1e-10);
        assert!(back.higgs.at(&x).difference(&c.higgs.at(&x)).magnitude() < 1e-10);
    }
}

#[test]
fn pure_theta_component_reads_as_higgs() {
    let mut s = Sampler::new(5);
    let xi = s.algebra_loop(shape());
    let chart = ExtendedChart::at_identity(2, 2);
    let base = to_g_connection(&zero_data(2), &chart).unwrap();
    let (x, form) = (xi.clone(), base.form.clone());
    let with_theta = GConnectionField {
        chart: chart.clone(),
        form: FormField::new(chart.dim(), 1, move |p| {
            let mut v = form.at(p);
            *v.component_mut(&[2]) = x.clone();
            v
        }),
    };
    let back = from_g_connection(&with_theta);
    assert!(back.higgs.at(&[0.3, 0.1]).components()[0].difference(&xi).magnitude() < 1e-15);
    assert!(back.connection.at(&[0.3, 0.1]).magnitude() < 1e-15);
    let trivial = from_g_connection(&base);
    assert!(trivial.higgs.at(&[0.3, 0.1]).magnitude() < 1e-15);
}

#[test]
fn transport_check_on_flat_input() {
    let mut s = Sampler::new(6);
    let chart = ExtendedChart::at_identity(3, 2);
    let flat = gauge_transform_lg(&zero_data(3), s.loop_gauge(3, shape())).unwrap();
    let ps = probes(&mut s, &chart, 3);
    assert!(g_curvature_transport_check(&flat, &chart, &ps, 1e-4).unwrap() < 1e-6);
}

#[test]
fn transport_check_on_random_data() {
    let mut s = Sampler::new(7);
    let c = lg(&mut s, 3);
    for chart in [ExtendedChart::at_identity(3, 2), ExtendedChart::new(3, s.group_element(2, 1.0))] {
        let ps = probes(&mut s, &chart, 3);
        let r = g_curvature_transport_check(&c, &chart, &ps, 1e-4).unwrap();
        assert!(r < 1e-4, "{r}");
    }
}

#[test]
fn transport_residual_is_second_order() {
    let mut s = Sampler::new(8);
    let c = lg(&mut s, 3);
    let chart = ExtendedChart::at_identity(3, 2);
    let ps = probes(&mut s, &chart, 2);
    let coarse = g_curvature_transport_check(&c, &chart, &ps, 2e-3).unwrap();
    let fine = g_curvature_transport_check(&c, &chart, &ps, 1e-3).unwrap();
    let ratio = coarse / fine;
    assert!((3.0..5.0).contains(&ratio), "{coarse} / {fine} = {ratio}");
}

#[test]
fn transport_check_rejects_wrong_probe_dimension() {
    let c = zero_data(3);
    let chart = ExtendedChart::at_identity(3, 2);
    assert!(g_curvature_transport_check(&c, &chart, &[vec![0.0; 3]], 1e-4).is_err());
}

#[test]
fn fiber_integral_of_flat_data_vanishes() {
    let mut s = Sampler::new(9);
    let chart = ExtendedChart::at_identity(3, 2);
    let flat = gauge_transform_lg(&zero_data(3), s.loop_gauge(3, shape())).unwrap();
    assert!(pontrjagyn_fiber_integral(&flat, &chart).unwrap().at(&s.point(3, 0.5)).magnitude() < 1e-8);
}

#[test]
fn fiber_integral_equals_string_form() {
    let mut s = Sampler::new(10);
    let c = lg(&mut s, 3);
    let chart = ExtendedChart::at_identity(3, 2);
    let p = s.point(3, 0.5);
    let fiber = pontrjagyn_fiber_integral(&c, &chart).unwrap().at(&p);
    let string = string_form_lg(&c).unwrap().at(&p);
    assert!(fiber.difference(&string).magnitude() < 1e-4);
}

#[test]
fn doubling_the_normalization_doubles_the_integral() {
    let mut s = Sampler::new(11);
    let c = lg(&mut s, 3);
    let chart = ExtendedChart::at_identity(3, 2);
    let field = to_g_connection(&c, &chart).unwrap();
    let p = s.point(3, 0.5);
    let single = chern_weil_fiber_integral(&InvariantPolynomial::pontryagin(), &field, scheme()).unwrap().at(&p);
    let double = chern_weil_fiber_integral(&InvariantPolynomial::pontryagin().scaled(2.0), &field, scheme()).unwrap().at(&p);
    assert!(double.difference(&single.scaled(2.0)).magnitude() < 1e-15);
}

#[test]
fn fiber_integral_needs_enough_base_directions() {
    let chart = ExtendedChart::at_identity(2, 2);
    assert!(pontrjagyn_fiber_integral(&zero_data(2), &chart).is_err());
}

#[test]
fn twisted_connection_without_circle_part_reduces() {
    let mut s = Sampler::new(12);
    let c = lg(&mut s, 3);
    let chart = ExtendedChart::new(3, s.group_element(2, 1.0));
    let plain = to_g_connection(&c, &chart).unwrap();
    let twisted = to_g_connection_twisted(&c.untwisted(), &chart).unwrap();
    for p in probes(&mut s, &chart, 2) {
        assert!(plain.form.at(&p).difference(&twisted.form.at(&p)).magnitude() < 1e-15);
    }
    let ps = probes(&mut s, &chart, 2);
    let r_plain = g_curvature_transport_check(&c, &chart, &ps, 1e-4).unwrap();
    let r_twisted = g_curvature_transport_check_twisted(&c.untwisted(), &chart, &ps, 1e-4).unwrap();
    assert!((r_plain - r_twisted).abs() < 1e-12);
    let x = s.point(3, 0.5);
    let fp = pontrjagyn_fiber_integral(&c, &chart).unwrap().at(&x);
    let ft = pontrjagyn_fiber_integral_twisted(&c.untwisted(), &chart).unwrap().at(&x);
    assert!(fp.difference(&ft).magnitude() < 1e-14);
}

#[test]
fn twisted_readouts() {
    let mut s = Sampler::new(13);
    let c = lgxs1(&mut s, 3);
    let chart = ExtendedChart::at_identity(3, 2);
    let field = to_g_connection_twisted(&c, &chart).unwrap();
    let x = s.point(3, 0.5);
    let value = field.form.at(&chart.point(&x, &[0.0; 3]));
    let higgs = c.higgs.coefficient(&x, &[]);
    assert!(value.components()[3].difference(&higgs).magnitude() < 1e-15);
    for i in 0..3 {
        let mut expected = c.connection.coefficient(&x, &[i]);
        expected.add_scaled(&higgs, c.circle.coefficient(&x, &[i]));
        assert!(value.components()[i].difference(&expected).magnitude() < 1e-14);
    }
}

#[test]
fn twisted_transport_on_random_data() {
    let mut s = Sampler::new(14);
    let c = lgxs1(&mut s, 3);
    let chart = ExtendedChart::new(3, s.group_element(2, 1.0));
    let ps = probes(&mut s, &chart, 3);
    let r = g_curvature_transport_check_twisted(&c, &chart, &ps, 1e-4).unwrap();
    assert!(r < 1e-4, "{r}");
}

#[test]
fn twisted_curvature_with_only_circle_part() {
    // A = 0 and Φ constant: F̃ on base pairs is Ad(g⁻¹)(fΦ) and nothing else survives
    let mut s = Sampler::new(15);
    let x = s.algebra_element(2, 1.0);
    let zero = Loop::<AlgebraElement>::zero(32, 2).unwrap();
    let phi = Loop::constant(32, x).unwrap();
    let (z, ph) = (zero.clone(), phi.clone());
    let c = LGxS1ConnectionData::new(
        FormField::constant(FormValue::from_fn(2, 1, |_| z.clone())),
        s.scalar_one_form(2, 0.8),
        FormField::constant(FormValue::from_fn(2, 0, |_| ph.clone())),
    )
    .unwrap()
    .with_differentiation(scheme());
    let chart = ExtendedChart::at_identity(2, 2);
    let field = to_g_connection_twisted(&c, &chart).unwrap();
    let p = chart.point(&[0.2, -0.3], &[0.0; 3]);
    let curvature = field.curvature(scheme()).unwrap().at(&p);
    let f = curvature_lgxs1(&c).unwrap().circle.unwrap().coefficient(&[0.2, -0.3], &[0, 1]);
    assert!(curvature.component(&[0, 1]).difference(&phi.scaled(f)).magnitude() < 1e-8);
    assert!(curvature.component(&[0, 2]).magnitude() < 1e-8);
    let ps = vec![p];
    assert!(g_curvature_transport_check_twisted(&c, &chart, &ps, 1e-4).unwrap() < 1e-6);
}

#[test]
fn twisted_fiber_integral_equals_twisted_string_form() {
    let mut s = Sampler::new(16);
    let c = lgxs1(&mut s, 3);
    let chart = ExtendedChart::at_identity(3, 2);
    let p = s.point(3, 0.5);
    let fiber = pontrjagyn_fiber_integral_twisted(&c, &chart).unwrap().at(&p);
    let string = string_form_lgxs1(&c).unwrap().at(&p);
    assert!(fiber.difference(&string).magnitude() < 1e-4);
}

#[test]
fn twisted_fiber_integral_of_flat_data_vanishes() {
    let zero = Loop::<AlgebraElement>::zero(32, 2).unwrap();
    let z = zero.clone();
    let c = LGxS1ConnectionData::new(
        FormField::constant(FormValue::from_fn(3, 1, |_| z.clone())),
        FormField::constant(FormValue::from_fn(3, 1, |_| 0.0)),
        FormField::constant(FormValue::from_fn(3, 0, |_| zero.clone())),
    )
    .unwrap();
    let chart = ExtendedChart::at_identity(3, 2);
    assert_eq!(pontrjagyn_fiber_integral_twisted(&c, &chart).unwrap().at(&[0.1, 0.2, 0.3]).magnitude(), 0.0);
}

#[test]
fn theta_independent_data_shadow() {
    // data constant along the loop: the string form reduces to the Pontryagin form of a
    // G-connection pulled back through evaluation, integrated trivially over the circle
    let mut s = Sampler::new(17);
    let dirs: Vec<(AlgebraElement, Vec<f64>)> = (0..4).map(|_| (s.algebra_element(2, 0.6), s.point(3, 1.0))).collect();
    let field = move |p: &[f64], k: usize| {
        let (x, w) = &dirs[k];
        let phase: f64 = w.iter().zip(p).map(|(a, b)| a * b).sum();
        Loop::constant(32, x.scale(phase.sin())).unwrap()
    };
    let f1 = field.clone();
    let a = FormField::new(3, 1, move |p| FormValue::from_fn(3, 1, |t| f1(p, t[0])));
    let higgs = FormField::new(3, 0, move |p| FormValue::from_fn(3, 0, |_| field(p, 3)));
    let c = LGConnectionData::new(a, higgs).unwrap().with_differentiation(scheme());
    let chart = ExtendedChart::at_identity(3, 2);
    let ps = probes(&mut s, &chart, 3);
    assert!(g_curvature_transport_check(&c, &chart, &ps, 1e-4).unwrap() < 1e-5);
    let p = s.point(3, 0.5);
    let fiber = pontrjagyn_fiber_integral(&c, &chart).unwrap().at(&p);
    let string = string_form_lg(&c).unwrap().at(&p);
    assert!(fiber.difference(&string).magnitude() < 1e-5);
    // with constant loops the integral is 2π times the pointwise value
    let local = curvature_lg(&c).unwrap().curvature.at(&p);
    let nabla = covariant_higgs_lg(&c).unwrap().at(&p);
    let pointwise = local.map(|l| l.samples()[0].clone()).wedge_pair(&nabla.map(|l| l.samples()[0].clone()));
    assert!((string.components()[0] + 2.0 * PI * pointwise.components()[0] / (4.0 * PI * PI)).abs() < 1e-12);
}
