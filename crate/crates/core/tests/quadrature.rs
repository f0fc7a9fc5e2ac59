mod common;

use friedrichs_core::quadrature::{integrate_smooth, integrate_threshold, midpoint_rule, resolvent_integral};
use friedrichs_core::{epsilon, lambda_point, w1, Extremum, QuadratureConfig, TorusPoint, VFunction};
use proptest::prelude::*;

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn cos_half() -> VFunction {
    VFunction::new([([1, 0, 0], 1.0), ([0, 0, 0], 0.5)]).unwrap()
}

#[test]
fn watson_constant_closed_form() {
    let w = common::watson_closed_form();
    assert!((w - 1.516_386_059_151_978).abs() < 1e-13, "{w}");
}

#[test]
fn smooth_resolvent_matches_large_riemann_sum() {
    let v = VFunction::constant(1.0);
    let ours = resolvent_integral(&v, TorusPoint::ORIGIN, -1.0, &cfg()).unwrap();
    let brute = common::riemann(|t| 1.0 / (w1(TorusPoint::ORIGIN, t.into()) + 1.0), 400);
    assert!((ours.value - brute).abs() < 1e-6 * brute, "{} vs {brute}", ours.value);
    assert!(ours.converged);
}

#[test]
fn graded_mesh_oracle_agrees_with_ball_split_at_origin() {
    let oracle = common::graded_mesh(|t| 1.0 / epsilon(t.into()), [0.0; 3]);
    let exact = common::watson_inverse_epsilon();
    assert!((oracle - exact).abs() < 1e-6 * exact, "oracle {oracle} vs {exact}");
    let v = VFunction::constant(1.0);
    let ours = integrate_threshold(&v, TorusPoint::ORIGIN, TorusPoint::ORIGIN, Extremum::Min, &cfg()).unwrap();
    assert!((2.0 * ours.value - oracle).abs() < 1e-5 * oracle);
}

#[test]
fn graded_mesh_oracle_agrees_with_ball_split_at_lambda() {
    let v = VFunction::new([([0, 0, 0], 1.0), ([0, 1, 0], 0.3), ([2, 0, -1], -0.2)]).unwrap();
    for i in [1, 6] {
        let k = lambda_point(i).unwrap();
        let kc = k.coords();
        let oracle = common::graded_mesh(
            |t| {
                let d: f64 = (0..3).map(|j| 2.0 * (0.5 * (t[j] - kc[j])).sin().powi(2)).sum();
                v.eval(TorusPoint::new(t)).powi(2) / d
            },
            kc,
        );
        let ours = integrate_threshold(&v, k, k, Extremum::Max, &cfg()).unwrap();
        assert!((ours.value - oracle).abs() < 1e-5 * oracle, "i={i}: {} vs {oracle}", ours.value);
    }
}

#[test]
fn lambda_denominator_identity() {
    // 9 - ε(k+t) - ε(t) = Σ_j 2 sin²((t_j - k_j)/2) for k ∈ Λ
    let mut rng = common::rng(3);
    for i in 1..=8 {
        let k = lambda_point(i).unwrap();
        for _ in 0..100 {
            let t: [f64; 3] = std::array::from_fn(|_| rand::Rng::gen_range(&mut rng, -3.0..3.0));
            let kc = k.coords();
            let lhs = 9.0 - epsilon(k + t.into()) - epsilon(t.into());
            let rhs: f64 = (0..3).map(|j| 2.0 * (0.5 * (t[j] - kc[j])).sin().powi(2)).sum();
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }
}

#[test]
fn bounded_lambda_integrand_matches_smooth_rule() {
    let v = cos_half();
    let k = lambda_point(1).unwrap();
    let split = integrate_threshold(&v, k, k, Extremum::Max, &cfg()).unwrap();
    let f = |t: &[f64; 3]| {
        let t = TorusPoint::new(*t);
        v.eval(t).powi(2) / (9.0 - epsilon(k + t) - epsilon(t))
    };
    let plain = integrate_smooth(&f, &QuadratureConfig { target_rel_tol: 1e-7, ..cfg() });
    let plain = match plain {
        Ok(r) => r.value,
        Err(friedrichs_core::Error::NonConvergence { value, .. }) => value,
        Err(e) => panic!("{e}"),
    };
    assert!((split.value - plain).abs() < 1e-6 * split.value, "{} vs {plain}", split.value);
}

#[test]
fn threshold_integral_is_independent_of_ball_radius() {
    let v = VFunction::new([([0, 0, 0], 0.6), ([1, 1, 0], 0.4)]).unwrap();
    for (k, side) in [(TorusPoint::ORIGIN, Extremum::Min), (lambda_point(2).unwrap(), Extremum::Max)] {
        let vals: Vec<f64> = [0.3, 0.5, 0.8]
            .iter()
            .map(|&d| integrate_threshold(&v, k, k, side, &cfg().with_ball_radius(d)).unwrap().value)
            .collect();
        for x in &vals {
            assert!((x - vals[1]).abs() < 1e-6 * vals[1], "{vals:?}");
        }
    }
}

#[test]
fn zero_coupling_gives_zero() {
    let r = integrate_threshold(&VFunction::constant(0.0), TorusPoint::ORIGIN, TorusPoint::ORIGIN, Extremum::Min, &cfg())
        .unwrap();
    assert_eq!(r.value, 0.0);
}

fn coupling() -> impl Strategy<Value = VFunction> {
    prop::collection::vec(((-2i8..=2, -2i8..=2, -2i8..=2), -1.0f64..1.0), 1..5).prop_filter_map("nonzero", |terms| {
        let v = VFunction::new(terms.into_iter().map(|((a, b, c), x)| ([a, b, c], x))).ok()?;
        (v.norm_sq() > 1e-3).then_some(v)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn threshold_integrals_are_positive(v in coupling(), i in 1usize..=8) {
        let c = QuadratureConfig { target_rel_tol: 1e-6, ..cfg() };
        let o = integrate_threshold(&v, TorusPoint::ORIGIN, TorusPoint::ORIGIN, Extremum::Min, &c).unwrap();
        let k = lambda_point(i).unwrap();
        let l = integrate_threshold(&v, k, k, Extremum::Max, &c).unwrap();
        prop_assert!(o.value > 0.0 && l.value > 0.0);
    }

    #[test]
    fn refinement_differences_decrease(a in 0.2f64..2.0, s in -3.0f64..3.0) {
        let f = move |p: &[f64; 3]| 1.0 / (3.5 + a * p[0].cos() - p[1].cos() * (p[2] + s).sin());
        let values: Vec<f64> = [8usize, 16, 32, 64].iter().map(|&n| midpoint_rule(&f, n)).collect();
        let diffs: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
        for w in diffs.windows(2) {
            prop_assert!(w[1] <= w[0] || w[1] < 1e-13, "{diffs:?}");
        }
    }
}
