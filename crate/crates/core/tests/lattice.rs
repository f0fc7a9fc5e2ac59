mod common;

use std::f64::consts::PI;

use friedrichs_core::lattice::{reduce_angle, UPPER_THRESHOLD};
use friedrichs_core::{band_endpoints, epsilon, lambda_points, w0, w1, TorusPoint};
use proptest::prelude::*;
use rand::Rng;

fn angle() -> impl Strategy<Value = f64> {
    -20.0f64..20.0
}

fn point() -> impl Strategy<Value = TorusPoint> {
    [angle(), angle(), angle()].prop_map(TorusPoint::new)
}

/// Per-axis brute-force extremes of `2 - cos(k+p) - cos p` on 201 nodes: the
/// minimum of a separable sum is the sum of per-axis minima.
fn separable_band(k: TorusPoint) -> (f64, f64) {
    let nodes: Vec<f64> = (0..201).map(|i| -PI + 2.0 * PI * i as f64 / 200.0).collect();
    let (mut lo, mut hi) = (epsilon(k), epsilon(k));
    for kj in k.coords() {
        let vals: Vec<f64> = nodes.iter().map(|p| 2.0 - (kj + p).cos() - p.cos()).collect();
        lo += vals.iter().copied().fold(f64::INFINITY, f64::min);
        hi += vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    }
    (lo, hi)
}

proptest! {
    #[test]
    fn coordinates_are_reduced(p in point(), q in point(), s in -5.0f64..5.0) {
        for r in [p + q, p - q, -p, p.scale(s)] {
            for x in r.coords() {
                prop_assert!(x > -PI && x <= PI);
            }
        }
    }

    #[test]
    fn reduction_is_idempotent(x in -1e3f64..1e3) {
        let r = reduce_angle(x);
        prop_assert_eq!(reduce_angle(r), r);
        prop_assert!(((x - r) / (2.0 * PI)).round() * 2.0 * PI - (x - r) < 1e-9);
    }

    #[test]
    fn w1_is_symmetric_and_bounded(k in point(), p in point()) {
        prop_assert_eq!(w1(k, p), w1(p, k));
        let w = w1(k, p);
        prop_assert!((0.0..=UPPER_THRESHOLD + 1e-12).contains(&w));
        let e = band_endpoints(k);
        prop_assert!(e.lower - 1e-12 <= w && w <= e.upper + 1e-12);
        prop_assert!(0.0 <= e.lower && e.lower <= e.upper && e.upper <= UPPER_THRESHOLD + 1e-12);
    }

    #[test]
    fn epsilon_range_and_w0(k in point(), g in -10.0f64..10.0) {
        let e = epsilon(k);
        prop_assert!((0.0..=6.0).contains(&e));
        prop_assert_eq!(w0(k, g), e + g);
    }
}

#[test]
fn global_extremes_only_near_special_points() {
    let mut rng = common::rng(11);
    let lambda: Vec<TorusPoint> = lambda_points().iter().collect();
    for _ in 0..100_000 {
        let k = TorusPoint::new(std::array::from_fn(|_| rng.gen_range(-PI..PI)));
        let p = TorusPoint::new(std::array::from_fn(|_| rng.gen_range(-PI..PI)));
        let w = w1(k, p);
        assert!((0.0..=13.5).contains(&w));
        if w < 1e-2 {
            assert!(k.distance(TorusPoint::ORIGIN) < 0.2 && p.distance(TorusPoint::ORIGIN) < 0.2);
        }
        if w > 13.5 - 1e-2 {
            assert!(lambda.iter().any(|l| k.distance(*l) < 0.2 && p.distance(*l) < 0.2));
        }
    }
}

#[test]
fn endpoints_match_brute_force_on_a_k_grid() {
    let n = 17;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let k = TorusPoint::new([a, b, c].map(|i| -PI + 2.0 * PI * (i as f64 + 0.5) / n as f64));
                let (lo, hi) = separable_band(k);
                let e = band_endpoints(k);
                assert!((lo - e.lower).abs() < 1e-3 && (hi - e.upper).abs() < 1e-3, "{k:?}");
            }
        }
    }
}

#[test]
fn full_grid_oracle_agrees_with_separable_oracle() {
    let k = TorusPoint::new([0.7, -2.2, 1.3]);
    let (a, b) = common::brute_force_band(k);
    let (c, d) = separable_band(k);
    assert!((a - c).abs() < 1e-12 && (b - d).abs() < 1e-12);
}
