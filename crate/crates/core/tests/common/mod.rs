//! Independent oracles shared by the integration and acceptance tests. None of
//! them reuse the library's quadrature or closed forms.
#![allow(dead_code)]

use std::f64::consts::PI;

use friedrichs_core::{w1, TorusPoint};

/// `∫ dt/ε(t)` over `T³`, from the simple-cubic Watson integral
/// `W = ∫ dt / (1 - (cos t1 + cos t2 + cos t3)/3) / (2π)³ = 1.516386059151978…`.
pub fn watson_inverse_epsilon() -> f64 {
    (2.0 * PI).powi(3) * 1.516_386_059_151_978 / 3.0
}

/// The same constant from its closed form in Gamma functions,
/// `W = √6/(32π³) Γ(1/24) Γ(5/24) Γ(7/24) Γ(11/24)`.
pub fn watson_closed_form() -> f64 {
    let g = |x: f64| libm::tgamma(x);
    6f64.sqrt() / (32.0 * PI.powi(3)) * g(1.0 / 24.0) * g(5.0 / 24.0) * g(7.0 / 24.0) * g(11.0 / 24.0)
}

/// Plain midpoint sum on an `n³` grid, summed in slabs to limit rounding.
pub fn riemann<F: Fn([f64; 3]) -> f64>(f: F, n: usize) -> f64 {
    let h = 2.0 * PI / n as f64;
    let x = |i: usize| -PI + (i as f64 + 0.5) * h;
    let mut total = 0.0;
    for a in 0..n {
        let mut slab = 0.0;
        for b in 0..n {
            let mut row = 0.0;
            for c in 0..n {
                row += f([x(a), x(b), x(c)]);
            }
            slab += row;
        }
        total += slab;
    }
    total * h * h * h
}

/// Graded-mesh integral of a function with a point singularity at `center`.
///
/// The period cube around `center` is cut into nested shells: level `l` is
/// the cube of half-width `π 2^{-l}` minus the one of half-width
/// `π 2^{-l-1}`, i.e. 56 sub-cubes, each done with an `n³` midpoint rule.
/// Levels stop once the remaining core is below `1e-12`; its contribution is
/// `O(core)` for a `1/r²` singularity. Three resolutions are combined by
/// Richardson extrapolation in `h²`.
pub fn graded_mesh<F: Fn([f64; 3]) -> f64>(f: F, center: [f64; 3]) -> f64 {
    let level_sum = |n: usize| -> f64 {
        let mut total = 0.0;
        let mut a = PI;
        while a > 1e-12 {
            let side = a / 2.0;
            let h = side / n as f64;
            let mut level = 0.0;
            for bx in 0..4 {
                for by in 0..4 {
                    for bz in 0..4 {
                        if (1..=2).contains(&bx) && (1..=2).contains(&by) && (1..=2).contains(&bz) {
                            continue;
                        }
                        let origin = [bx, by, bz].map(|b| -a + b as f64 * side);
                        let mut cube = 0.0;
                        for i in 0..n {
                            for j in 0..n {
                                for k in 0..n {
                                    let p = [
                                        center[0] + origin[0] + (i as f64 + 0.5) * h,
                                        center[1] + origin[1] + (j as f64 + 0.5) * h,
                                        center[2] + origin[2] + (k as f64 + 0.5) * h,
                                    ];
                                    cube += f(p);
                                }
                            }
                        }
                        level += cube * h * h * h;
                    }
                }
            }
            total += level;
            a = side;
        }
        total
    };
    let (i4, i8, i16) = (level_sum(4), level_sum(8), level_sum(16));
    let r1 = (4.0 * i8 - i4) / 3.0;
    let r2 = (4.0 * i16 - i8) / 3.0;
    (16.0 * r2 - r1) / 15.0
}

/// Minimum and maximum of `w1(k, ·)` over the 201³ grid `-π + 2π i/200`.
pub fn brute_force_band(k: TorusPoint) -> (f64, f64) {
    let n = 201;
    let nodes: Vec<f64> = (0..n).map(|i| -PI + 2.0 * PI * i as f64 / 200.0).collect();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &a in &nodes {
        for &b in &nodes {
            for &c in &nodes {
                let w = w1(k, TorusPoint::new([a, b, c]));
                lo = lo.min(w);
                hi = hi.max(w);
            }
        }
    }
    (lo, hi)
}

/// Deterministic generator for test configurations.
pub fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}
