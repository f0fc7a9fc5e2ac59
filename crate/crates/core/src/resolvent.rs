//! The resolvent integral `R(k; z) = ∫ v²(t) / (w1(k,t) - z) dt` through its
//! Laplace representation.
//!
//! With `q_j = t_j + k_j/2` and `c_j = cos(k_j/2)`,
//! `w1(k,t) - m(k) = Σ_j 2 c_j (1 - cos q_j)` and
//! `M(k) - w1(k,t) = Σ_j 2 c_j (1 + cos q_j)`. Writing `1/a = ∫_0^∞ e^{-sa} ds`
//! and integrating each axis against `e^{±2 s c_j cos q_j}` turns every term of
//! the trigonometric series `v²` into a product of modified Bessel functions:
//!
//! ```text
//! R(k; z) =  ∫_0^∞ e^{-s (m - z)} G₋(s) ds          (z < m)
//! R(k; z) = -∫_0^∞ e^{-s (z - M)} G₊(s) ds          (z > M)
//! G±(s)   = (2π)³ Σ_m C_m Π_j (±1)^{|m_j|} Ĩ_{|m_j|}(2 s c_j) τ(m_j, k_j/2)
//! ```
//!
//! where `Ĩ_n(x) = e^{-x} I_n(x)` and `τ(n, φ)` is `cos(nφ)`, `-sin(|n|φ)` or 1.
//! The Laplace integral is done with an exp-sinh rule, which handles the
//! `s^{-3/2}` tail at the band edge as well as the fast decay far from it,
//! so `R` stays accurate arbitrarily close to and exactly at the thresholds.

use alloc::vec::Vec;

#[allow(unused_imports)] // inherent f64 methods win once std is linked
use num_traits::Float;

use crate::error::Error;
use crate::lattice::{BandEdges, FibreGeometry, TorusPoint, TAU};
use crate::series::VFunction;
use crate::special::{exp_sinh_nodes, scaled_bessel_i, CompensatedSum};

const STEP: f64 = 1.0 / 32.0;
const T_MIN: f64 = -4.2;
const T_MAX: f64 = 4.8;

/// Precomputed Laplace kernel of the resolvent integral for fixed `(v, k)`.
///
/// Independent of `γ` and `μ`, so one kernel serves every parameter pair.
#[derive(Clone, Debug)]
pub struct ResolventKernel {
    k: TorusPoint,
    edges: BandEdges,
    /// `(s_i, w_i G₋(s_i))`
    lower: Vec<(f64, f64)>,
    /// `(s_i, w_i G₊(s_i))`
    upper: Vec<(f64, f64)>,
    lower_divergent: bool,
    upper_divergent: bool,
}

impl ResolventKernel {
    pub fn new(v: &VFunction, k: TorusPoint) -> Self {
        let geom = FibreGeometry::new(k);
        let v2 = v.squared();
        let order = v2.degree().max(0) as usize + 1;

        // per-term phase product and parity
        let terms: Vec<(f64, f64, [usize; 3])> = v2
            .terms()
            .map(|(m, c)| {
                let mut phase = 1.0;
                let mut parity = 1.0;
                for (&n, &phi) in m.iter().zip(&geom.half_k) {
                    phase *= match n {
                        0 => 1.0,
                        n if n > 0 => (f64::from(n) * phi).cos(),
                        n => -(f64::from(-n) * phi).sin(),
                    };
                    if n.abs() % 2 == 1 {
                        parity = -parity;
                    }
                }
                (c * phase, parity, m.map(|n| n.unsigned_abs() as usize))
            })
            .collect();

        let volume = TAU * TAU * TAU;
        let nodes = exp_sinh_nodes(STEP, T_MIN, T_MAX);
        let mut lower = Vec::with_capacity(nodes.len());
        let mut upper = Vec::with_capacity(nodes.len());
        let mut bessel = [[0.0f64; 17]; 3];
        for &(s, w) in &nodes {
            for (row, &c) in bessel.iter_mut().zip(&geom.curvature) {
                scaled_bessel_i(2.0 * s * c, &mut row[..order]);
            }
            let mut g_lo = CompensatedSum::new();
            let mut g_hi = CompensatedSum::new();
            for &(c, parity, n) in &terms {
                let prod = c * bessel[0][n[0]] * bessel[1][n[1]] * bessel[2][n[2]];
                g_lo.add(prod);
                g_hi.add(parity * prod);
            }
            lower.push((s, w * volume * g_lo.value()));
            upper.push((s, w * volume * g_hi.value()));
        }

        let divergent = |g: &[(f64, f64)]| {
            if !geom.is_degenerate() {
                return false;
            }
            // the weights carry a factor s; a tail that has not decayed at the
            // last node signals a non-integrable edge singularity
            let head = g.iter().map(|(_, x)| x.abs()).fold(0.0, f64::max);
            let tail = g.last().map_or(0.0, |(_, x)| x.abs());
            head > 0.0 && tail > 1e-9 * head
        };
        let lower_divergent = divergent(&lower);
        let upper_divergent = divergent(&upper);

        ResolventKernel {
            k,
            edges: geom.edges,
            lower,
            upper,
            lower_divergent,
            upper_divergent,
        }
    }

    pub fn k(&self) -> TorusPoint {
        self.k
    }

    pub fn edges(&self) -> BandEdges {
        self.edges
    }

    /// `∫ v²(t) / (w1(k,t) - z) dt` for `z` outside `[m(k), M(k)]`.
    pub fn resolvent(&self, z: f64) -> Result<f64, Error> {
        if z < self.edges.lower {
            Ok(laplace(&self.lower, self.edges.lower - z))
        } else if z > self.edges.upper {
            Ok(-laplace(&self.upper, z - self.edges.upper))
        } else {
            Err(Error::InsideEssentialSpectrum {
                z,
                lower: self.edges.lower,
                upper: self.edges.upper,
            })
        }
    }

    /// `∫ v² / (w1 - m)`; `None` when the integral diverges.
    pub fn lower_edge_integral(&self) -> Option<f64> {
        (!self.lower_divergent).then(|| laplace(&self.lower, 0.0))
    }

    /// `∫ v² / (M - w1)`; `None` when the integral diverges.
    pub fn upper_edge_integral(&self) -> Option<f64> {
        (!self.upper_divergent).then(|| laplace(&self.upper, 0.0))
    }
}

fn laplace(kernel: &[(f64, f64)], shift: f64) -> f64 {
    let mut acc = CompensatedSum::new();
    for &(s, wg) in kernel {
        let damp = (-s * shift).exp();
        if damp == 0.0 {
            break;
        }
        acc.add(wg * damp);
    }
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{lambda_point, w1};
    use core::f64::consts::PI;

    /// Midpoint sum on an n³ grid, accurate for z well away from the band.
    fn brute(v: &VFunction, k: TorusPoint, z: f64, n: usize) -> f64 {
        let h = TAU / n as f64;
        let mut acc = CompensatedSum::new();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let t = [a, b, c].map(|i| -PI + (i as f64 + 0.5) * h);
                    let val = v.eval_raw(&t);
                    acc.add(val * val / (w1(k, t.into()) - z));
                }
            }
        }
        acc.value() * h * h * h
    }

    fn general_v() -> VFunction {
        VFunction::new([
            ([0, 0, 0], 0.8),
            ([1, 0, -1], 0.5),
            ([-2, 1, 0], -0.3),
            ([0, -3, 2], 0.2),
            ([4, 0, 0], 0.1),
        ])
        .unwrap()
    }

    #[test]
    fn matches_midpoint_sum_far_from_band() {
        let v = general_v();
        for k in [[0.3, -1.1, 2.4], [0.0, 0.0, 0.0], [-2.9, 1.0, 0.5]] {
            let k = TorusPoint::new(k);
            let kernel = ResolventKernel::new(&v, k);
            let e = kernel.edges();
            for z in [e.lower - 2.0, e.upper + 1.5] {
                let a = kernel.resolvent(z).unwrap();
                let b = brute(&v, k, z, 48);
                assert!((a - b).abs() < 1e-9 * b.abs(), "k={k:?} z={z}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn watson_integral_at_origin() {
        // ∫ dt / ε(t) = (2π)³ W / 3 with W the simple-cubic Watson integral
        let w = 1.516_386_059_151_978_f64;
        let kernel = ResolventKernel::new(&VFunction::constant(1.0), TorusPoint::ORIGIN);
        let half = kernel.lower_edge_integral().unwrap();
        let exact = TAU.powi(3) * w / 3.0;
        assert!((2.0 * half - exact).abs() < 1e-12 * exact);
    }

    #[test]
    fn lambda_points_share_the_edge_integral() {
        let v = VFunction::constant(1.0);
        let first = ResolventKernel::new(&v, lambda_point(1).unwrap())
            .upper_edge_integral()
            .unwrap();
        for i in 2..=8 {
            let other = ResolventKernel::new(&v, lambda_point(i).unwrap())
                .upper_edge_integral()
                .unwrap();
            assert!((first - other).abs() < 1e-12 * first);
        }
    }

    #[test]
    fn flat_band_is_rank_one() {
        let v = general_v();
        let kernel = ResolventKernel::new(&v, TorusPoint::pi_bar());
        let e = kernel.edges();
        assert!((e.lower - 12.0).abs() < 1e-12 && (e.upper - 12.0).abs() < 1e-12);
        for z in [11.0, 13.0, -4.0] {
            let exact = v.norm_sq() / (12.0 - z);
            assert!((kernel.resolvent(z).unwrap() - exact).abs() < 1e-12 * exact.abs());
        }
        assert!(kernel.lower_edge_integral().is_none());
        assert!(kernel.upper_edge_integral().is_none());
    }

    #[test]
    fn inside_band_is_rejected() {
        let kernel = ResolventKernel::new(&VFunction::constant(1.0), TorusPoint::ORIGIN);
        assert!(matches!(kernel.resolvent(5.0), Err(Error::InsideEssentialSpectrum { .. })));
        assert!(kernel.resolvent(0.0).is_err());
        assert!(kernel.resolvent(12.0).is_err());
    }

    #[test]
    fn approaches_edge_value_continuously() {
        let kernel = ResolventKernel::new(&general_v(), TorusPoint::new([0.7, -0.2, 1.9]));
        let e = kernel.edges();
        let edge = kernel.lower_edge_integral().unwrap();
        let near = kernel.resolvent(e.lower - 1e-10).unwrap();
        // R(m - d) = R(m) - O(√d)
        assert!(near < edge && edge - near < 1e-3);
        let edge_hi = kernel.upper_edge_integral().unwrap();
        let near_hi = kernel.resolvent(e.upper + 1e-10).unwrap();
        assert!(-near_hi < edge_hi && edge_hi + near_hi < 1e-3);
    }
}
