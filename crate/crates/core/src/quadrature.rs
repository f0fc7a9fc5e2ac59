//! Integration over the torus.
//!
//! [`integrate_smooth`] is the tensor-product midpoint rule (the periodic
//! trapezoid rule with nodes offset by half a cell) under grid doubling.
//! [`integrate_threshold`] handles integrands `v² / D` where `D` vanishes
//! quadratically at one point: a C∞ partition of unity `χ + (1 - χ) = 1`
//! with `χ` supported in the ball `U_δ` around the singular point splits the
//! integral into a smooth periodic part, done with [`integrate_smooth`], and a
//! ball part done in spherical coordinates, where the `r²` Jacobian cancels
//! the `1/r²` growth of the integrand.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)] // inherent f64 methods win once std is linked
use num_traits::Float;

use crate::error::Error;
use crate::lattice::{reduce_angle, FibreGeometry, TorusPoint, TAU};
use crate::series::{GridTables, VFunction};
use crate::special::{gauss_legendre, gauss_legendre_on, CompensatedSum};

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QuadratureConfig {
    /// Per-axis node count of the coarsest grid.
    pub base_grid: usize,
    pub target_rel_tol: f64,
    pub max_refinements: u32,
    /// Radius `δ` of the ball around a singular point.
    pub ball_radius: f64,
    /// Gauss nodes per radial panel (two panels cover `[0, δ]`).
    pub radial_nodes: usize,
    pub polar_nodes: usize,
    pub azimuth_nodes: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            base_grid: 16,
            target_rel_tol: 1e-8,
            max_refinements: 6,
            ball_radius: 0.5,
            radial_nodes: 32,
            polar_nodes: 32,
            azimuth_nodes: 64,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if self.base_grid < 8 || !self.base_grid.is_multiple_of(2) {
            return Err(Error::InvalidConfig("base grid must be even and at least 8"));
        }
        if !(self.ball_radius > 0.0 && self.ball_radius < 0.5 * PI) {
            return Err(Error::InvalidConfig("ball radius must lie in (0, π/2)"));
        }
        if !(self.target_rel_tol > 1e-14 && self.target_rel_tol < 1e-2) {
            return Err(Error::InvalidConfig("relative tolerance must lie in (1e-14, 1e-2)"));
        }
        if self.radial_nodes < 4 || self.polar_nodes < 4 || self.azimuth_nodes < 4 {
            return Err(Error::InvalidConfig("spherical rule needs at least 4 nodes per direction"));
        }
        if !self.azimuth_nodes.is_multiple_of(2) {
            return Err(Error::InvalidConfig("azimuth node count must be even"));
        }
        Ok(())
    }

    pub fn with_ball_radius(mut self, delta: f64) -> Self {
        self.ball_radius = delta;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IntegralResult {
    pub value: f64,
    pub est_error: f64,
    pub refinements_used: u32,
    pub converged: bool,
}

/// An integrand on the torus.
pub trait TorusIntegrand: Sync {
    fn eval(&self, p: &[f64; 3]) -> f64;

    /// `Σ f` over the tensor grid `nodes³`. Separable integrands override
    /// this with table lookups.
    fn grid_sum(&self, nodes: &[f64]) -> f64 {
        let n = nodes.len();
        sum_planes(n, |i0| {
            let mut acc = CompensatedSum::new();
            for &y in nodes {
                for &z in nodes {
                    acc.add(self.eval(&[nodes[i0], y, z]));
                }
            }
            acc.value()
        })
    }
}

impl<F: Fn(&[f64; 3]) -> f64 + Sync> TorusIntegrand for F {
    fn eval(&self, p: &[f64; 3]) -> f64 {
        self(p)
    }
}

/// Sum per-plane partial sums in plane order, so the result does not depend
/// on how planes are scheduled.
fn sum_planes<F: Fn(usize) -> f64 + Sync>(n: usize, plane: F) -> f64 {
    #[cfg(feature = "parallel")]
    let partial: Vec<f64> = {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(&plane).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let partial: Vec<f64> = (0..n).map(&plane).collect();
    partial.into_iter().collect::<CompensatedSum>().value()
}

/// Cell-centred nodes `-π + (i + ½) h`, `h = 2π/n`.
pub fn midpoint_nodes(n: usize) -> Vec<f64> {
    let h = TAU / n as f64;
    (0..n).map(|i| -PI + (i as f64 + 0.5) * h).collect()
}

/// Midpoint rule on a single `n³` grid.
pub fn midpoint_rule<I: TorusIntegrand + ?Sized>(f: &I, n: usize) -> f64 {
    let h = TAU / n as f64;
    f.grid_sum(&midpoint_nodes(n)) * h * h * h
}

/// Midpoint rule with grid doubling until two successive values agree to
/// `target_rel_tol` (or to `1e-12` absolutely when the integral is ~0).
pub fn integrate_smooth<I: TorusIntegrand + ?Sized>(
    f: &I,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult, Error> {
    cfg.validate()?;
    let mut n = cfg.base_grid;
    let mut prev = midpoint_rule(f, n);
    let mut last_change = f64::INFINITY;
    for r in 1..=cfg.max_refinements {
        n *= 2;
        let value = midpoint_rule(f, n);
        last_change = (value - prev).abs();
        if last_change <= cfg.target_rel_tol * value.abs() || last_change <= 1e-12 {
            return Ok(IntegralResult {
                value,
                est_error: last_change,
                refinements_used: r,
                converged: true,
            });
        }
        prev = value;
    }
    Err(Error::NonConvergence {
        refinements: cfg.max_refinements,
        value: prev,
        last_change,
    })
}

/// `∫ v²(t) / (w1(k, t) - z) dt` by [`integrate_smooth`], for `z` outside
/// `[m(k), M(k)]`. Converges slowly as `z` approaches the band; the
/// determinant uses [`ResolventKernel`](crate::ResolventKernel) instead and this
/// serves as an independent check.
pub fn resolvent_integral(
    v: &VFunction,
    k: TorusPoint,
    z: f64,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult, Error> {
    integrate_smooth(&EdgeIntegrand::resolvent(v, k, z)?, cfg)
}

/// Which band edge a singular point belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Extremum {
    /// Denominator `w1(k, ·) - m(k)`.
    Min,
    /// Denominator `M(k) - w1(k, ·)`.
    Max,
}

/// `v²(t) / (σ·(D(t) + shift))` where `D` is the distance of `w1(k, t)` from a
/// band edge and `σ = ±1`; optionally multiplied by `1 - χ` of a ball.
pub(crate) struct EdgeIntegrand<'a> {
    v: &'a VFunction,
    geom: FibreGeometry,
    side: Extremum,
    shift: f64,
    sign: f64,
    cutoff: Option<Cutoff>,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Cutoff {
    center: [f64; 3],
    radius: f64,
}

impl Cutoff {
    fn offset(&self, p: &[f64; 3]) -> [f64; 3] {
        [0, 1, 2].map(|j| reduce_angle(p[j] - self.center[j]))
    }
}

/// Smooth transition from 1 at `r = 0` to 0 at `r = radius`, flat at both ends.
pub fn ball_cutoff(r: f64, radius: f64) -> f64 {
    if r >= radius {
        return 0.0;
    }
    let x = 1.0 - r / radius;
    if x >= 1.0 {
        return 1.0;
    }
    let bump = |t: f64| if t > 0.0 { (-1.0 / t).exp() } else { 0.0 };
    let a = bump(x);
    a / (a + bump(1.0 - x))
}

impl<'a> EdgeIntegrand<'a> {
    pub(crate) fn new(v: &'a VFunction, k: TorusPoint, side: Extremum) -> Self {
        EdgeIntegrand {
            v,
            geom: FibreGeometry::new(k),
            side,
            shift: 0.0,
            sign: 1.0,
            cutoff: None,
        }
    }

    /// `v² / (w1(k, ·) - z)` for `z` outside the band.
    pub(crate) fn resolvent(v: &'a VFunction, k: TorusPoint, z: f64) -> Result<Self, Error> {
        let geom = FibreGeometry::new(k);
        let e = geom.edges;
        let (side, shift, sign) = if z < e.lower {
            (Extremum::Min, e.lower - z, 1.0)
        } else if z > e.upper {
            (Extremum::Max, z - e.upper, -1.0)
        } else {
            return Err(Error::InsideEssentialSpectrum {
                z,
                lower: e.lower,
                upper: e.upper,
            });
        };
        Ok(EdgeIntegrand {
            v,
            geom,
            side,
            shift,
            sign,
            cutoff: None,
        })
    }

    fn with_cutoff(mut self, center: TorusPoint, radius: f64) -> Self {
        self.cutoff = Some(Cutoff {
            center: center.coords(),
            radius,
        });
        self
    }

    #[inline]
    fn distance(&self, p: &[f64; 3]) -> f64 {
        match self.side {
            Extremum::Min => self.geom.above_lower(p),
            Extremum::Max => self.geom.below_upper(p),
        }
    }

    /// Integrand without the cutoff factor.
    #[inline]
    fn bare(&self, p: &[f64; 3]) -> f64 {
        let v = self.v.eval_raw(p);
        v * v / (self.sign * (self.distance(p) + self.shift))
    }

    fn axis_distance_table(&self, nodes: &[f64], axis: usize) -> Vec<f64> {
        let c = self.geom.curvature[axis];
        let phi = self.geom.half_k[axis];
        nodes
            .iter()
            .map(|&x| {
                let q = x + phi;
                match self.side {
                    Extremum::Min => 2.0 * c * crate::lattice::one_minus_cos(q),
                    Extremum::Max => 2.0 * c * crate::lattice::one_plus_cos(q),
                }
            })
            .collect()
    }

    /// Smallest `D` outside the cutoff ball, over the grid and over the
    /// analytic zero set of `D` (the extremal point, and its translates along
    /// flat axes when some curvature vanishes).
    fn min_distance_outside(&self, nodes: &[f64]) -> f64 {
        let mut min = self.min_distance_on_grid(nodes);
        let root = match self.side {
            Extremum::Min => self.geom.argmin(),
            Extremum::Max => self.geom.argmax(),
        };
        let mut candidates = vec![root];
        for j in 0..3 {
            if self.geom.curvature[j] == 0.0 {
                let mut shifted = root.coords();
                shifted[j] += PI;
                candidates.push(TorusPoint::new(shifted));
            }
        }
        for c in candidates {
            let outside = match &self.cutoff {
                Some(cut) => c.distance(TorusPoint::new(cut.center)) >= cut.radius,
                None => true,
            };
            if outside {
                min = min.min(self.distance(&c.coords()));
            }
        }
        min
    }

    fn min_distance_on_grid(&self, nodes: &[f64]) -> f64 {
        let d: [Vec<f64>; 3] = [0, 1, 2].map(|a| self.axis_distance_table(nodes, a));
        let mut min = f64::INFINITY;
        for (i0, x) in nodes.iter().enumerate() {
            for (i1, y) in nodes.iter().enumerate() {
                for (i2, z) in nodes.iter().enumerate() {
                    if let Some(c) = &self.cutoff {
                        let o = c.offset(&[*x, *y, *z]);
                        if o[0] * o[0] + o[1] * o[1] + o[2] * o[2] < c.radius * c.radius {
                            continue;
                        }
                    }
                    min = min.min(d[0][i0] + d[1][i1] + d[2][i2]);
                }
            }
        }
        min
    }
}

impl TorusIntegrand for EdgeIntegrand<'_> {
    fn eval(&self, p: &[f64; 3]) -> f64 {
        let weight = match &self.cutoff {
            Some(c) => {
                let o = c.offset(p);
                1.0 - ball_cutoff((o[0] * o[0] + o[1] * o[1] + o[2] * o[2]).sqrt(), c.radius)
            }
            None => 1.0,
        };
        if weight == 0.0 {
            0.0
        } else {
            weight * self.bare(p)
        }
    }

    fn grid_sum(&self, nodes: &[f64]) -> f64 {
        let n = nodes.len();
        let tables = GridTables::new(self.v.series(), [nodes, nodes, nodes]);
        let dist: [Vec<f64>; 3] = [0, 1, 2].map(|a| self.axis_distance_table(nodes, a));
        let offsets: Option<[Vec<f64>; 3]> = self.cutoff.as_ref().map(|c| {
            [0, 1, 2].map(|a| {
                nodes
                    .iter()
                    .map(|&x| {
                        let o = reduce_angle(x - c.center[a]);
                        o * o
                    })
                    .collect()
            })
        });
        let radius = self.cutoff.map_or(0.0, |c| c.radius);
        sum_planes(n, |i0| {
            let mut acc = CompensatedSum::new();
            let mut line = vec![0.0; n];
            for i1 in 0..n {
                tables.eval_line(i0, i1, &mut line);
                let d01 = dist[0][i0] + dist[1][i1] + self.shift;
                for i2 in 0..n {
                    let v = line[i2];
                    let mut val = v * v / (self.sign * (d01 + dist[2][i2]));
                    if let Some(off) = &offsets {
                        let r2 = off[0][i0] + off[1][i1] + off[2][i2];
                        if r2 < radius * radius {
                            val *= 1.0 - ball_cutoff(r2.sqrt(), radius);
                        }
                    }
                    acc.add(val);
                }
            }
            acc.value()
        })
    }
}

/// Product rule on a ball: Gauss–Legendre in `r` (two panels) and `cos θ`,
/// uniform in `φ`.
#[derive(Clone, Debug)]
pub struct SphericalRule {
    /// unit directions with their solid-angle weights
    directions: Vec<([f64; 3], f64)>,
    radial_per_panel: usize,
}

impl SphericalRule {
    pub fn new(radial_per_panel: usize, polar: usize, azimuth: usize) -> Self {
        let (ct, wt) = gauss_legendre(polar);
        let dphi = TAU / azimuth as f64;
        let mut directions = Vec::with_capacity(polar * azimuth);
        for (c, w) in ct.iter().zip(&wt) {
            let s = (1.0 - c * c).sqrt();
            for a in 0..azimuth {
                let phi = (a as f64 + 0.5) * dphi;
                directions.push(([s * phi.cos(), s * phi.sin(), *c], w * dphi));
            }
        }
        SphericalRule {
            directions,
            radial_per_panel,
        }
    }

    pub fn from_config(cfg: &QuadratureConfig) -> Self {
        SphericalRule::new(cfg.radial_nodes, cfg.polar_nodes, cfg.azimuth_nodes)
    }

    /// `∫_{r_in < |x| < r_out} f(center + x) dx` where the integrand is
    /// supplied as `g(point, r) = f`.
    pub fn shell<F: Fn(&[f64; 3], f64) -> f64>(
        &self,
        center: &[f64; 3],
        r_in: f64,
        r_out: f64,
        f: F,
    ) -> f64 {
        let mid = 0.5 * (r_in + r_out);
        let mut acc = CompensatedSum::new();
        for (a, b) in [(r_in, mid), (mid, r_out)] {
            let (rs, ws) = gauss_legendre_on(self.radial_per_panel, a, b);
            for (r, wr) in rs.iter().zip(&ws) {
                for (dir, wd) in &self.directions {
                    let p = [0, 1, 2].map(|j| center[j] + r * dir[j]);
                    acc.add(wr * wd * r * r * f(&p, *r));
                }
            }
        }
        acc.value()
    }
}

/// `∫_{T³} v²(t) / |w1(k,t) - T| dt` where `T` is the band edge `m(k)`
/// (`Extremum::Min`) or `M(k)` (`Extremum::Max`) and the denominator vanishes
/// quadratically at `singular_point` only.
pub fn integrate_threshold(
    v: &VFunction,
    k: TorusPoint,
    singular_point: TorusPoint,
    side: Extremum,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult, Error> {
    cfg.validate()?;
    if v.is_zero() {
        return Ok(IntegralResult {
            value: 0.0,
            est_error: 0.0,
            refinements_used: 0,
            converged: true,
        });
    }
    let delta = cfg.ball_radius;
    let outer = EdgeIntegrand::new(v, k, side).with_cutoff(singular_point, delta);

    let magnitude = outer.min_distance_outside(&midpoint_nodes(cfg.base_grid));
    if !(magnitude >= 1e-10) {
        return Err(Error::DenominatorVanishesOutsideBall { magnitude });
    }

    let complement = integrate_smooth(&outer, cfg)?;

    let bare = EdgeIntegrand::new(v, k, side);
    let center = singular_point.coords();
    let ball = |rule: &SphericalRule| {
        rule.shell(&center, 0.0, delta, |p, r| ball_cutoff(r, delta) * bare.bare(p))
    };
    let fine = ball(&SphericalRule::from_config(cfg));
    let coarse = ball(&SphericalRule::new(
        cfg.radial_nodes / 2,
        cfg.polar_nodes / 2,
        cfg.azimuth_nodes / 2,
    ));

    Ok(IntegralResult {
        value: complement.value + fine,
        est_error: complement.est_error + (fine - coarse).abs(),
        refinements_used: complement.refinements_used,
        converged: complement.converged,
    })
}
