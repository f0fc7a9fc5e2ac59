//! Torus geometry, the lattice dispersion and the kernel functions of the model.
//!
//! Everything here is closed-form. The band edges `m(k)`, `M(k)` follow from
//! extremizing `2 - cos(k_j + p_j) - cos(p_j) = 2 - 2 cos(k_j/2) cos(p_j + k_j/2)`
//! one coordinate at a time.

use core::f64::consts::PI;
use core::ops::{Add, Neg, Sub};

#[allow(unused_imports)] // inherent f64 methods win once std is linked
use num_traits::Float;

/// `2π`.
pub const TAU: f64 = 2.0 * PI;

/// Global minimum of `w1` over the torus squared.
pub const LOWER_THRESHOLD: f64 = 0.0;

/// Global maximum of `w1` over the torus squared.
pub const UPPER_THRESHOLD: f64 = 13.5;

/// Absolute tolerance used when comparing analytic values at extremal points.
pub const EXTREMAL_TOL: f64 = 1e-12;

/// Reduce an angle to `(-π, π]`.
#[inline]
pub fn reduce_angle(x: f64) -> f64 {
    if x > -PI && x <= PI {
        return x;
    }
    let r = x - TAU * ((x - PI) / TAU).ceil();
    if r <= -PI {
        r + TAU
    } else if r > PI {
        r - TAU
    } else {
        r
    }
}

/// A point of the torus `(-π, π]³`.
///
/// Coordinates are reduced on construction and after every arithmetic
/// operation, so a `TorusPoint` is always a canonical representative.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(from = "[f64; 3]", into = "[f64; 3]"))]
pub struct TorusPoint([f64; 3]);

impl TorusPoint {
    pub const ORIGIN: TorusPoint = TorusPoint([0.0; 3]);

    pub fn new(coords: [f64; 3]) -> Self {
        TorusPoint(coords.map(reduce_angle))
    }

    /// `(π, π, π)`, where the band degenerates to the single point 12.
    pub fn pi_bar() -> Self {
        TorusPoint([PI; 3])
    }

    #[inline]
    pub fn coords(&self) -> [f64; 3] {
        self.0
    }

    pub fn scale(self, s: f64) -> Self {
        TorusPoint::new(self.0.map(|x| s * x))
    }

    /// Euclidean distance between minimal-image representatives.
    pub fn distance(self, other: TorusPoint) -> f64 {
        let d = (self - other).0;
        (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
    }
}

impl From<[f64; 3]> for TorusPoint {
    fn from(c: [f64; 3]) -> Self {
        TorusPoint::new(c)
    }
}

impl From<TorusPoint> for [f64; 3] {
    fn from(p: TorusPoint) -> Self {
        p.0
    }
}

impl Add for TorusPoint {
    type Output = TorusPoint;
    fn add(self, rhs: TorusPoint) -> TorusPoint {
        TorusPoint::new([self.0[0] + rhs.0[0], self.0[1] + rhs.0[1], self.0[2] + rhs.0[2]])
    }
}

impl Sub for TorusPoint {
    type Output = TorusPoint;
    fn sub(self, rhs: TorusPoint) -> TorusPoint {
        TorusPoint::new([self.0[0] - rhs.0[0], self.0[1] - rhs.0[1], self.0[2] - rhs.0[2]])
    }
}

impl Neg for TorusPoint {
    type Output = TorusPoint;
    fn neg(self) -> TorusPoint {
        TorusPoint::new(self.0.map(|x| -x))
    }
}

/// `1 - cos x`, computed as `2 sin²(x/2)` so it stays accurate near `x = 0`.
#[inline]
pub(crate) fn one_minus_cos(x: f64) -> f64 {
    let s = (0.5 * x).sin();
    2.0 * s * s
}

/// `1 + cos x`, accurate near `x = π`.
#[inline]
pub(crate) fn one_plus_cos(x: f64) -> f64 {
    let c = (0.5 * x).cos();
    2.0 * c * c
}

/// Lattice dispersion `ε(k) = Σ (1 - cos k_i)`, with values in `[0, 6]`.
pub fn epsilon(k: TorusPoint) -> f64 {
    epsilon_raw(&k.0)
}

#[inline]
pub(crate) fn epsilon_raw(k: &[f64; 3]) -> f64 {
    one_minus_cos(k[0]) + one_minus_cos(k[1]) + one_minus_cos(k[2])
}

/// Diagonal entry of the scalar channel, `w0(k) = ε(k) + γ`.
pub fn w0(k: TorusPoint, gamma: f64) -> f64 {
    epsilon(k) + gamma
}

/// Multiplication kernel of the particle channel, `w1(k, p) = ε(k) + ε(k+p) + ε(p)`.
/// Summed so that `w1(k, p) == w1(p, k)` holds exactly.
pub fn w1(k: TorusPoint, p: TorusPoint) -> f64 {
    (epsilon(k) + epsilon(p)) + epsilon(k + p)
}

/// The essential band `[m(k), M(k)]` of the fibre operator at `k`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BandEdges {
    pub lower: f64,
    pub upper: f64,
}

impl BandEdges {
    pub fn contains(&self, z: f64) -> bool {
        z >= self.lower && z <= self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Closed-form `m(k) = min_p w1(k,p)` and `M(k) = max_p w1(k,p)`.
pub fn band_endpoints(k: TorusPoint) -> BandEdges {
    let eps = epsilon(k);
    let mut lower = eps;
    let mut upper = eps;
    for &kj in &k.0 {
        lower += 2.0 * one_minus_cos(0.5 * kj);
        upper += 2.0 * one_plus_cos(0.5 * kj);
    }
    BandEdges { lower, upper }
}

/// Per-axis data of the shifted form
/// `w1(k, p) = ε(k) + Σ_j (2 - 2 c_j cos q_j)` with `q_j = p_j + k_j/2`
/// and `c_j = cos(k_j/2) ≥ 0`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct FibreGeometry {
    /// `cos(k_j / 2)`; zero means the band is flat along axis `j`.
    pub(crate) curvature: [f64; 3],
    /// `k_j / 2`, the shift from `p` to `q`.
    pub(crate) half_k: [f64; 3],
    pub(crate) edges: BandEdges,
}

impl FibreGeometry {
    pub(crate) fn new(k: TorusPoint) -> Self {
        let half_k = k.0.map(|x| 0.5 * x);
        FibreGeometry {
            curvature: half_k.map(|h| {
                let c = h.cos();
                if c < 1e-12 {
                    0.0
                } else {
                    c
                }
            }),
            half_k,
            edges: band_endpoints(k),
        }
    }

    /// `w1(k, p) - m(k)`, nonnegative and accurate near the minimizer.
    #[inline]
    pub(crate) fn above_lower(&self, p: &[f64; 3]) -> f64 {
        (0..3)
            .map(|j| 2.0 * self.curvature[j] * one_minus_cos(p[j] + self.half_k[j]))
            .sum()
    }

    /// `M(k) - w1(k, p)`, nonnegative and accurate near the maximizer.
    #[inline]
    pub(crate) fn below_upper(&self, p: &[f64; 3]) -> f64 {
        (0..3)
            .map(|j| 2.0 * self.curvature[j] * one_plus_cos(p[j] + self.half_k[j]))
            .sum()
    }

    /// Minimizer of `p ↦ w1(k, p)`.
    pub(crate) fn argmin(&self) -> TorusPoint {
        TorusPoint::new(self.half_k.map(|h| -h))
    }

    /// Maximizer of `p ↦ w1(k, p)`.
    pub(crate) fn argmax(&self) -> TorusPoint {
        TorusPoint::new(self.half_k.map(|h| PI - h))
    }

    /// True when some axis is flat, so the band-edge extremum is degenerate.
    pub(crate) fn is_degenerate(&self) -> bool {
        self.curvature.contains(&0.0)
    }
}

/// The eight quasi-momenta with coordinates `±2π/3`, where `w1` attains `27/2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LambdaSet([TorusPoint; 8]);

impl LambdaSet {
    pub fn points(&self) -> &[TorusPoint; 8] {
        &self.0
    }

    /// One-based access, `i ∈ 1..=8`.
    pub fn get(&self, i: usize) -> Option<TorusPoint> {
        i.checked_sub(1).and_then(|j| self.0.get(j)).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = TorusPoint> + '_ {
        self.0.iter().copied()
    }
}

/// The set Λ, in lexicographic order of signs (`-` before `+`).
pub fn lambda_points() -> LambdaSet {
    const A: f64 = 2.0 * PI / 3.0;
    let mut pts = [TorusPoint::ORIGIN; 8];
    for (idx, slot) in pts.iter_mut().enumerate() {
        let sign = |bit: usize| if idx >> bit & 1 == 1 { A } else { -A };
        *slot = TorusPoint::new([sign(2), sign(1), sign(0)]);
    }
    LambdaSet(pts)
}

/// `k^(i)` for `i ∈ 1..=8`.
pub fn lambda_point(i: usize) -> Option<TorusPoint> {
    lambda_points().get(i)
}
