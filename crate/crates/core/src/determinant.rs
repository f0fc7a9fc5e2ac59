//! The Fredholm determinant
//! `Δ_μ(k; z) = w0(k) - z - μ² ∫ v²(t) / (w1(k,t) - z) dt`
//! and the discrete spectrum of the fibre operator as its zero set.
//!
//! `Δ` is strictly decreasing on each side of the band `[m(k), M(k)]`, tends to
//! `+∞` as `z → -∞` and to `-∞` as `z → +∞`, so each side carries at most one
//! eigenvalue, and one exists iff the one-sided limit at the band edge has the
//! right sign.

use crate::error::Error;
use crate::lattice::{lambda_point, w0, BandEdges, TorusPoint, UPPER_THRESHOLD};
use crate::quadrature::{integrate_threshold, Extremum, IntegralResult, QuadratureConfig};
use crate::resolvent::ResolventKernel;
use crate::series::VFunction;

/// Absolute bisection tolerance for eigenvalues.
pub const ROOT_TOL: f64 = 1e-10;
const MAX_BRACKET: f64 = 1e4;

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ModelParams {
    pub gamma: f64,
    pub mu: f64,
}

impl ModelParams {
    pub fn new(gamma: f64, mu: f64) -> Result<Self, Error> {
        let p = ModelParams { gamma, mu };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !self.gamma.is_finite() {
            return Err(Error::Domain("γ must be finite"));
        }
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(Error::Domain("μ must be positive and finite"));
        }
        Ok(())
    }
}

/// Band of the fibre operator at `k` with its (at most two) eigenvalues.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpectralWindow {
    pub k: TorusPoint,
    pub m: f64,
    #[cfg_attr(feature = "serde", serde(rename = "M"))]
    pub upper: f64,
    pub eigen_below: Option<f64>,
    pub eigen_above: Option<f64>,
}

impl SpectralWindow {
    pub fn edges(&self) -> BandEdges {
        BandEdges {
            lower: self.m,
            upper: self.upper,
        }
    }
}

/// `Δ_μ(k; z)` for `z` outside the closed band.
pub fn fredholm_delta(params: &ModelParams, v: &VFunction, k: TorusPoint, z: f64) -> Result<f64, Error> {
    delta_with_kernel(&ResolventKernel::new(v, k), params, z)
}

/// `Δ_μ(k; z)` with a precomputed kernel for `k`.
pub fn delta_with_kernel(kernel: &ResolventKernel, params: &ModelParams, z: f64) -> Result<f64, Error> {
    let r = kernel.resolvent(z)?;
    Ok(w0(kernel.k(), params.gamma) - z - params.mu * params.mu * r)
}

/// One-sided limits `Δ(m⁻)` and `Δ(M⁺)`; infinite when the edge integral
/// diverges.
pub fn edge_limits(kernel: &ResolventKernel, params: &ModelParams) -> (f64, f64) {
    let e = kernel.edges();
    let base = w0(kernel.k(), params.gamma);
    let mu2 = params.mu * params.mu;
    let below = kernel
        .lower_edge_integral()
        .map_or(f64::NEG_INFINITY, |i| base - e.lower - mu2 * i);
    let above = kernel
        .upper_edge_integral()
        .map_or(f64::INFINITY, |i| base - e.upper + mu2 * i);
    (below, above)
}

/// The two threshold evaluations of the determinant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ThresholdSelector {
    /// `Δ_μ(0̄; 0)`
    ZeroAtOrigin,
    /// `Δ_μ(k^(i); 27/2)`, `i ∈ 1..=8`
    MaxAtLambda(usize),
}

/// The determinant evaluated exactly at a threshold, by the ball-split
/// quadrature. Returns the value and the underlying integral.
pub fn fredholm_delta_threshold(
    params: &ModelParams,
    v: &VFunction,
    which: ThresholdSelector,
    cfg: &QuadratureConfig,
) -> Result<(f64, IntegralResult), Error> {
    params.validate()?;
    let mu2 = params.mu * params.mu;
    match which {
        ThresholdSelector::ZeroAtOrigin => {
            // w1(0̄, t) = 2ε(t)
            let half = integrate_threshold(v, TorusPoint::ORIGIN, TorusPoint::ORIGIN, Extremum::Min, cfg)?;
            Ok((params.gamma - mu2 * half.value, half))
        }
        ThresholdSelector::MaxAtLambda(i) => {
            let k = lambda_point(i).ok_or(Error::Domain("Λ index must lie in 1..=8"))?;
            let r = integrate_threshold(v, k, k, Extremum::Max, cfg)?;
            Ok((w0(k, params.gamma) - UPPER_THRESHOLD + mu2 * r.value, r))
        }
    }
}

/// Discrete eigenvalues of `A_μ(k)` below and above the band.
pub fn find_discrete_spectrum(params: &ModelParams, v: &VFunction, k: TorusPoint) -> SpectralWindow {
    find_discrete_spectrum_with(&ResolventKernel::new(v, k), params)
}

/// [`find_discrete_spectrum`] with a precomputed kernel.
pub fn find_discrete_spectrum_with(kernel: &ResolventKernel, params: &ModelParams) -> SpectralWindow {
    let e = kernel.edges();
    let (lim_below, lim_above) = edge_limits(kernel, params);
    let delta = |z: f64| delta_with_kernel(kernel, params, z).unwrap_or(f64::NAN);

    let eigen_below = (lim_below < 0.0).then(|| {
        let mut width = 1.0;
        while delta(e.lower - width) <= 0.0 && width < MAX_BRACKET {
            width *= 2.0;
        }
        bisect(&delta, e.lower - width, e.lower)
    });
    let eigen_above = (lim_above > 0.0).then(|| {
        let mut width = 1.0;
        while delta(e.upper + width) >= 0.0 && width < MAX_BRACKET {
            width *= 2.0;
        }
        bisect(&delta, e.upper, e.upper + width)
    });

    SpectralWindow {
        k: kernel.k(),
        m: e.lower,
        upper: e.upper,
        eigen_below,
        eigen_above,
    }
}

/// Root of a decreasing function with `f(lo) > 0 > f(hi)`; endpoints are never
/// evaluated. Bisects to [`ROOT_TOL`], then on towards rounding resolution
/// while `|f|` is still above `ROOT_TOL`, since `f` is steep near band edges.
fn bisect<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64) -> f64 {
    let mut best = (f64::INFINITY, 0.5 * (lo + hi));
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let val = f(mid);
        if val.abs() < best.0 {
            best = (val.abs(), mid);
        }
        if val > 0.0 {
            lo = mid;
        } else if val < 0.0 {
            hi = mid;
        } else {
            return mid;
        }
        if hi - lo < ROOT_TOL && best.0 < ROOT_TOL {
            break;
        }
    }
    best.1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{band_endpoints, epsilon};
    use alloc::vec::Vec;

    fn params(gamma: f64, mu: f64) -> ModelParams {
        ModelParams::new(gamma, mu).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::new(1.0, 0.0).is_err());
        assert!(ModelParams::new(1.0, -1.0).is_err());
        assert!(ModelParams::new(f64::NAN, 1.0).is_err());
        assert!(ModelParams::new(-3.0, 1e-9).is_ok());
    }

    #[test]
    fn decoupled_limits() {
        let k = TorusPoint::new([0.4, -1.0, 2.0]);
        let p = params(0.3, 1.0);
        let zero = VFunction::constant(0.0);
        for z in [-2.0, 14.0] {
            let d = fredholm_delta(&p, &zero, k, z).unwrap();
            assert_eq!(d, w0(k, 0.3) - z);
        }
        let tiny = params(0.3, 1e-12);
        let d = fredholm_delta(&tiny, &VFunction::constant(1.0), k, -2.0).unwrap();
        assert!((d - (w0(k, 0.3) + 2.0)).abs() < 1e-13);
    }

    #[test]
    fn refuses_band_interior_and_edges() {
        let p = params(1.0, 1.0);
        let v = VFunction::constant(1.0);
        let k = TorusPoint::new([1.0, 0.0, 0.0]);
        let e = band_endpoints(k);
        for z in [e.lower, e.upper, 0.5 * (e.lower + e.upper)] {
            assert!(matches!(
                fredholm_delta(&p, &v, k, z),
                Err(Error::InsideEssentialSpectrum { .. })
            ));
        }
    }

    #[test]
    fn decreasing_on_both_sides() {
        let p = params(2.0, 0.7);
        let v = VFunction::new([([0, 0, 0], 1.0), ([1, 1, 0], 0.5)]).unwrap();
        let k = TorusPoint::new([0.9, -0.4, 0.1]);
        let kernel = ResolventKernel::new(&v, k);
        let e = kernel.edges();
        let below: Vec<f64> = (1..60)
            .map(|i| delta_with_kernel(&kernel, &p, e.lower - 10.0 / i as f64).unwrap())
            .collect();
        assert!(below.windows(2).all(|w| w[0] > w[1]));
        let above: Vec<f64> = (1..60)
            .map(|i| delta_with_kernel(&kernel, &p, e.upper + i as f64 * 0.2).unwrap())
            .collect();
        assert!(above.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn decoupled_eigenvalue_is_w0() {
        // w0(0̄) = γ < 0 = m(0̄)
        let w = find_discrete_spectrum(&params(-1.0, 1e-7), &VFunction::constant(1.0), TorusPoint::ORIGIN);
        assert!((w.eigen_below.unwrap() + 1.0).abs() < 1e-9);
        assert!(w.eigen_above.is_none());
    }

    #[test]
    fn roots_are_zeros_of_delta() {
        let v = VFunction::new([([0, 0, 0], 1.0), ([0, -1, 2], 0.3)]).unwrap();
        for (g, mu, k) in [
            (1.0, 1.0, [0.0, 0.0, 0.0]),
            (-2.0, 0.4, [1.0, 2.0, -0.5]),
            (11.0, 0.8, [2.0, 2.0, 2.0]),
        ] {
            let p = params(g, mu);
            let k = TorusPoint::new(k);
            let w = find_discrete_spectrum(&p, &v, k);
            for z in [w.eigen_below, w.eigen_above].into_iter().flatten() {
                assert!(fredholm_delta(&p, &v, k, z).unwrap().abs() < 1e-9, "z = {z}");
            }
            assert!(w.eigen_below.is_some() || w.eigen_above.is_some());
            assert!(w.eigen_below.is_none_or(|z| z < w.m));
            assert!(w.eigen_above.is_none_or(|z| z > w.upper));
        }
    }

    #[test]
    fn degenerate_band_has_eigenvalues_on_both_sides() {
        // at π̄ the band is {12} and Δ = w0 - z - μ²‖v‖²/(12 - z)
        let v = VFunction::constant(1.0);
        let p = params(0.5, 0.1);
        let w = find_discrete_spectrum(&p, &v, TorusPoint::pi_bar());
        assert_eq!((w.m, w.upper), (12.0, 12.0));
        let a = w0(TorusPoint::pi_bar(), 0.5);
        let n = v.norm_sq() * 0.01;
        // (a - z)(12 - z) = n
        let disc = ((a - 12.0) * (a - 12.0) + 4.0 * n).sqrt();
        let lo = 0.5 * (a + 12.0 - disc);
        let hi = 0.5 * (a + 12.0 + disc);
        assert!((w.eigen_below.unwrap() - lo).abs() < 1e-9);
        assert!((w.eigen_above.unwrap() - hi).abs() < 1e-9);
        assert!(epsilon(TorusPoint::pi_bar()) == 6.0);
    }

    #[test]
    fn threshold_values() {
        let cfg = QuadratureConfig::default();
        let v = VFunction::constant(1.0);
        let (d, _) = fredholm_delta_threshold(&params(9.0, 1e-9), &v, ThresholdSelector::MaxAtLambda(1), &cfg).unwrap();
        assert!(d.abs() < 1e-12);
        assert!(fredholm_delta_threshold(&params(1.0, 1.0), &v, ThresholdSelector::MaxAtLambda(9), &cfg).is_err());
        // the edge limit through the kernel and the ball split agree
        let p = params(1.0, 0.2);
        let (d0, _) = fredholm_delta_threshold(&p, &v, ThresholdSelector::ZeroAtOrigin, &cfg).unwrap();
        let (lim, _) = edge_limits(&ResolventKernel::new(&v, TorusPoint::ORIGIN), &p);
        assert!((d0 - lim).abs() < 1e-9);
    }
}
