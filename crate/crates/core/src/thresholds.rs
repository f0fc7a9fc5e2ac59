//! Critical couplings and the classification of the thresholds `z = 0`
//! (at `k = 0̄`) and `z = 27/2` (at `k ∈ Λ`).
//!
//! With `I_ε = ∫ v²/ε` and `I_max(i) = ∫ v² / (9 - ε(k^(i)+t) - ε(t))`,
//!
//! ```text
//! μ_l(γ)   = √(2γ)  · I_ε^{-1/2}              γ > 0
//! μ_r(γ,i) = √(9-γ) · I_max(i)^{-1/2}         γ < 9
//! γ_i      = 9 I_ε / (2 I_max(i) + I_ε)       the crossing μ_l = μ_r
//! ```
//!
//! At the critical coupling the threshold carries a solution
//! `f = (1, -μ v / (w1(k,·) - z))`. It is square integrable (threshold
//! eigenvalue) iff `v` vanishes at the extremal point, and lies in `L¹ \ L²`
//! (virtual level) otherwise.

use alloc::vec::Vec;

#[allow(unused_imports)] // inherent f64 methods win once std is linked
use num_traits::Float;

use crate::determinant::{edge_limits, ModelParams};
use crate::error::Error;
use crate::lattice::{lambda_point, w1, TorusPoint, LOWER_THRESHOLD, UPPER_THRESHOLD};
use crate::quadrature::{integrate_threshold, Extremum, IntegralResult, QuadratureConfig, SphericalRule};
use crate::resolvent::ResolventKernel;
use crate::series::VFunction;

/// Relative band within which `μ` counts as equal to a critical coupling.
pub const MATCH_TOL: f64 = 1e-8;
/// `|v(point)|` below this counts as vanishing.
pub const ZERO_TOL: f64 = 1e-12;
/// Shell slope above which `f1` is declared square integrable.
pub const L2_SLOPE_MARGIN: f64 = 0.1;
/// Largest admissible RMS residual of the shell-slope fit.
pub const FIT_RESIDUAL_MAX: f64 = 0.2;
const SHELLS: usize = 10;
const RESIDUAL_SAMPLES: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ThresholdPoint {
    /// `z = 0` at `k = 0̄`
    Origin,
    /// `z = 27/2` at `k = k^(i)`, `i ∈ 1..=8`
    Lambda(usize),
}

impl ThresholdPoint {
    pub fn k(self) -> Result<TorusPoint, Error> {
        match self {
            ThresholdPoint::Origin => Ok(TorusPoint::ORIGIN),
            ThresholdPoint::Lambda(i) => lambda_point(i).ok_or(Error::Domain("Λ index must lie in 1..=8")),
        }
    }

    pub fn energy(self) -> f64 {
        match self {
            ThresholdPoint::Origin => LOWER_THRESHOLD,
            ThresholdPoint::Lambda(_) => UPPER_THRESHOLD,
        }
    }

    fn side(self) -> Extremum {
        match self {
            ThresholdPoint::Origin => Extremum::Min,
            ThresholdPoint::Lambda(_) => Extremum::Max,
        }
    }

    fn check_gamma(self, gamma: f64) -> Result<(), Error> {
        match self {
            ThresholdPoint::Origin if !(gamma > 0.0) => Err(Error::Domain("the origin threshold requires γ > 0")),
            ThresholdPoint::Lambda(_) if !(gamma < 9.0) => Err(Error::Domain("the Λ threshold requires γ < 9")),
            _ => Ok(()),
        }
    }
}

/// The threshold integrals of a coupling function, computed once.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ThresholdIntegrals {
    /// `∫ v²/ε`
    pub origin: IntegralResult,
    /// `∫ v² / (9 - ε(k^(i)+t) - ε(t))` for `i = 1..=8`
    pub lambda: [IntegralResult; 8],
}

impl ThresholdIntegrals {
    pub fn compute(v: &VFunction, cfg: &QuadratureConfig) -> Result<Self, Error> {
        if v.is_zero() {
            return Err(Error::ZeroCoupling);
        }
        let origin = origin_integral(v, cfg)?;
        let mut lambda = [origin; 8];
        for (i, slot) in lambda.iter_mut().enumerate() {
            *slot = lambda_integral(v, i + 1, cfg)?;
        }
        Ok(ThresholdIntegrals { origin, lambda })
    }

    pub fn i_eps(&self) -> f64 {
        self.origin.value
    }

    /// `I_max(i)` for `i ∈ 1..=8`.
    pub fn i_max(&self, i: usize) -> Result<f64, Error> {
        check_index(i)?;
        Ok(self.lambda[i - 1].value)
    }

    pub fn mu_left(&self, gamma: f64) -> Result<f64, Error> {
        if !(gamma > 0.0) {
            return Err(Error::Domain("μ_l is defined for γ > 0"));
        }
        Ok((2.0 * gamma / self.i_eps()).sqrt())
    }

    pub fn mu_right(&self, gamma: f64, i: usize) -> Result<f64, Error> {
        if !(gamma < 9.0) {
            return Err(Error::Domain("μ_r is defined for γ < 9"));
        }
        Ok(((9.0 - gamma) / self.i_max(i)?).sqrt())
    }

    pub fn gamma_star(&self, i: usize) -> Result<f64, Error> {
        let (a, b) = (self.i_eps(), self.i_max(i)?);
        Ok(9.0 * a / (2.0 * b + a))
    }

    pub fn critical_couplings(&self, gamma: f64) -> CriticalCouplings {
        CriticalCouplings {
            gamma,
            mu_l: self.mu_left(gamma).ok(),
            mu_r: core::array::from_fn(|i| self.mu_right(gamma, i + 1).ok()),
            gamma_star: core::array::from_fn(|i| 9.0 * self.i_eps() / (2.0 * self.lambda[i].value + self.i_eps())),
        }
    }
}

fn check_index(i: usize) -> Result<(), Error> {
    if (1..=8).contains(&i) {
        Ok(())
    } else {
        Err(Error::Domain("Λ index must lie in 1..=8"))
    }
}

fn origin_integral(v: &VFunction, cfg: &QuadratureConfig) -> Result<IntegralResult, Error> {
    // the split-ball routine integrates v²/w1(0̄,·) = v²/(2ε)
    let r = integrate_threshold(v, TorusPoint::ORIGIN, TorusPoint::ORIGIN, Extremum::Min, cfg)?;
    Ok(IntegralResult {
        value: 2.0 * r.value,
        est_error: 2.0 * r.est_error,
        ..r
    })
}

fn lambda_integral(v: &VFunction, i: usize, cfg: &QuadratureConfig) -> Result<IntegralResult, Error> {
    check_index(i)?;
    let k = lambda_point(i).ok_or(Error::Domain("Λ index must lie in 1..=8"))?;
    integrate_threshold(v, k, k, Extremum::Max, cfg)
}

fn nonzero(v: &VFunction) -> Result<(), Error> {
    if v.is_zero() {
        Err(Error::ZeroCoupling)
    } else {
        Ok(())
    }
}

/// `μ_l(γ) = √(2γ) (∫ v²/ε)^{-1/2}`.
pub fn mu_left(gamma: f64, v: &VFunction, cfg: &QuadratureConfig) -> Result<f64, Error> {
    if !(gamma > 0.0) {
        return Err(Error::Domain("μ_l is defined for γ > 0"));
    }
    nonzero(v)?;
    let i = origin_integral(v, cfg)?.value;
    Ok((2.0 * gamma / i).sqrt())
}

/// `μ_r^(i)(γ) = √(9-γ) (∫ v² / (9 - ε(k^(i)+t) - ε(t)))^{-1/2}`.
pub fn mu_right(gamma: f64, i: usize, v: &VFunction, cfg: &QuadratureConfig) -> Result<f64, Error> {
    if !(gamma < 9.0) {
        return Err(Error::Domain("μ_r is defined for γ < 9"));
    }
    nonzero(v)?;
    let r = lambda_integral(v, i, cfg)?.value;
    Ok(((9.0 - gamma) / r).sqrt())
}

/// The unique `γ ∈ (0, 9)` with `μ_l(γ) = μ_r^(i)(γ)`.
pub fn gamma_star(i: usize, v: &VFunction, cfg: &QuadratureConfig) -> Result<f64, Error> {
    nonzero(v)?;
    let a = origin_integral(v, cfg)?.value;
    let b = lambda_integral(v, i, cfg)?.value;
    Ok(9.0 * a / (2.0 * b + a))
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CriticalCouplings {
    pub gamma: f64,
    pub mu_l: Option<f64>,
    pub mu_r: [Option<f64>; 8],
    pub gamma_star: [f64; 8],
}

pub fn critical_couplings(gamma: f64, v: &VFunction, cfg: &QuadratureConfig) -> Result<CriticalCouplings, Error> {
    Ok(ThresholdIntegrals::compute(v, cfg)?.critical_couplings(gamma))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Verdict {
    /// `μ` is not critical: the threshold is a regular point.
    #[cfg_attr(feature = "serde", serde(rename = "none"))]
    Regular,
    /// Threshold eigenvalue, `f1 ∈ L²`.
    Eigenvalue,
    /// Virtual level (zero-energy resonance at the origin), `f1 ∈ L¹ \ L²`.
    VirtualLevel,
}

/// Local power-law behaviour of `|f1|²` near the singular point.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct L2Probe {
    /// Slope `s` of `log S_j` against `log r_j`.
    pub slope: f64,
    /// RMS deviation of the log-log fit.
    pub fit_residual: f64,
    pub in_l2: bool,
    /// Vanishing order inferred from the slope, `round((s+1)/2)`.
    pub theta: usize,
    /// Vanishing order from directional Taylor coefficients of `v`.
    pub theta_taylor: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ThresholdReport {
    pub point: ThresholdPoint,
    pub verdict: Verdict,
    pub mu: f64,
    pub mu_critical: f64,
    pub v_at_point: f64,
    pub local_exponent: f64,
    pub probe: L2Probe,
    pub f0: f64,
    pub f1_samples: Vec<(TorusPoint, f64)>,
    /// `|1 - λ|` for the rank-one operator's eigenvalue `λ` on `ψ = v`.
    pub resonance_residual: f64,
    /// Residuals of both lines of the eigen-system for `(f0, f1)`.
    pub system_residual: [f64; 2],
}

/// Classification of a threshold for the given parameters.
pub fn classify_threshold(
    params: &ModelParams,
    v: &VFunction,
    point: ThresholdPoint,
    cfg: &QuadratureConfig,
) -> Result<ThresholdReport, Error> {
    params.validate()?;
    point.check_gamma(params.gamma)?;
    nonzero(v)?;
    let k = point.k()?;
    let integral = match point {
        ThresholdPoint::Origin => origin_integral(v, cfg)?,
        ThresholdPoint::Lambda(i) => lambda_integral(v, i, cfg)?,
    };
    classify_with(params, v, point, integral.value, cfg, k)
}

/// [`classify_threshold`] reusing precomputed integrals.
pub fn classify_with_integrals(
    params: &ModelParams,
    v: &VFunction,
    point: ThresholdPoint,
    integrals: &ThresholdIntegrals,
    cfg: &QuadratureConfig,
) -> Result<ThresholdReport, Error> {
    params.validate()?;
    point.check_gamma(params.gamma)?;
    nonzero(v)?;
    let k = point.k()?;
    let integral = match point {
        ThresholdPoint::Origin => integrals.i_eps(),
        ThresholdPoint::Lambda(i) => integrals.i_max(i)?,
    };
    classify_with(params, v, point, integral, cfg, k)
}

fn classify_with(
    params: &ModelParams,
    v: &VFunction,
    point: ThresholdPoint,
    integral: f64,
    cfg: &QuadratureConfig,
    k: TorusPoint,
) -> Result<ThresholdReport, Error> {
    let target = rank_one_target(params.gamma, point);
    let mu_critical = (target / integral).sqrt();
    let v_at_point = v.eval(k);
    let verdict = if (params.mu - mu_critical).abs() >= MATCH_TOL * mu_critical {
        Verdict::Regular
    } else if v_at_point.abs() < ZERO_TOL {
        Verdict::Eigenvalue
    } else {
        Verdict::VirtualLevel
    };
    let probe = l2_membership_probe(v, params, point, cfg)?;
    let samples = sample_points(k);
    let f1_samples = samples.iter().map(|&q| (q, f1_value(params, v, k, point, q))).collect();
    Ok(ThresholdReport {
        point,
        verdict,
        mu: params.mu,
        mu_critical,
        v_at_point,
        local_exponent: probe.slope,
        probe,
        f0: 1.0,
        f1_samples,
        resonance_residual: (1.0 - params.mu * params.mu * integral / target).abs(),
        system_residual: eigen_system_residual(params, v, point)?,
    })
}

/// `2γ` at the origin, `9 - γ` at Λ: the value `μ_c² · I` must take.
fn rank_one_target(gamma: f64, point: ThresholdPoint) -> f64 {
    match point {
        ThresholdPoint::Origin => 2.0 * gamma,
        ThresholdPoint::Lambda(_) => 9.0 - gamma,
    }
}

/// `f1(q) = -μ v(q) f0 / (w1(k, q) - z)` with `f0 = 1`, evaluated through the
/// edge distance so it stays accurate next to the singular point.
fn f1_value(params: &ModelParams, v: &VFunction, k: TorusPoint, point: ThresholdPoint, q: TorusPoint) -> f64 {
    let d = edge_distance(k, point, &q.coords());
    match point {
        // w1 - 0 = d
        ThresholdPoint::Origin => -params.mu * v.eval(q) / d,
        // w1 - 27/2 = -d
        ThresholdPoint::Lambda(_) => params.mu * v.eval(q) / d,
    }
}

fn edge_distance(k: TorusPoint, point: ThresholdPoint, q: &[f64; 3]) -> f64 {
    let geom = crate::lattice::FibreGeometry::new(k);
    match point.side() {
        Extremum::Min => geom.above_lower(q),
        Extremum::Max => geom.below_upper(q),
    }
}

/// `RESIDUAL_SAMPLES` quasi-random points, none at the singular point.
fn sample_points(singular: TorusPoint) -> Vec<TorusPoint> {
    // additive recurrence with the plastic-number generalisation of φ
    const A: [f64; 3] = [0.819_172_513_396_164_4, 0.671_043_606_703_789_2, 0.549_700_477_901_970_4];
    (1..=RESIDUAL_SAMPLES)
        .map(|n| {
            let u = A.map(|a| (0.5 + a * n as f64).fract());
            let p = TorusPoint::new(u.map(|x| crate::lattice::TAU * (x - 0.5)));
            if p.distance(singular) < 1e-6 {
                p + TorusPoint::new([1e-3, 0.0, 0.0])
            } else {
                p
            }
        })
        .collect()
}

/// Shell integrals `S_j = ∫_{r_{j+1} < |q - q₀| < r_j} |f1|²` on
/// `r_j = δ 2^{-j}` and the slope of their log-log fit. `|f1|² ~ r^{2θ-4}`
/// gives `S_j ~ r^{2θ-1}`: `s = -1` when `v(q₀) ≠ 0` (not in L²) and
/// `s ≥ 1` when `v` vanishes at `q₀`.
pub fn l2_membership_probe(
    v: &VFunction,
    params: &ModelParams,
    point: ThresholdPoint,
    cfg: &QuadratureConfig,
) -> Result<L2Probe, Error> {
    cfg.validate()?;
    nonzero(v)?;
    let k = point.k()?;
    let center = k.coords();
    let rule = SphericalRule::from_config(cfg);
    let mut xs = [0.0; SHELLS];
    let mut ys = [0.0; SHELLS];
    for j in 0..SHELLS {
        let r_out = cfg.ball_radius * 0.5.powi(j as i32);
        let r_in = 0.5 * r_out;
        let s = rule.shell(&center, r_in, r_out, |q, _| {
            let f = f1_value(params, v, k, point, TorusPoint::new(*q));
            f * f
        });
        if !(s > 0.0) {
            return Err(Error::FitUnstable {
                slope: f64::NAN,
                residual: f64::INFINITY,
            });
        }
        xs[j] = r_out.ln();
        ys[j] = s.ln();
    }
    let (slope, fit_residual) = fit_line(&xs, &ys);
    if !(fit_residual <= FIT_RESIDUAL_MAX) {
        return Err(Error::FitUnstable {
            slope,
            residual: fit_residual,
        });
    }
    let theta = ((slope + 1.0) / 2.0).round().max(0.0) as usize;
    Ok(L2Probe {
        slope,
        fit_residual,
        in_l2: slope > L2_SLOPE_MARGIN,
        theta,
        theta_taylor: v.vanishing_order(k, 4),
    })
}

/// Least-squares slope and RMS residual.
fn fit_line(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    let ss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let e = y - my - slope * (x - mx);
            e * e
        })
        .sum();
    (slope, (ss / n).sqrt())
}

/// `|1 - λ|` where `λ` is the eigenvalue of the rank-one operator on `ψ = v`:
/// `λ = μ² I_ε / (2γ)` at the origin, `λ = μ² I_max / (9 - γ)` at Λ.
pub fn resonance_function_check(
    params: &ModelParams,
    v: &VFunction,
    point: ThresholdPoint,
    cfg: &QuadratureConfig,
) -> Result<f64, Error> {
    params.validate()?;
    point.check_gamma(params.gamma)?;
    nonzero(v)?;
    let integral = match point {
        ThresholdPoint::Origin => origin_integral(v, cfg)?.value,
        ThresholdPoint::Lambda(i) => lambda_integral(v, i, cfg)?.value,
    };
    Ok((1.0 - params.mu * params.mu * integral / rank_one_target(params.gamma, point)).abs())
}

/// Residuals of the threshold eigen-system for `f0 = 1`, `f1 = -μ v/(w1 - z)`:
///
/// ```text
/// (w0(k) - z) f0 + μ ∫ v f1 = 0
/// μ v(q) f0 + (w1(k, q) - z) f1(q) = 0
/// ```
///
/// The first line is `Δ_μ(k; z)` at the threshold, taken from the Laplace
/// kernel, which shares no quadrature with the critical coupling. The second
/// is the largest pointwise residual over the sample points.
pub fn eigen_system_residual(params: &ModelParams, v: &VFunction, point: ThresholdPoint) -> Result<[f64; 2], Error> {
    let k = point.k()?;
    let z = point.energy();
    let kernel = ResolventKernel::new(v, k);
    let (below, above) = edge_limits(&kernel, params);
    let first = match point {
        ThresholdPoint::Origin => below,
        ThresholdPoint::Lambda(_) => above,
    };
    let second = sample_points(k)
        .into_iter()
        .map(|q| {
            let f1 = f1_value(params, v, k, point, q);
            (params.mu * v.eval(q) + (w1(k, q) - z) * f1).abs()
        })
        .fold(0.0, f64::max);
    Ok([first.abs(), second])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn cos_half() -> VFunction {
        VFunction::new([([1, 0, 0], 1.0), ([0, 0, 0], 0.5)]).unwrap()
    }

    #[test]
    fn domains() {
        let v = VFunction::constant(1.0);
        assert!(matches!(mu_left(0.0, &v, &cfg()), Err(Error::Domain(_))));
        assert!(matches!(mu_right(9.0, 1, &v, &cfg()), Err(Error::Domain(_))));
        assert!(matches!(mu_right(1.0, 0, &v, &cfg()), Err(Error::Domain(_))));
        assert!(matches!(mu_left(1.0, &VFunction::constant(0.0), &cfg()), Err(Error::ZeroCoupling)));
        let p = ModelParams::new(-1.0, 1.0).unwrap();
        assert!(classify_threshold(&p, &v, ThresholdPoint::Origin, &cfg()).is_err());
        let p = ModelParams::new(9.0, 1.0).unwrap();
        assert!(classify_threshold(&p, &v, ThresholdPoint::Lambda(1), &cfg()).is_err());
    }

    #[test]
    fn coupling_identities() {
        let v = VFunction::constant(1.0);
        let ints = ThresholdIntegrals::compute(&v, &cfg()).unwrap();
        let ml = ints.mu_left(1.3).unwrap();
        assert!((ml * ml * ints.i_eps() - 2.6).abs() < 1e-12);
        let mr = ints.mu_right(1.3, 5).unwrap();
        assert!((mr * mr * ints.i_max(5).unwrap() - 7.7).abs() < 1e-12);
        let g = ints.gamma_star(1).unwrap();
        assert!(g > 0.0 && g < 9.0);
        assert!((ints.mu_left(g).unwrap() - ints.mu_right(g, 1).unwrap()).abs() < 1e-12);
        assert!(ints.mu_left(g / 2.0).unwrap() < ints.mu_right(g / 2.0, 1).unwrap());
        assert!(ints.mu_left((g + 9.0) / 2.0).unwrap() > ints.mu_right((g + 9.0) / 2.0, 1).unwrap());
        assert!(ints.mu_left(1e-12).unwrap() < 1e-5);
        assert!(ints.mu_right(9.0 - 1e-12, 1).unwrap() < 1e-5);
    }

    #[test]
    fn slope_fit_recovers_power_law() {
        let xs: Vec<f64> = (0..10).map(|j| -(j as f64)).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x + 1.0).collect();
        let (s, r) = fit_line(&xs, &ys);
        assert!((s - 3.0).abs() < 1e-12 && r < 1e-12);
    }

    #[test]
    fn virtual_level_at_origin() {
        let v = VFunction::constant(1.0);
        let mu = mu_left(1.0, &v, &cfg()).unwrap();
        let rep = classify_threshold(&ModelParams::new(1.0, mu).unwrap(), &v, ThresholdPoint::Origin, &cfg()).unwrap();
        assert_eq!(rep.verdict, Verdict::VirtualLevel);
        assert!((rep.local_exponent + 1.0).abs() < 0.1, "{}", rep.local_exponent);
        assert!(!rep.probe.in_l2);
        assert!(rep.resonance_residual < 1e-6);
        assert_eq!(rep.f1_samples.len(), 100);

        let off = classify_threshold(&ModelParams::new(1.0, 2.0 * mu).unwrap(), &v, ThresholdPoint::Origin, &cfg()).unwrap();
        assert_eq!(off.verdict, Verdict::Regular);
        let half = resonance_function_check(&ModelParams::new(1.0, 0.5 * mu).unwrap(), &v, ThresholdPoint::Origin, &cfg())
            .unwrap();
        assert!((half - 0.75).abs() < 1e-9);
    }

    #[test]
    fn eigenvalue_at_lambda() {
        let v = cos_half();
        let mu = mu_right(4.0, 3, &v, &cfg()).unwrap();
        let p = ModelParams::new(4.0, mu).unwrap();
        let rep = classify_threshold(&p, &v, ThresholdPoint::Lambda(3), &cfg()).unwrap();
        assert_eq!(rep.verdict, Verdict::Eigenvalue);
        assert!(rep.probe.in_l2 && (rep.local_exponent - 1.0).abs() < 0.1, "{}", rep.local_exponent);
        assert_eq!(rep.probe.theta, 1);
        assert_eq!(rep.probe.theta_taylor, Some(1));
        assert!(rep.system_residual[0] < 1e-6 && rep.system_residual[1] < 1e-12, "{:?}", rep.system_residual);
        assert!(rep.resonance_residual < 1e-6);
    }

    #[test]
    fn squared_vanishing_doubles_theta() {
        let v = VFunction::from_series(cos_half().squared()).unwrap();
        let p = ModelParams::new(4.0, 1.0).unwrap();
        let probe = l2_membership_probe(&v, &p, ThresholdPoint::Lambda(1), &cfg()).unwrap();
        assert!((probe.slope - 3.0).abs() < 0.1, "{}", probe.slope);
        assert_eq!(probe.theta, 2);
        assert_eq!(probe.theta_taylor, Some(2));
    }
}
