//! Spectral analysis of a lattice 2×2 operator-matrix family on the
//! three-dimensional torus.
//!
//! The fibre operator `A_μ(k)` couples a scalar channel with energy
//! `w0(k) = ε(k) + γ` to a multiplication operator `w1(k, p)` on `L²(T³)`
//! through a rank-one kernel `μ v(p)`. Its essential spectrum is the band
//! `[m(k), M(k)]`, its discrete spectrum is the zero set of the Fredholm
//! determinant outside the band, and its threshold behaviour at `z = 0`
//! (`k = 0̄`) and `z = 27/2` (`k ∈ Λ`) is governed by two critical couplings.
//!
//! The crate is `no_std` with `alloc`; enable `parallel` for rayon-backed
//! grid sweeps and `serde` for serializable result types.

#![no_std]
#![forbid(unsafe_code)]
// `!(x > 0.0)` style guards are deliberate: they reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(any(feature = "parallel", test))]
extern crate std;

pub mod bands;
pub mod determinant;
pub mod error;
pub mod lattice;
pub mod oracle;
pub mod quadrature;
pub mod resolvent;
pub mod series;
pub mod special;
pub mod thresholds;

pub use bands::{assemble_bands, branch_extrema, BandStructure, BandSweep, BranchExtrema, Interval, Side};
pub use determinant::{
    find_discrete_spectrum, fredholm_delta, fredholm_delta_threshold, ModelParams, SpectralWindow,
    ThresholdSelector,
};
pub use error::Error;
pub use lattice::{
    band_endpoints, epsilon, lambda_point, lambda_points, w0, w1, BandEdges, LambdaSet, TorusPoint,
};
pub use oracle::{discretize, extreme_eigenvalues, DiscretizedOperator};
pub use quadrature::{integrate_smooth, integrate_threshold, Extremum, IntegralResult, QuadratureConfig};
pub use resolvent::ResolventKernel;
pub use series::{TrigSeries, VFunction};
pub use thresholds::{
    classify_threshold, critical_couplings, gamma_star, l2_membership_probe, mu_left, mu_right,
    resonance_function_check, CriticalCouplings, ThresholdIntegrals, ThresholdPoint, ThresholdReport, Verdict,
};
