//! Essential spectrum of the full operator:
//! `[0, 27/2] ∪ ⋃_k σ_disc(A_μ(k))`.
//!
//! The union over `k` is sampled on a cell-centred grid plus the distinguished
//! points `0̄`, `π̄` and `Λ`. Each eigenvalue branch is continuous in `k`, so its
//! range is an interval. A branch that is absent at some sampled `k` must have
//! merged into the band edge in between, and its range is closed up to the
//! band. Extreme branch values are polished by a local compass search so that
//! interval endpoints do not depend on the grid.

use alloc::vec::Vec;

#[allow(unused_imports)] // inherent f64 methods win once std is linked
use num_traits::Float;

use crate::determinant::{find_discrete_spectrum_with, ModelParams, SpectralWindow};
use crate::error::Error;
use crate::lattice::{lambda_points, TorusPoint, LOWER_THRESHOLD, TAU, UPPER_THRESHOLD};
use crate::quadrature::midpoint_nodes;
use crate::resolvent::ResolventKernel;
use crate::series::VFunction;

/// Gaps narrower than this are closed.
pub const MERGE_TOL: f64 = 1e-6;
pub const MIN_RESOLUTION: usize = 8;
/// Compass-search steps stop below this fraction of the grid spacing.
const POLISH_DEPTH: i32 = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Side {
    Below,
    Above,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BranchExtrema {
    pub min: f64,
    pub max: f64,
    pub argmin: TorusPoint,
    pub argmax: TorusPoint,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Branch {
    pub extrema: BranchExtrema,
    /// Present at every sampled `k`; otherwise the branch range reaches the band.
    pub complete: bool,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BandStructure {
    pub intervals: Vec<Interval>,
    pub resolution: usize,
    pub below: Option<Branch>,
    pub above: Option<Branch>,
    pub windows: Vec<SpectralWindow>,
}

/// Cell-centred `resolution³` grid followed by `0̄`, `π̄` and the points of `Λ`.
pub fn sample_points(resolution: usize) -> Vec<TorusPoint> {
    let nodes = midpoint_nodes(resolution);
    let mut points = Vec::with_capacity(resolution.pow(3) + 10);
    for &a in &nodes {
        for &b in &nodes {
            for &c in &nodes {
                points.push(TorusPoint::new([a, b, c]));
            }
        }
    }
    points.push(TorusPoint::ORIGIN);
    points.push(TorusPoint::pi_bar());
    points.extend(lambda_points().iter());
    points
}

/// Kernels for every sample point of a grid, reusable across `(γ, μ)`.
#[derive(Clone, Debug)]
pub struct BandSweep {
    v: VFunction,
    resolution: usize,
    kernels: Vec<ResolventKernel>,
}

impl BandSweep {
    pub fn new(v: &VFunction, resolution: usize) -> Result<Self, Error> {
        if resolution < MIN_RESOLUTION {
            return Err(Error::InvalidConfig("band resolution must be at least 8"));
        }
        let points = sample_points(resolution);
        let kernels = map_points(&points, |k| ResolventKernel::new(v, *k));
        Ok(BandSweep {
            v: v.clone(),
            resolution,
            kernels,
        })
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn assemble(&self, params: &ModelParams) -> Result<BandStructure, Error> {
        params.validate()?;
        let windows = map_points(&self.kernels, |kernel| find_discrete_spectrum_with(kernel, params));
        let below = self.branch(params, &windows, Side::Below);
        let above = self.branch(params, &windows, Side::Above);

        let mut intervals = Vec::with_capacity(3);
        intervals.push(Interval {
            lo: LOWER_THRESHOLD,
            hi: UPPER_THRESHOLD,
        });
        if let Some(b) = &below {
            let hi = if b.complete { b.extrema.max } else { LOWER_THRESHOLD };
            intervals.push(Interval { lo: b.extrema.min, hi });
        }
        if let Some(b) = &above {
            let lo = if b.complete { b.extrema.min } else { UPPER_THRESHOLD };
            intervals.push(Interval { lo, hi: b.extrema.max });
        }
        Ok(BandStructure {
            intervals: merge_intervals(intervals),
            resolution: self.resolution,
            below,
            above,
            windows,
        })
    }

    fn branch(&self, params: &ModelParams, windows: &[SpectralWindow], side: Side) -> Option<Branch> {
        let pick = |w: &SpectralWindow| match side {
            Side::Below => w.eigen_below,
            Side::Above => w.eigen_above,
        };
        let mut found: Option<BranchExtrema> = None;
        let mut complete = true;
        for w in windows {
            let Some(z) = pick(w) else {
                complete = false;
                continue;
            };
            let e = found.get_or_insert(BranchExtrema {
                min: z,
                max: z,
                argmin: w.k,
                argmax: w.k,
            });
            if z < e.min {
                e.min = z;
                e.argmin = w.k;
            }
            if z > e.max {
                e.max = z;
                e.argmax = w.k;
            }
        }
        let mut extrema = found?;
        let eval = |k: TorusPoint| pick(&find_discrete_spectrum_with(&ResolventKernel::new(&self.v, k), params));
        let h = TAU / self.resolution as f64;
        // the outer endpoint always bounds the spectrum; the inner one only
        // matters when the branch never touches the band
        let (polish_min, polish_max) = match side {
            Side::Below => (true, complete),
            Side::Above => (complete, true),
        };
        if polish_min {
            let (k, z) = compass_search(|k| eval(k).unwrap_or(f64::INFINITY), extrema.argmin, extrema.min, h);
            extrema.argmin = k;
            extrema.min = z;
        }
        if polish_max {
            let (k, z) = compass_search(|k| eval(k).map_or(f64::INFINITY, |z| -z), extrema.argmax, -extrema.max, h);
            extrema.argmax = k;
            extrema.max = -z;
        }
        Some(Branch { extrema, complete })
    }
}

/// Minimises `f` from `(start, f(start))` over the 26 neighbours at spacing
/// `step/2`, halving the spacing whenever no neighbour improves.
fn compass_search<F: Fn(TorusPoint) -> f64>(f: F, start: TorusPoint, value: f64, grid_step: f64) -> (TorusPoint, f64) {
    let mut best = (start, value);
    let mut step = 0.5 * grid_step;
    let floor = grid_step * 0.5.powi(POLISH_DEPTH);
    let mut moves = 0;
    while step > floor && moves < 200 {
        let mut improved = false;
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if dx == 0 && dy == 0 && dz == 0 {
                        continue;
                    }
                    let c = best.0.coords();
                    let k = TorusPoint::new([
                        c[0] + dx as f64 * step,
                        c[1] + dy as f64 * step,
                        c[2] + dz as f64 * step,
                    ]);
                    let val = f(k);
                    if val < best.1 {
                        best = (k, val);
                        improved = true;
                    }
                }
            }
        }
        if improved {
            moves += 1;
        } else {
            step *= 0.5;
        }
    }
    best
}

fn merge_intervals(mut intervals: Vec<Interval>) -> Vec<Interval> {
    intervals.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let mut out: Vec<Interval> = Vec::with_capacity(intervals.len());
    for iv in intervals {
        match out.last_mut() {
            Some(last) if iv.lo - last.hi < MERGE_TOL => last.hi = last.hi.max(iv.hi),
            _ => out.push(iv),
        }
    }
    out
}

fn map_points<T: Sync, R: Send, F: Fn(&T) -> R + Sync + Send>(items: &[T], f: F) -> Vec<R> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// `σ_ess(A_μ)` on a `resolution³` grid.
pub fn assemble_bands(params: &ModelParams, v: &VFunction, resolution: usize) -> Result<BandStructure, Error> {
    BandSweep::new(v, resolution)?.assemble(params)
}

/// Extreme values of one eigenvalue branch and where they are attained.
pub fn branch_extrema(structure: &BandStructure, side: Side) -> Option<BranchExtrema> {
    match side {
        Side::Below => structure.below,
        Side::Above => structure.above,
    }
    .map(|b| b.extrema)
}
