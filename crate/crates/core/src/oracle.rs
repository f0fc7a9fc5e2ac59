//! Finite-dimensional check of the determinant solver.
//!
//! Replacing `L²(T³)` by piecewise constants on the `n³` cell-centred grid
//! compresses `A_μ(k)` to a symmetric arrowhead matrix
//!
//! ```text
//! [ w0(k)   b_1  …  b_N ]
//! [ b_1     d_1         ]      d_j = w1(k, t_j),  b_j = μ v(t_j) h^{3/2}
//! [ ⋮            ⋱      ]
//! [ b_N              d_N ]
//! ```
//!
//! whose secular equation `w0 - z = Σ b_j² / (d_j - z)` is the midpoint-rule
//! version of `Δ_μ(k; z) = 0`.

use alloc::vec::Vec;

#[allow(unused_imports)] // inherent f64 methods win once std is linked
use num_traits::Float;

use crate::determinant::ModelParams;
use crate::error::Error;
use crate::lattice::{w0, w1, TorusPoint, TAU};
use crate::quadrature::midpoint_nodes;
use crate::series::VFunction;

#[derive(Clone, Debug, PartialEq)]
pub struct DiscretizedOperator {
    pub k: TorusPoint,
    pub grid_n: usize,
    /// `w0(k)` followed by `w1(k, t_j)` for the `n³` nodes.
    pub diagonal: Vec<f64>,
    pub border: Vec<f64>,
}

pub fn discretize(params: &ModelParams, v: &VFunction, k: TorusPoint, n: usize) -> Result<DiscretizedOperator, Error> {
    if n < 4 {
        return Err(Error::InvalidConfig("oracle grid needs at least 4 nodes per axis"));
    }
    let h = TAU / n as f64;
    let scale = params.mu * (h * h * h).sqrt();
    let nodes = midpoint_nodes(n);
    let mut diagonal = Vec::with_capacity(1 + n * n * n);
    let mut border = Vec::with_capacity(n * n * n);
    diagonal.push(w0(k, params.gamma));
    for &x in &nodes {
        for &y in &nodes {
            for &z in &nodes {
                let t = [x, y, z];
                diagonal.push(w1(k, TorusPoint::from(t)));
                border.push(scale * v.eval_raw(&t));
            }
        }
    }
    Ok(DiscretizedOperator {
        k,
        grid_n: n,
        diagonal,
        border,
    })
}

impl DiscretizedOperator {
    pub fn dimension(&self) -> usize {
        self.diagonal.len()
    }

    /// `w0 - z - Σ b_j² / (d_j - z)`.
    pub fn secular(&self, z: f64) -> f64 {
        let tail: f64 = self
            .border
            .iter()
            .zip(&self.diagonal[1..])
            .map(|(b, d)| b * b / (d - z))
            .sum();
        self.diagonal[0] - z - tail
    }

    /// Dense symmetric matrix, row-major.
    pub fn to_dense(&self) -> Vec<f64> {
        let dim = self.dimension();
        let mut a = alloc::vec![0.0; dim * dim];
        for (i, d) in self.diagonal.iter().enumerate() {
            a[i * dim + i] = *d;
        }
        for (j, b) in self.border.iter().enumerate() {
            a[j + 1] = *b;
            a[(j + 1) * dim] = *b;
        }
        a
    }
}

/// Lowest and highest eigenvalue of the arrowhead matrix.
///
/// Nodes with `b_j = 0` decouple and are eigenvalues themselves; the outermost
/// secular roots lie below the smallest and above the largest coupled pole,
/// where the secular function is monotone, and are found by bisection to
/// rounding resolution.
pub fn extreme_eigenvalues(op: &DiscretizedOperator) -> (f64, f64) {
    let diag = &op.diagonal[1..];
    let d_min = diag.iter().copied().fold(f64::INFINITY, f64::min);
    let d_max = diag.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let coupled = || op.border.iter().zip(diag).filter(|(b, _)| **b != 0.0).map(|(_, d)| *d);
    let pole_lo = coupled().fold(f64::INFINITY, f64::min);
    let pole_hi = coupled().fold(f64::NEG_INFINITY, f64::max);
    if !pole_lo.is_finite() {
        let a = op.diagonal[0];
        return (a.min(d_min), a.max(d_max));
    }

    let f = |z: f64| op.secular(z);
    let mut width = 1.0;
    while f(pole_lo - width) <= 0.0 {
        width *= 2.0;
    }
    let lowest = bisect_decreasing(&f, pole_lo - width, pole_lo);
    let mut width = 1.0;
    while f(pole_hi + width) >= 0.0 {
        width *= 2.0;
    }
    let highest = bisect_decreasing(&f, pole_hi, pole_hi + width);
    (lowest.min(d_min), highest.max(d_max))
}

fn bisect_decreasing<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64) -> f64 {
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return mid;
        }
        let val = f(mid);
        if val > 0.0 {
            lo = mid;
        } else if val < 0.0 {
            hi = mid;
        } else {
            return mid;
        }
    }
}
