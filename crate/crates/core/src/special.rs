//! Small numerical kernels: Gauss–Legendre rules, exponentially scaled
//! modified Bessel functions of integer order, and compensated summation.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)] // inherent f64 methods win once std is linked
use num_traits::Float;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * z * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else if n == 1 { z } else { p1 };
            let prev = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * p - prev) / (z * z - 1.0);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    (
        x.iter().map(|t| mid + half * t).collect(),
        w.iter().map(|t| half * t).collect(),
    )
}

/// `e^{-x} I_n(x)` for `n = 0..out.len()`, `x ≥ 0`.
pub fn scaled_bessel_i(x: f64, out: &mut [f64]) {
    if x < 45.0 {
        series_scaled(x, out);
    } else {
        asymptotic_scaled(x, out);
    }
}

fn series_scaled(x: f64, out: &mut [f64]) {
    let half = 0.5 * x;
    let q = half * half;
    let scale = (-x).exp();
    let mut lead = 1.0; // (x/2)^n / n!
    for (n, o) in out.iter_mut().enumerate() {
        if n > 0 {
            lead *= half / n as f64;
        }
        let mut term = lead;
        let mut sum = term;
        let mut k = 0usize;
        loop {
            k += 1;
            term *= q / (k as f64 * (k + n) as f64);
            sum += term;
            if term <= 1e-17 * sum && k as f64 > half {
                break;
            }
            if k > 500 {
                break;
            }
        }
        *o = sum * scale;
    }
}

fn asymptotic_scaled(x: f64, out: &mut [f64]) {
    let pref = 1.0 / (2.0 * PI * x).sqrt();
    for (n, o) in out.iter_mut().enumerate() {
        let mu = 4.0 * (n * n) as f64;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..60 {
            let odd = (2 * k - 1) as f64;
            let next = -term * (mu - odd * odd) / (k as f64 * 8.0 * x);
            if next.abs() > term.abs() {
                break;
            }
            term = next;
            sum += term;
            if term.abs() < 1e-17 * sum.abs() {
                break;
            }
        }
        *o = pref * sum;
    }
}

/// Neumaier compensated accumulator; summation order is the call order.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl core::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Exp-sinh rule for `∫_0^∞ f(s) ds`: returns `(s_i, w_i)` with
/// `s = exp(π/2 · sinh t)` on a uniform `t` grid of step `h`.
pub fn exp_sinh_nodes(h: f64, t_min: f64, t_max: f64) -> Vec<(f64, f64)> {
    let count = ((t_max - t_min) / h).round() as usize;
    (0..=count)
        .map(|i| {
            let t = t_min + i as f64 * h;
            let s = (0.5 * PI * t.sinh()).exp();
            (s, h * 0.5 * PI * t.cosh() * s)
        })
        .collect()
}
