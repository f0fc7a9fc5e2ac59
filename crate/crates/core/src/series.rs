//! Finite trigonometric series on the torus and the coupling function `v`.
//!
//! A term is indexed by `m ∈ ℤ³` and stands for `Π_j b(m_j, p_j)` with
//! `b(0, x) = 1`, `b(n, x) = cos(n x)` for `n > 0` and `b(n, x) = sin(|n| x)`
//! for `n < 0`. Products are reduced back into this basis with the
//! product-to-sum identities, so squares of a coupling function stay exact.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent f64 methods win once std is linked
use num_traits::Float;

use crate::error::Error;
use crate::lattice::TorusPoint;

/// Largest per-axis harmonic accepted in a coupling function.
pub const MAX_DEGREE: i8 = 4;

/// Multi-index of a product basis function.
pub type Harmonic = [i8; 3];

/// `b(n, x)`.
#[inline]
pub fn basis(n: i8, x: f64) -> f64 {
    match n {
        0 => 1.0,
        n if n > 0 => (f64::from(n) * x).cos(),
        n => (f64::from(-n) * x).sin(),
    }
}

/// `b(a, x) · b(b, x)` as at most two basis terms.
fn mul_basis(a: i8, b: i8) -> [(i8, f64); 2] {
    if a == 0 {
        return [(b, 1.0), (0, 0.0)];
    }
    if b == 0 {
        return [(a, 1.0), (0, 0.0)];
    }
    let (x, y) = (a.abs(), b.abs());
    match (a > 0, b > 0) {
        (true, true) => [((x - y).abs(), 0.5), (x + y, 0.5)],
        (false, false) => [((x - y).abs(), 0.5), (x + y, -0.5)],
        // sin x·cos y = ½ sin(x+y) + ½ sin(x-y)
        (false, true) | (true, false) => {
            let (s, c) = if a < 0 { (x, y) } else { (y, x) };
            let diff = match s.cmp(&c) {
                core::cmp::Ordering::Greater => (-(s - c), 0.5),
                core::cmp::Ordering::Less => (-(c - s), -0.5),
                core::cmp::Ordering::Equal => (0, 0.0),
            };
            [(-(s + c), 0.5), diff]
        }
    }
}

/// A finite real trigonometric series on the torus.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrigSeries {
    terms: BTreeMap<Harmonic, f64>,
}

impl TrigSeries {
    pub fn zero() -> Self {
        TrigSeries::default()
    }

    pub fn constant(c: f64) -> Self {
        let mut s = TrigSeries::zero();
        s.add_term([0, 0, 0], c);
        s
    }

    /// A single basis function `b(n, p_axis)`, `axis ∈ 0..3`.
    pub fn harmonic(axis: usize, n: i8) -> Self {
        let mut m = [0; 3];
        m[axis] = n;
        let mut s = TrigSeries::zero();
        s.add_term(m, 1.0);
        s
    }

    pub fn add_term(&mut self, m: Harmonic, c: f64) {
        if c == 0.0 {
            return;
        }
        let slot = self.terms.entry(m).or_insert(0.0);
        *slot += c;
        if *slot == 0.0 {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (Harmonic, f64)> + '_ {
        self.terms.iter().map(|(m, c)| (*m, *c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    /// Largest `|m_j|` over all terms and axes.
    pub fn degree(&self) -> i8 {
        self.terms
            .keys()
            .flat_map(|m| m.iter().map(|n| n.abs()))
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, p: &[f64; 3]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| c * basis(m[0], p[0]) * basis(m[1], p[1]) * basis(m[2], p[2]))
            .sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = TrigSeries::zero();
        for (m, c) in self.terms() {
            out.add_term(m, c * factor);
        }
        out
    }

    pub fn add(&self, other: &TrigSeries) -> Self {
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m, c);
        }
        out
    }

    pub fn mul(&self, other: &TrigSeries) -> Self {
        let mut out = TrigSeries::zero();
        for (ma, ca) in self.terms() {
            for (mb, cb) in other.terms() {
                let f0 = mul_basis(ma[0], mb[0]);
                let f1 = mul_basis(ma[1], mb[1]);
                let f2 = mul_basis(ma[2], mb[2]);
                for &(n0, c0) in &f0 {
                    for &(n1, c1) in &f1 {
                        for &(n2, c2) in &f2 {
                            let w = c0 * c1 * c2;
                            if w != 0.0 {
                                out.add_term([n0, n1, n2], ca * cb * w);
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// `∫_{T³} s(p) dp`.
    pub fn integral(&self) -> f64 {
        self.terms
            .get(&[0, 0, 0])
            .map_or(0.0, |c| c * crate::lattice::TAU.powi(3))
    }

    /// Taylor coefficients of `r ↦ s(p + r ω)` at `r = 0`, orders `0..=N-1`.
    pub fn taylor_along<const N: usize>(&self, p: &[f64; 3], dir: &[f64; 3]) -> [f64; N] {
        let mut out = [0.0; N];
        for (m, c) in self.terms() {
            let mut acc = [0.0; N];
            acc[0] = c;
            for j in 0..3 {
                let factor = axis_taylor::<N>(m[j], p[j], dir[j]);
                let mut next = [0.0; N];
                for (a, &x) in acc.iter().enumerate() {
                    for (b, &y) in factor.iter().enumerate().take(N - a) {
                        next[a + b] += x * y;
                    }
                }
                acc = next;
            }
            for (o, a) in out.iter_mut().zip(acc) {
                *o += a;
            }
        }
        out
    }
}

fn axis_taylor<const N: usize>(n: i8, x0: f64, w: f64) -> [f64; N] {
    let mut out = [0.0; N];
    if n == 0 {
        out[0] = 1.0;
        return out;
    }
    let freq = f64::from(n.abs());
    let a = freq * x0;
    let (s, c) = (a.sin(), a.cos());
    // derivatives of cos(a + t): cos, -sin, -cos, sin; of sin(a + t): sin, cos, -sin, -cos
    let cycle = if n > 0 { [c, -s, -c, s] } else { [s, c, -s, -c] };
    let mut pow = 1.0;
    let mut fact = 1.0;
    for (k, o) in out.iter_mut().enumerate() {
        if k > 0 {
            pow *= freq * w;
            fact *= k as f64;
        }
        *o = cycle[k % 4] * pow / fact;
    }
    out
}

/// The real-analytic coupling function `v`, a trigonometric series with
/// per-axis degree at most [`MAX_DEGREE`].
#[derive(Clone, Debug, PartialEq)]
pub struct VFunction(TrigSeries);

impl VFunction {
    pub fn new<I: IntoIterator<Item = (Harmonic, f64)>>(terms: I) -> Result<Self, Error> {
        let mut s = TrigSeries::zero();
        for (m, c) in terms {
            if !c.is_finite() {
                return Err(Error::InvalidCoupling("non-finite coefficient"));
            }
            s.add_term(m, c);
        }
        VFunction::from_series(s)
    }

    pub fn from_series(s: TrigSeries) -> Result<Self, Error> {
        if s.degree() > MAX_DEGREE {
            return Err(Error::InvalidCoupling("harmonic index exceeds 4"));
        }
        Ok(VFunction(s))
    }

    pub fn constant(c: f64) -> Self {
        VFunction(TrigSeries::constant(c))
    }

    pub fn series(&self) -> &TrigSeries {
        &self.0
    }

    pub fn terms(&self) -> impl Iterator<Item = (Harmonic, f64)> + '_ {
        self.0.terms()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn eval(&self, p: TorusPoint) -> f64 {
        self.0.eval(&p.coords())
    }

    pub fn eval_raw(&self, p: &[f64; 3]) -> f64 {
        self.0.eval(p)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        VFunction(self.0.scaled(factor))
    }

    pub fn squared(&self) -> TrigSeries {
        self.0.mul(&self.0)
    }

    /// `∫ v² dp`.
    pub fn norm_sq(&self) -> f64 {
        self.squared().integral()
    }

    /// Order of vanishing of `v` at `p`: the smallest `n ≤ max_order` such
    /// that some directional derivative of order `n` is nonzero, or `None`
    /// if all of them vanish.
    pub fn vanishing_order(&self, p: TorusPoint, max_order: usize) -> Option<usize> {
        const DIRS: [[f64; 3]; 10] = [
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
            [1.0, 1.0, 0.0],
            [1.0, 0.0, 1.0],
            [0.0, 1.0, 1.0],
            [1.0, -1.0, 0.0],
            [1.0, 1.0, 1.0],
            [0.267_261, 0.534_522, 0.801_784],
            [-0.717_137, 0.597_614, 0.358_569],
        ];
        let scale: f64 = self.terms().map(|(_, c)| c.abs()).sum();
        let deg = f64::from(self.0.degree().max(1));
        let coords = p.coords();
        let mut best: Option<usize> = None;
        for dir in DIRS {
            let coeffs = self.0.taylor_along::<8>(&coords, &dir);
            let mut bound = scale;
            for (n, &a) in coeffs.iter().enumerate().take(max_order.min(7) + 1) {
                if n > 0 {
                    bound *= deg * 2.0 / n as f64;
                }
                if a.abs() > 1e-10 * bound.max(1e-300) {
                    best = Some(best.map_or(n, |b| b.min(n)));
                    break;
                }
            }
        }
        best
    }
}

/// Per-axis lookup tables of basis values on fixed 1-D node sets, used to
/// evaluate a series over a tensor grid without repeated trigonometry.
pub(crate) struct GridTables {
    coeffs: Vec<f64>,
    /// `tables[axis][term][node]`
    tables: [Vec<Vec<f64>>; 3],
}

impl GridTables {
    pub(crate) fn new(series: &TrigSeries, nodes: [&[f64]; 3]) -> Self {
        let mut coeffs = Vec::with_capacity(series.len());
        let mut tables: [Vec<Vec<f64>>; 3] = Default::default();
        for (m, c) in series.terms() {
            coeffs.push(c);
            for axis in 0..3 {
                tables[axis].push(nodes[axis].iter().map(|&x| basis(m[axis], x)).collect());
            }
        }
        GridTables { coeffs, tables }
    }

    /// Fill `out[i2]` with the series at `(x0[i0], x1[i1], x2[i2])`.
    pub(crate) fn eval_line(&self, i0: usize, i1: usize, out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (t, &c) in self.coeffs.iter().enumerate() {
            let w = c * self.tables[0][t][i0] * self.tables[1][t][i1];
            if w == 0.0 {
                continue;
            }
            for (o, &b) in out.iter_mut().zip(&self.tables[2][t]) {
                *o += w * b;
            }
        }
    }
}
