//! Quadrature building blocks: Gauss–Legendre nodes, composite rules, and
//! an adaptive Gauss–Kronrod integrator.

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

/// Which measure a [`QuadratureRule`] discretizes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeasureTag {
    /// Plain `dx` on `[lo, hi]`.
    Lebesgue { lo: f64, hi: f64 },
    /// `exp(-2|x|^beta) dx` on the whole line (truncated).
    FreudSquared { beta: f64 },
    /// Gauss rule generated from a recurrence table for the same measure.
    FreudGauss { beta: f64 },
    /// `exp(-x) dx` on `(0, inf)`.
    Laguerre,
    /// `dx` on `(0, inf)`.
    HalfLine,
}

/// Nodes and positive weights approximating `∫ g dμ ≈ Σ w_k g(x_k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub measure: MeasureTag,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut g: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| if w == 0.0 { 0.0 } else { w * g(x) })
            .sum()
    }

    /// Total mass `Σ w_k`.
    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Largest `|x_k + x_{n-1-k}|`; zero for a rule closed under negation.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.nodes.len();
        (0..n)
            .map(|k| (self.nodes[k] + self.nodes[n - 1 - k]).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.nodes.windows(2).all(|w| w[0] < w[1])
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, ascending.
///
/// Newton iteration on the Legendre three-term recurrence from the
/// Chebyshev-like initial guesses.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss–Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() <= 1e-16 * z.abs().max(1.0) {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let dp = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Composite Gauss–Legendre rule over consecutive panels given by `breaks`.
pub fn composite_legendre(breaks: &[f64], order: usize) -> (Vec<f64>, Vec<f64>) {
    let (gx, gw) = gauss_legendre(order);
    let mut nodes = Vec::with_capacity((breaks.len().saturating_sub(1)) * order);
    let mut weights = Vec::with_capacity(nodes.capacity());
    for pair in breaks.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for (x, w) in gx.iter().zip(&gw) {
            nodes.push(mid + half * x);
            weights.push(half * w);
        }
    }
    (nodes, weights)
}

/// Panel breaks on `[0, r]`: `panels` uniform panels, with the first one
/// further split geometrically toward 0 (`grading` levels) so that weak
/// algebraic singularities at the origin are resolved.
pub fn graded_breaks(r: f64, panels: usize, grading: usize) -> Vec<f64> {
    let h = r / panels as f64;
    let mut breaks = vec![0.0];
    for k in (1..=grading).rev() {
        breaks.push(h * 0.5f64.powi(k as i32));
    }
    for j in 1..=panels {
        breaks.push(h * j as f64);
    }
    breaks
}

// Gauss–Kronrod 7/15 abscissae and weights (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: FnMut(f64) -> f64>(g: &mut F, a: f64, b: f64) -> (f64, f64) {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = g(mid);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = g(mid - dx) + g(mid + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * half, ((kron - gauss) * half).abs())
}

/// Outcome of [`integrate_adaptive`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveIntegral {
    pub value: f64,
    pub error_estimate: f64,
    pub intervals: usize,
    pub converged: bool,
}

/// Globally adaptive Gauss–Kronrod integration of `g` over `[a, b]`,
/// starting from `initial` equal panels and bisecting the worst panel
/// until the summed error estimate meets `max(abs_tol, rel_tol·|I|)`.
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(
    mut g: F,
    a: f64,
    b: f64,
    initial: usize,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> AdaptiveIntegral {
    let initial = initial.max(1);
    let mut panels: BinaryHeap<Panel> = BinaryHeap::with_capacity(initial * 4);
    let h = (b - a) / initial as f64;
    for j in 0..initial {
        let lo = a + h * j as f64;
        let hi = if j + 1 == initial { b } else { lo + h };
        let (v, e) = gk15(&mut g, lo, hi);
        panels.push(Panel { lo, hi, value: v, error: e });
    }
    let mut value: f64 = panels.iter().map(|p| p.value).sum();
    let mut error: f64 = panels.iter().map(|p| p.error).sum();
    let finish = |panels: &BinaryHeap<Panel>, converged: Option<bool>, abs_tol: f64, rel_tol: f64| {
        let value: f64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        let converged = converged.unwrap_or(error <= abs_tol.max(rel_tol * value.abs()));
        AdaptiveIntegral { value, error_estimate: error, intervals: panels.len(), converged }
    };
    loop {
        if error <= abs_tol.max(rel_tol * value.abs()) || panels.len() >= max_intervals {
            // resum exactly; the running totals only steer the loop
            let exact: f64 = panels.iter().map(|p| p.error).sum();
            if exact <= abs_tol.max(rel_tol * value.abs()) || panels.len() >= max_intervals {
                return finish(&panels, None, abs_tol, rel_tol);
            }
            error = exact;
        }
        let worst = panels.pop().expect("at least one panel");
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            // Interval at float resolution; nothing left to split.
            panels.push(worst);
            return finish(&panels, Some(false), abs_tol, rel_tol);
        }
        let (v1, e1) = gk15(&mut g, worst.lo, mid);
        let (v2, e2) = gk15(&mut g, mid, worst.hi);
        value += v1 + v2 - worst.value;
        error += e1 + e2 - worst.error;
        panels.push(Panel { lo: worst.lo, hi: mid, value: v1, error: e1 });
        panels.push(Panel { lo: mid, hi: worst.hi, value: v2, error: e2 });
    }
}

struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Maximizes a unimodal `g` on `[a, b]` by golden-section search; returns
/// `(argmax, max)`.
pub fn golden_max<F: FnMut(f64) -> f64>(mut g: F, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let mut gc = g(c);
    let mut gd = g(d);
    for _ in 0..iters {
        if gc >= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - ratio * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + ratio * (b - a);
            gd = g(d);
        }
        if (b - a).abs() <= 1e-15 * (a.abs() + b.abs()).max(1e-300) {
            break;
        }
    }
    if gc >= gd {
        (c, gc)
    } else {
        (d, gd)
    }
}

/// Scans `g` on a uniform grid over `[a, b]` with `points` samples and
/// polishes every interior local maximum (and the endpoints) by
/// golden-section refinement. Non-finite samples return `(x, +inf)`.
pub fn refined_grid_max<F: FnMut(f64) -> f64>(mut g: F, a: f64, b: f64, points: usize) -> (f64, f64) {
    let points = points.max(3);
    let h = (b - a) / (points - 1) as f64;
    let xs: Vec<f64> = (0..points)
        .map(|i| if i + 1 == points { b } else { a + h * i as f64 })
        .collect();
    let mut vals = Vec::with_capacity(points);
    for &x in &xs {
        let v = g(x);
        if !v.is_finite() {
            return (x, f64::INFINITY);
        }
        vals.push(v);
    }
    let mut best = (xs[0], vals[0]);
    for i in 0..points {
        if vals[i] > best.1 {
            best = (xs[i], vals[i]);
        }
    }
    for i in 1..points - 1 {
        if vals[i] >= vals[i - 1] && vals[i] >= vals[i + 1] {
            let (x, v) = golden_max(&mut g, xs[i - 1], xs[i + 1], 80);
            if v.is_finite() && v > best.1 {
                best = (x, v);
            }
        }
    }
    best
}
