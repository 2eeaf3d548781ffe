//! Laguerre polynomials `P_n`, Laguerre functions `𝒫_n = P_n e^{-x/2}`
//! and tensor-product expansions on `[0, ∞)^d`.
//!
//! The functions use the decaying half-weight `e^{-x/2}`; with the growing
//! factor `e^{x/2}` they would not be square integrable and could not form
//! an orthonormal basis of `L²(0, ∞)`.

use std::io::Write;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::quadrature::{composite_legendre, MeasureTag, QuadratureRule};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LaguerreError {
    #[error("argument {0} is negative")]
    NegativeArgument(f64),
    #[error("coefficients did not stabilize (last change {change:.3e} at {nodes} nodes per axis)")]
    IntegrationDivergence { nodes: usize, change: f64 },
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("probe {0:?} has the wrong dimension or a negative coordinate")]
    InvalidProbe(Vec<f64>),
}

/// Relative stability required between panel doublings.
pub const COEFFICIENT_STABILITY: f64 = 1e-10;

/// `P_n(x)` via `(n+1)P_{n+1} = (2n+1-x)P_n - nP_{n-1}`.
pub fn laguerre_poly(n: usize, x: f64) -> Result<f64, LaguerreError> {
    if x < 0.0 {
        return Err(LaguerreError::NegativeArgument(x));
    }
    Ok(laguerre_all(n, x)[n])
}

/// `𝒫_n(x) = P_n(x) e^{-x/2}`.
pub fn laguerre_fn(n: usize, x: f64) -> Result<f64, LaguerreError> {
    Ok(laguerre_poly(n, x)? * (-0.5 * x).exp())
}

fn laguerre_all(n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    if n == 0 {
        return out;
    }
    out.push(1.0 - x);
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - x) * out[k] - kf * out[k - 1]) / (kf + 1.0);
        out.push(next);
    }
    out
}

/// `[𝒫_0(x), …, 𝒫_n(x)]`.
pub fn laguerre_fn_all(n: usize, x: f64) -> Vec<f64> {
    let s = (-0.5 * x).exp();
    laguerre_all(n, x).into_iter().map(|p| p * s).collect()
}

/// Gauss–Laguerre rule for `e^{-x} dx` with `n` nodes.
///
/// Nodes are eigenvalues of the Jacobi matrix (diagonal `2k+1`,
/// off-diagonal `k+1`) polished by Newton steps on `P_n`; weights use
/// `x_i / ((n+1)^2 P_{n+1}(x_i)^2)`.
pub fn gauss_laguerre(n: usize) -> QuadratureRule {
    let (nodes, log_w) = gauss_laguerre_log(n);
    let weights = log_w.iter().map(|l| l.exp()).collect();
    QuadratureRule { nodes, weights, measure: MeasureTag::Laguerre }
}

/// Same rule, returning `ln w_i` so callers can fold `e^{x_i}` in.
fn gauss_laguerre_log(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut j = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        j[(k, k)] = 2.0 * k as f64 + 1.0;
        if k + 1 < n {
            j[(k, k + 1)] = (k + 1) as f64;
            j[(k + 1, k)] = (k + 1) as f64;
        }
    }
    let mut x: Vec<f64> = SymmetricEigen::new(j).eigenvalues.iter().copied().collect();
    x.sort_by(f64::total_cmp);
    let mut logw = Vec::with_capacity(n);
    for xi in x.iter_mut() {
        for _ in 0..4 {
            let p = laguerre_all(n, *xi);
            // P_n'(x) = n (P_n - P_{n-1}) / x
            let dp = n as f64 * (p[n] - p[n - 1]) / *xi;
            let step = p[n] / dp;
            if !step.is_finite() {
                break;
            }
            *xi -= step;
            if step.abs() <= 1e-16 * xi.abs() {
                break;
            }
        }
        let p_next = laguerre_all(n + 1, *xi)[n + 1];
        let nf = (n + 1) as f64;
        logw.push(xi.ln() - 2.0 * (nf * p_next.abs()).ln());
    }
    (x, logw)
}

/// Rule for plain `dx` on `(0, ∞)`: Gauss–Laguerre with weights `w_i e^{x_i}`.
pub fn half_line_rule(n: usize) -> QuadratureRule {
    let (nodes, log_w) = gauss_laguerre_log(n);
    let weights = nodes.iter().zip(&log_w).map(|(x, l)| (l + x).exp()).collect();
    QuadratureRule { nodes, weights, measure: MeasureTag::HalfLine }
}

/// `a_n(f) = ∫ f 𝒫_n dx` over `{0..=N}^d`, row-major in the multi-index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaguerreCoefficients {
    pub dim: usize,
    pub cap: usize,
    pub values: Vec<f64>,
    /// Integration box `[0, radius]^d`.
    pub radius: f64,
    pub nodes_per_axis: usize,
    pub last_change: f64,
}

impl LaguerreCoefficients {
    fn stride(&self) -> usize {
        self.cap + 1
    }

    pub fn index_of(&self, multi: &[usize]) -> usize {
        multi.iter().fold(0, |acc, &m| acc * self.stride() + m)
    }

    pub fn get(&self, multi: &[usize]) -> f64 {
        self.values[self.index_of(multi)]
    }

    /// All multi-indices in storage order.
    pub fn multi_indices(&self) -> Vec<Vec<usize>> {
        let s = self.stride();
        (0..self.values.len())
            .map(|mut flat| {
                let mut m = vec![0; self.dim];
                for slot in m.iter_mut().rev() {
                    *slot = flat % s;
                    flat /= s;
                }
                m
            })
            .collect()
    }

    /// `Σ_{n <= cap (componentwise)} a_n 𝒫_n(x)` truncated at per-axis cap `n_cap`.
    pub fn partial_sum(&self, n_cap: usize, x: &[f64]) -> Result<f64, LaguerreError> {
        if x.len() != self.dim || x.iter().any(|v| *v < 0.0) {
            return Err(LaguerreError::InvalidProbe(x.to_vec()));
        }
        let n_cap = n_cap.min(self.cap);
        let axes: Vec<Vec<f64>> = x.iter().map(|&xi| laguerre_fn_all(self.cap, xi)).collect();
        let mut total = 0.0;
        for (m, v) in self.multi_indices().iter().zip(&self.values) {
            if m.iter().all(|&k| k <= n_cap) {
                total += v * m.iter().zip(&axes).map(|(&k, a)| a[k]).product::<f64>();
            }
        }
        Ok(total)
    }

    /// CSV with columns `n1..nd,value`.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<String> = (1..=self.dim).map(|i| format!("n{i}")).collect();
        header.push("value".into());
        w.write_record(&header)?;
        for (m, v) in self.multi_indices().iter().zip(&self.values) {
            let mut row: Vec<String> = m.iter().map(|k| k.to_string()).collect();
            row.push(crate::io::fmt_f64(*v));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Gauss–Legendre order per panel of the composite axis rule.
const PANEL_ORDER: usize = 16;
const MIN_PANELS: usize = 8;
const MAX_PANELS: usize = 1024;
/// Largest tensor grid evaluated, in function evaluations.
const MAX_GRID: usize = 20_000_000;
const MIN_RADIUS: f64 = 8.0;
const MAX_RADIUS: f64 = 8192.0;
/// `|f|` beyond the radius must fall below this fraction of its peak.
const TAIL_FRACTION: f64 = 1e-18;

/// `max |f|` over the coordinate rays and the diagonal at `t ∈ [lo, hi]`.
fn ray_max<F: Fn(&[f64]) -> f64>(f: &F, dim: usize, lo: f64, hi: f64, samples: usize) -> f64 {
    let mut m = 0.0f64;
    let mut x = vec![0.0; dim];
    for k in 0..=samples {
        let t = lo + (hi - lo) * k as f64 / samples as f64;
        for axis in 0..=dim {
            x.iter_mut().enumerate().for_each(|(i, v)| *v = if axis == dim || i == axis { t } else { 0.0 });
            let v = f(&x).abs();
            if !v.is_finite() {
                return f64::INFINITY;
            }
            m = m.max(v);
        }
    }
    m
}

/// Smallest `R = 8·2^j` beyond which `|f|` is negligible along the probe rays.
fn truncation_radius<F: Fn(&[f64]) -> f64>(f: &F, dim: usize) -> Result<f64, LaguerreError> {
    let mut r = MIN_RADIUS;
    let mut peak = ray_max(f, dim, 0.0, r, 64);
    while r <= MAX_RADIUS {
        let tail = ray_max(f, dim, r, 2.0 * r, 64);
        if !tail.is_finite() || !peak.is_finite() {
            break;
        }
        if tail <= TAIL_FRACTION * peak.max(f64::MIN_POSITIVE) {
            return Ok(r);
        }
        peak = peak.max(tail);
        r *= 2.0;
    }
    Err(LaguerreError::IntegrationDivergence { nodes: 0, change: f64::INFINITY })
}

/// Tensor coefficients on the product of one axis rule, with `Σ |w f|`.
fn tensor_coefficients<F: Fn(&[f64]) -> f64>(f: &F, dim: usize, cap: usize, nodes: &[f64], weights: &[f64]) -> (Vec<f64>, f64) {
    let basis: Vec<Vec<f64>> = nodes.iter().map(|&x| laguerre_fn_all(cap, x)).collect();
    let k = nodes.len();
    let stride = cap + 1;
    let mut out = vec![0.0; stride.pow(dim as u32)];
    let mut mass = 0.0;
    let mut idx = vec![0usize; dim];
    let mut point = vec![0.0; dim];
    for flat in 0..k.pow(dim as u32) {
        let mut r = flat;
        for slot in idx.iter_mut().rev() {
            *slot = r % k;
            r /= k;
        }
        let mut w = 1.0;
        for (d, &i) in idx.iter().enumerate() {
            point[d] = nodes[i];
            w *= weights[i];
        }
        let fx = f(&point) * w;
        if fx == 0.0 {
            continue;
        }
        mass += fx.abs();
        // Accumulate fx * Π_d basis[idx_d][m_d] over all multi-indices m.
        let mut partial = vec![fx];
        for &i in &idx {
            let b = &basis[i];
            let mut next = Vec::with_capacity(partial.len() * stride);
            for v in &partial {
                for bk in b.iter() {
                    next.push(v * bk);
                }
            }
            partial = next;
        }
        for (o, v) in out.iter_mut().zip(&partial) {
            *o += v;
        }
    }
    (out, mass)
}

/// Tensor composite Gauss–Legendre coefficients on `[0, R]^d`, with `R`
/// set by the decay of `|f|` and the panel count doubled until every
/// coefficient changes by at most [`COEFFICIENT_STABILITY`] relative to
/// itself, or by round-off level `8 ε Σ|w f|`.
pub fn laguerre_coefficients<F: Fn(&[f64]) -> f64>(
    f: F,
    dim: usize,
    cap: usize,
) -> Result<LaguerreCoefficients, LaguerreError> {
    if dim == 0 {
        return Err(LaguerreError::ZeroDimension);
    }
    let radius = truncation_radius(&f, dim)?;
    let rule = |panels: usize| {
        let breaks: Vec<f64> = (0..=panels).map(|i| radius * i as f64 / panels as f64).collect();
        composite_legendre(&breaks, PANEL_ORDER)
    };
    let fits = |panels: usize| {
        panels <= MAX_PANELS && (panels * PANEL_ORDER).checked_pow(dim as u32).is_some_and(|g| g <= MAX_GRID)
    };
    let mut panels = MIN_PANELS.max((cap + 1).div_ceil(2));
    let (nodes, weights) = rule(panels);
    let (mut prev, _) = tensor_coefficients(&f, dim, cap, &nodes, &weights);
    let mut change = f64::INFINITY;
    while fits(2 * panels) {
        panels *= 2;
        let (nodes, weights) = rule(panels);
        let (next, mass) = tensor_coefficients(&f, dim, cap, &nodes, &weights);
        if next.iter().any(|v| !v.is_finite()) {
            return Err(LaguerreError::IntegrationDivergence { nodes: nodes.len(), change: f64::INFINITY });
        }
        let floor = 8.0 * f64::EPSILON * mass;
        change = prev.iter().zip(&next).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        let stable = prev.iter().zip(&next).all(|(a, b)| (a - b).abs() <= (COEFFICIENT_STABILITY * b.abs()).max(floor));
        if stable {
            return Ok(LaguerreCoefficients {
                dim,
                cap,
                values: next,
                radius,
                nodes_per_axis: nodes.len(),
                last_change: change,
            });
        }
        prev = next;
    }
    Err(LaguerreError::IntegrationDivergence { nodes: panels * PANEL_ORDER, change })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionRow {
    pub n: usize,
    /// Partial-sum value at each probe.
    pub values: Vec<f64>,
    pub max_error: f64,
    /// `Σ_{max_i n_i > N} |a_n|` over the stored coefficient grid.
    pub abs_tail: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionReport {
    pub probes: Vec<Vec<f64>>,
    pub exact: Vec<f64>,
    pub rows: Vec<ReconstructionRow>,
}

pub fn reconstruction_report<F: Fn(&[f64]) -> f64>(
    coeffs: &LaguerreCoefficients,
    f: F,
    probes: &[Vec<f64>],
    n_list: &[usize],
) -> Result<ReconstructionReport, LaguerreError> {
    let exact: Vec<f64> = probes.iter().map(|p| f(p)).collect();
    let indices = coeffs.multi_indices();
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let values = probes.iter().map(|p| coeffs.partial_sum(n, p)).collect::<Result<Vec<_>, _>>()?;
        let max_error = values.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let abs_tail = indices
            .iter()
            .zip(&coeffs.values)
            .filter(|(m, _)| m.iter().any(|&k| k > n))
            .map(|(_, v)| v.abs())
            .sum();
        rows.push(ReconstructionRow { n, values, max_error, abs_tail });
    }
    Ok(ReconstructionReport { probes: probes.to_vec(), exact, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn low_order_closed_forms() {
        for x in [0.0, 0.5, 1.0, 2.0, 7.5] {
            assert_eq!(laguerre_poly(0, x).unwrap(), 1.0);
            assert_abs_diff_eq!(laguerre_poly(1, x).unwrap(), 1.0 - x, epsilon = 1e-15);
        }
        for (x, v) in [(0.0, 1.0), (1.0, -0.5), (2.0, -1.0)] {
            assert_abs_diff_eq!(laguerre_poly(2, x).unwrap(), v, epsilon = 1e-15);
        }
    }

    #[test]
    fn value_at_origin_is_one() {
        for n in 0..=10 {
            assert_eq!(laguerre_fn(n, 0.0).unwrap(), 1.0);
        }
    }

    #[test]
    fn negative_argument_is_rejected() {
        assert_eq!(laguerre_poly(3, -0.1), Err(LaguerreError::NegativeArgument(-0.1)));
        assert!(laguerre_fn(0, -1.0).is_err());
    }

    #[test]
    fn gauss_laguerre_integrates_moments() {
        let r = gauss_laguerre(64);
        // ∫ x^k e^{-x} = k!
        let mut fact = 1.0;
        for k in 0..40 {
            if k > 0 {
                fact *= k as f64;
            }
            let v = r.integrate(|x| x.powi(k));
            assert!((v - fact).abs() <= 1e-11 * fact, "k = {k}: {v} vs {fact}");
        }
    }

    #[test]
    fn non_decaying_input_is_rejected() {
        assert!(matches!(
            laguerre_coefficients(|_: &[f64]| 1.0, 1, 2),
            Err(LaguerreError::IntegrationDivergence { .. })
        ));
        let c = laguerre_coefficients(|x: &[f64]| (-x[0]).exp(), 1, 4).unwrap();
        assert_eq!(c.radius, 64.0);
    }

    #[test]
    fn csv_header_lists_axes() {
        let c = laguerre_coefficients(|x: &[f64]| (-x[0] - x[1]).exp(), 2, 2).unwrap();
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("n1,n2,value\n"));
        assert_eq!(text.lines().count(), 10);
    }
}
