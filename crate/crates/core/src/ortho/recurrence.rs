use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::weight::WeightSpec;
use crate::mrs::{mrs_number, MrsError};
use crate::quadrature::{composite_legendre, graded_breaks, MeasureTag, QuadratureRule};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RecurrenceError {
    #[error("tolerance {0:e} is below the supported floor of 1e-12")]
    ToleranceTooSmall(f64),
    #[error("orthonormality residual {residual:.3e} still above {tol:.1e} after {doublings} node doublings")]
    NoConvergence { residual: f64, tol: f64, doublings: usize },
    #[error("diagonal recurrence term {value:.3e} at n = {n} is not below tolerance")]
    NonzeroDiagonal { n: usize, value: f64 },
    #[error("recurrence coefficient alpha_{n} = {value} is not positive")]
    NonPositiveAlpha { n: usize, value: f64 },
    #[error("degree {n} outside table range 0..={max}")]
    DegreeOutOfRange { n: usize, max: usize },
    #[error("gauss rule needs at least one node")]
    EmptyRule,
    #[error(transparent)]
    Mrs(#[from] MrsError),
}

/// Radius multiplier `s` in the truncation `r = s·a_{2N+4}`.
pub const TRUNCATION_SLACK: f64 = 1.5;
/// Node doublings attempted before giving up.
pub const MAX_DOUBLINGS: usize = 6;
const PANEL_ORDER: usize = 20;
const GRADING_LEVELS: usize = 30;

/// Provenance of the discretization behind a [`RecurrenceTable`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureMeta {
    pub nodes_used: usize,
    pub radius: f64,
    pub radius_slack: f64,
    pub residual: f64,
    pub tol: f64,
    pub doublings: usize,
    /// Largest `|∫ x p_n^2 dα|` seen before the diagonal was zeroed.
    pub max_diagonal: f64,
}

/// Orthonormal recurrence for `dα = exp(-2|x|^β) dx`:
/// `x p_n = α_n p_{n+1} + α_{n-1} p_{n-1}`, `p_{-1} = 0`, `p_0 = (∫dα)^{-1/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceTable {
    pub weight: WeightSpec,
    /// `α_0, …, α_N`.
    pub alphas: Vec<f64>,
    pub p0: f64,
    pub meta: QuadratureMeta,
}

#[derive(Serialize, Deserialize)]
struct TableJson {
    beta: f64,
    #[serde(rename = "N")]
    n: usize,
    p0: f64,
    alphas: Vec<f64>,
    residual: f64,
    nodes_used: usize,
    radius: f64,
}

/// Truncated composite rule for `dα` on `[-radius, radius]`, symmetric
/// about the origin, with `panels` uniform panels per half-line.
pub fn freud_rule(weight: WeightSpec, radius: f64, panels: usize) -> QuadratureRule {
    let breaks = graded_breaks(radius, panels, GRADING_LEVELS);
    let (half_x, half_w) = composite_legendre(&breaks, PANEL_ORDER);
    let m = half_x.len();
    let mut nodes = Vec::with_capacity(2 * m);
    let mut weights = Vec::with_capacity(2 * m);
    for k in (0..m).rev() {
        nodes.push(-half_x[k]);
        weights.push(half_w[k] * weight.density(half_x[k]));
    }
    for k in 0..m {
        nodes.push(half_x[k]);
        weights.push(half_w[k] * weight.density(half_x[k]));
    }
    QuadratureRule { nodes, weights, measure: MeasureTag::FreudSquared { beta: weight.beta } }
}

struct Stieltjes {
    mass: f64,
    alphas: Vec<f64>,
    max_diagonal: (usize, f64),
}

/// Discretized Stieltjes procedure producing `α_0..=α_n_max`.
fn stieltjes(rule: &QuadratureRule, n_max: usize) -> Stieltjes {
    let m = rule.len();
    let mass = rule.mass();
    let p0 = mass.powf(-0.5);
    let mut prev = vec![0.0; m];
    let mut cur = vec![p0; m];
    let mut next = vec![0.0; m];
    let mut alphas = Vec::with_capacity(n_max + 1);
    let mut max_diag = (0, 0.0f64);
    for n in 0..=n_max {
        let diag: f64 = (0..m).map(|k| rule.weights[k] * rule.nodes[k] * cur[k] * cur[k]).sum();
        if diag.abs() > max_diag.1 {
            max_diag = (n, diag.abs());
        }
        let beta_prev = if n == 0 { 0.0 } else { alphas[n - 1] };
        let mut norm2 = 0.0;
        for k in 0..m {
            let q = rule.nodes[k] * cur[k] - beta_prev * prev[k];
            next[k] = q;
            norm2 += rule.weights[k] * q * q;
        }
        let alpha = norm2.sqrt();
        alphas.push(alpha);
        let inv = if alpha > 0.0 { 1.0 / alpha } else { 0.0 };
        for v in next.iter_mut().take(m) {
            *v *= inv;
        }
        std::mem::swap(&mut prev, &mut cur);
        std::mem::swap(&mut cur, &mut next);
    }
    Stieltjes { mass, alphas, max_diagonal: max_diag }
}

/// `max_{i,j<=n} |Σ w p_i p_j - δ_ij|` for the polynomials defined by
/// `(p0, alphas)` on an arbitrary rule.
pub fn orthonormality_residual(p0: f64, alphas: &[f64], n: usize, rule: &QuadratureRule) -> f64 {
    let m = rule.len();
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    let sqrt_w: Vec<f64> = rule.weights.iter().map(|w| w.sqrt()).collect();
    let mut prev = vec![0.0; m];
    let mut cur: Vec<f64> = vec![p0; m];
    for j in 0..=n {
        rows.push(cur.iter().zip(&sqrt_w).map(|(p, s)| p * s).collect());
        if j == n {
            break;
        }
        let a = alphas[j];
        let b = if j == 0 { 0.0 } else { alphas[j - 1] };
        let nxt: Vec<f64> = (0..m).map(|k| (rule.nodes[k] * cur[k] - b * prev[k]) / a).collect();
        prev = cur;
        cur = nxt;
    }
    let mut worst = 0.0f64;
    for i in 0..=n {
        for j in i..=n {
            let g: f64 = rows[i].iter().zip(&rows[j]).map(|(a, b)| a * b).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g - target).abs());
        }
    }
    worst
}

/// Builds `α_0..=α_N` for `exp(-2|x|^β)` by the discretized Stieltjes
/// procedure with node doubling until the orthonormality residual, measured
/// on the next finer rule, is at most `tol`.
pub fn recurrence_coefficients(
    weight: WeightSpec,
    n_max: usize,
    tol: f64,
) -> Result<RecurrenceTable, RecurrenceError> {
    if !(tol >= 1e-12) {
        return Err(RecurrenceError::ToleranceTooSmall(tol));
    }
    let a = mrs_number(&weight, (2 * n_max + 4) as f64, 1e-12)?;
    let radius = TRUNCATION_SLACK * a;
    let base_panels = 8 + n_max / 4;

    let mut rule = freud_rule(weight, radius, base_panels);
    let mut current = stieltjes(&rule, n_max);
    let mut last_residual = f64::INFINITY;
    for doubling in 0..=MAX_DOUBLINGS {
        let finer = freud_rule(weight, radius, base_panels << (doubling + 1));
        let p0 = current.mass.powf(-0.5);
        let residual = orthonormality_residual(p0, &current.alphas, n_max, &finer);
        last_residual = residual;
        if residual <= tol {
            let (diag_n, diag) = current.max_diagonal;
            if diag >= tol {
                return Err(RecurrenceError::NonzeroDiagonal { n: diag_n, value: diag });
            }
            if let Some((n, &value)) = current.alphas.iter().enumerate().find(|(_, a)| !(**a > 0.0)) {
                return Err(RecurrenceError::NonPositiveAlpha { n, value });
            }
            return Ok(RecurrenceTable {
                weight,
                alphas: current.alphas,
                p0,
                meta: QuadratureMeta {
                    nodes_used: rule.len(),
                    radius,
                    radius_slack: TRUNCATION_SLACK,
                    residual,
                    tol,
                    doublings: doubling,
                    max_diagonal: diag,
                },
            });
        }
        rule = finer;
        current = stieltjes(&rule, n_max);
    }
    Err(RecurrenceError::NoConvergence { residual: last_residual, tol, doublings: MAX_DOUBLINGS })
}

impl RecurrenceTable {
    /// Largest degree `N` covered by the table.
    pub fn n_max(&self) -> usize {
        self.alphas.len() - 1
    }

    /// `∫ dα` recovered from `p0`.
    pub fn mass(&self) -> f64 {
        1.0 / (self.p0 * self.p0)
    }

    /// `p_n(x)` by the forward recurrence.
    pub fn eval(&self, n: usize, x: f64) -> Result<f64, RecurrenceError> {
        if n > self.n_max() {
            return Err(RecurrenceError::DegreeOutOfRange { n, max: self.n_max() });
        }
        Ok(*self.eval_all(n, x).last().unwrap())
    }

    /// `[p_0(x), …, p_n(x)]`; `n` may reach `N + 1`.
    pub fn eval_all(&self, n: usize, x: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(n + 1);
        let mut prev = 0.0;
        let mut cur = self.p0;
        out.push(cur);
        for j in 0..n {
            let b = if j == 0 { 0.0 } else { self.alphas[j - 1] };
            let nxt = (x * cur - b * prev) / self.alphas[j];
            prev = cur;
            cur = nxt;
            out.push(cur);
        }
        out
    }

    /// `Σ_j c_j p_j(x)` by Clenshaw-free forward summation.
    pub fn eval_series(&self, coeffs: &[f64], x: f64) -> f64 {
        if coeffs.is_empty() {
            return 0.0;
        }
        let p = self.eval_all(coeffs.len() - 1, x);
        coeffs.iter().zip(&p).map(|(c, p)| c * p).sum()
    }

    /// `nodes`-point Gauss rule for `dα` from the eigen-decomposition of the
    /// symmetric tridiagonal (Jacobi) matrix with zero diagonal and
    /// off-diagonal `α_0..α_{nodes-2}`.
    pub fn gauss_rule(&self, nodes: usize) -> Result<QuadratureRule, RecurrenceError> {
        gauss_from_recurrence(self, nodes)
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(&TableJson {
            beta: self.weight.beta,
            n: self.n_max(),
            p0: self.p0,
            alphas: self.alphas.clone(),
            residual: self.meta.residual,
            nodes_used: self.meta.nodes_used,
            radius: self.meta.radius,
        })
    }

    pub fn from_json(text: &str) -> Result<Self, Box<dyn std::error::Error + Send + Sync>> {
        let t: TableJson = serde_json::from_str(text)?;
        if t.alphas.len() != t.n + 1 {
            return Err(format!("alphas has {} entries, expected N+1 = {}", t.alphas.len(), t.n + 1).into());
        }
        Ok(Self {
            weight: WeightSpec::new(t.beta)?,
            alphas: t.alphas,
            p0: t.p0,
            meta: QuadratureMeta {
                nodes_used: t.nodes_used,
                radius: t.radius,
                radius_slack: TRUNCATION_SLACK,
                residual: t.residual,
                tol: t.residual,
                doublings: 0,
                max_diagonal: 0.0,
            },
        })
    }
}

/// Gauss rule with `nodes` points (`1 <= nodes <= N`). Weights come from
/// the Christoffel function `1 / Σ_{j<nodes} p_j(x)^2`, which keeps the tiny
/// outer weights accurate in a relative sense.
pub fn gauss_from_recurrence(table: &RecurrenceTable, nodes: usize) -> Result<QuadratureRule, RecurrenceError> {
    if nodes == 0 {
        return Err(RecurrenceError::EmptyRule);
    }
    if nodes > table.n_max().max(1) {
        return Err(RecurrenceError::DegreeOutOfRange { n: nodes, max: table.n_max() });
    }
    let mut jacobi = DMatrix::<f64>::zeros(nodes, nodes);
    for i in 0..nodes.saturating_sub(1) {
        jacobi[(i, i + 1)] = table.alphas[i];
        jacobi[(i + 1, i)] = table.alphas[i];
    }
    let eig = SymmetricEigen::new(jacobi);
    let mut x: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    x.sort_by(f64::total_cmp);
    // Enforce exact symmetry of the node set.
    let sym: Vec<f64> = (0..nodes).map(|k| 0.5 * (x[k] - x[nodes - 1 - k])).collect();
    let weights = sym
        .iter()
        .map(|&xk| {
            let p = table.eval_all(nodes - 1, xk);
            1.0 / p.iter().map(|v| v * v).sum::<f64>()
        })
        .collect();
    Ok(QuadratureRule { nodes: sym, weights, measure: MeasureTag::FreudGauss { beta: table.weight.beta } })
}
