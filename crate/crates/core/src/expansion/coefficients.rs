use serde::Serialize;

use super::ExpansionError;
use crate::ortho::RecurrenceTable;

/// Relative stability required between successive Gauss estimates.
pub const COEFFICIENT_STABILITY: f64 = 1e-10;

/// `c_l = ∫ f p_l dα` for `l < N`.
#[derive(Debug, Clone, Serialize)]
pub struct ExpansionCoefficients<'t> {
    #[serde(skip)]
    pub table: &'t RecurrenceTable,
    pub coeffs: Vec<f64>,
    /// Gauss nodes of the accepted estimate.
    pub nodes_used: usize,
    /// Max change against the previous (coarser) estimate.
    pub last_change: f64,
}

fn gauss_coefficients<F: Fn(f64) -> f64>(
    table: &RecurrenceTable,
    f: &F,
    n: usize,
    nodes: usize,
) -> Result<Vec<f64>, ExpansionError> {
    let rule = table.gauss_rule(nodes)?;
    let mut c = vec![0.0; n];
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        let fx = f(x);
        if !fx.is_finite() {
            return Err(ExpansionError::IntegrationDivergence { nodes, change: f64::INFINITY });
        }
        if n == 0 {
            continue;
        }
        let p = table.eval_all(n - 1, x);
        for (cl, pl) in c.iter_mut().zip(&p) {
            *cl += w * fx * pl;
        }
    }
    Ok(c)
}

/// Node counts tried, coarse to fine: doubling from `max(2n, 8)` and ending
/// at the table capacity.
fn node_schedule(n: usize, capacity: usize) -> Vec<usize> {
    let capacity = capacity.max(1);
    let mut k = (2 * n).max(8).min(capacity);
    let mut ks = vec![k];
    while k < capacity {
        k = (2 * k).min(capacity);
        ks.push(k);
    }
    if ks.len() == 1 && capacity > 1 {
        ks.insert(0, (capacity / 2).max(1));
    }
    ks
}

/// Expansion coefficients `c_0..c_{n-1}` of `f` by Gauss rules from the
/// recurrence, doubling the node count until successive estimates agree to
/// [`COEFFICIENT_STABILITY`] relative to the largest coefficient.
pub fn expansion_coefficients<'t, F: Fn(f64) -> f64>(
    table: &'t RecurrenceTable,
    f: F,
    n: usize,
) -> Result<ExpansionCoefficients<'t>, ExpansionError> {
    if n > table.n_max() {
        return Err(ExpansionError::DegreeOutOfRange { n, max: table.n_max() });
    }
    let schedule = node_schedule(n, table.n_max());
    let mut prev = gauss_coefficients(table, &f, n, schedule[0])?;
    let mut change = f64::INFINITY;
    for &k in &schedule[1..] {
        let next = gauss_coefficients(table, &f, n, k)?;
        let scale = next.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        change = prev.iter().zip(&next).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        if change <= COEFFICIENT_STABILITY * scale || change == 0.0 {
            return Ok(ExpansionCoefficients { table, coeffs: next, nodes_used: k, last_change: change });
        }
        prev = next;
    }
    Err(ExpansionError::IntegrationDivergence { nodes: *schedule.last().unwrap(), change })
}

impl<'t> ExpansionCoefficients<'t> {
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `S_n(f)(x) = Σ_{j<n} c_j p_j(x)`.
    pub fn partial_sum(&self, n: usize, x: f64) -> Result<f64, ExpansionError> {
        partial_sum_eval(self, n, x)
    }

    /// Running Bessel sums `Σ_{l<k} c_l^2` for `k = 1..=N`.
    pub fn bessel_sums(&self) -> Vec<f64> {
        self.coeffs
            .iter()
            .scan(0.0, |acc, c| {
                *acc += c * c;
                Some(*acc)
            })
            .collect()
    }
}

pub fn partial_sum_eval(coeffs: &ExpansionCoefficients<'_>, n: usize, x: f64) -> Result<f64, ExpansionError> {
    if n > coeffs.len() {
        return Err(ExpansionError::DegreeOutOfRange { n, max: coeffs.len() });
    }
    Ok(coeffs.table.eval_series(&coeffs.coeffs[..n], x))
}
