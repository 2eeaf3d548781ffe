use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{expansion_coefficients, weighted_norm, ExpansionError, LpExponent, NormOptions};
use crate::ortho::RecurrenceTable;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub n: usize,
    /// `|S_n(f) w u_b|_p / |f w u_B|_p`.
    pub r_n: f64,
    /// `|(S_n(f) - f) w u_b|_p`.
    pub e_n: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceExperiment {
    pub p: LpExponent,
    pub b: f64,
    #[serde(rename = "B")]
    pub big_b: f64,
    pub reference_norm: f64,
    pub rows: Vec<ExperimentRow>,
    /// Least-squares slope of `log e_n` against `log n` over rows with `e_n > 0`.
    pub error_slope: Option<f64>,
    pub max_ratio: f64,
    pub coefficient_nodes: usize,
}

impl ConvergenceExperiment {
    /// CSV with header `n,r_n,e_n`.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "r_n", "e_n"])?;
        for r in &self.rows {
            w.write_record([r.n.to_string(), crate::io::fmt_f64(r.r_n), crate::io::fmt_f64(r.e_n)])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn loglog_slope(rows: &[ExperimentRow]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.e_n > 0.0 && r.n > 0)
        .map(|r| ((r.n as f64).ln(), r.e_n.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Measures `r_n` and `e_n` along `n_list`. No inequality is asserted; the
/// sequences are reported for trend inspection.
#[allow(clippy::too_many_arguments)]
pub fn convergence_experiment<F: Fn(f64) -> f64>(
    table: &RecurrenceTable,
    f: F,
    p: LpExponent,
    b: f64,
    big_b: f64,
    n_list: &[usize],
    opts: NormOptions,
) -> Result<ConvergenceExperiment, ExpansionError> {
    let n_top = n_list.iter().copied().max().unwrap_or(0);
    if n_top > table.n_max() {
        return Err(ExpansionError::DegreeOutOfRange { n: n_top, max: table.n_max() });
    }
    let coeffs = expansion_coefficients(table, &f, n_top)?;
    let weight = table.weight;
    let n_ref = n_top.max(1);
    let reference_norm = weighted_norm(&f, &weight, big_b, p, n_ref, opts)?.value;
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let head = &coeffs.coeffs[..n];
        let s = |x: f64| table.eval_series(head, x);
        let num = weighted_norm(s, &weight, b, p, n_ref, opts)?.value;
        let err = weighted_norm(|x| table.eval_series(head, x) - f(x), &weight, b, p, n_ref, opts)?.value;
        rows.push(ExperimentRow { n, r_n: num / reference_norm, e_n: err });
    }
    let max_ratio = rows.iter().map(|r| r.r_n).fold(0.0, f64::max);
    Ok(ConvergenceExperiment {
        p,
        b,
        big_b,
        reference_norm,
        error_slope: loglog_slope(&rows),
        rows,
        max_ratio,
        coefficient_nodes: coeffs.nodes_used,
    })
}
