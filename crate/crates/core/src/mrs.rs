//! Mhaskar–Rakhmanov–Saff numbers and the infinite–finite range checks.
//!
//! `a_u` is the positive root of
//!
//! ```text
//! u = (2/π) ∫_0^1 a t Q'(a t) / sqrt(1 - t^2) dt
//! ```
//!
//! With `t = sin θ` the integrand becomes `a sinθ Q'(a sinθ)` on
//! `[0, π/2]`, which is smooth away from `θ = 0`; a geometrically graded
//! composite rule absorbs the algebraic behaviour of `Q'` at the origin.

use std::f64::consts::FRAC_PI_2;
use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::ortho::{Potential, RecurrenceTable, WeightSpec};
use crate::quadrature::{composite_legendre, golden_max, graded_breaks};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MrsError {
    #[error("u must be positive and finite, got {0}")]
    InvalidU(f64),
    #[error("could not bracket the root for u = {u} after {doublings} doublings")]
    BracketFailure { u: f64, doublings: usize },
    #[error("degree {n} exceeds table capacity {max}")]
    DegreeOutOfRange { n: usize, max: usize },
    #[error("no MRS entry for u = {0}")]
    MissingEntry(f64),
}

const MAX_DOUBLINGS: usize = 60;

struct ThetaRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl ThetaRule {
    fn new() -> Self {
        let breaks = graded_breaks(FRAC_PI_2, 8, 40);
        let (nodes, weights) = composite_legendre(&breaks, 24);
        ThetaRule { nodes, weights }
    }
}

/// Right-hand side `G(a)` of the defining equation.
pub fn mrs_integral<P: Potential + ?Sized>(weight: &P, a: f64) -> f64 {
    mrs_integral_with(&ThetaRule::new(), weight, a)
}

fn mrs_integral_with<P: Potential + ?Sized>(rule: &ThetaRule, weight: &P, a: f64) -> f64 {
    let s: f64 = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&th, &w)| {
            let x = a * th.sin();
            w * x * weight.dq(x)
        })
        .sum();
    s * 2.0 / std::f64::consts::PI
}

/// Solves `G(a) = u` by bisection; `|G(a) - u| <= tol·u` on return unless
/// the bracket has collapsed to floating-point resolution first.
pub fn mrs_number<P: Potential + ?Sized>(weight: &P, u: f64, tol: f64) -> Result<f64, MrsError> {
    if !(u.is_finite() && u > 0.0) {
        return Err(MrsError::InvalidU(u));
    }
    let rule = ThetaRule::new();
    let g = |a: f64| mrs_integral_with(&rule, weight, a);
    let guess = u.powf(1.0 / weight.growth_hint());
    let mut lo = guess / 10.0;
    let mut hi = guess * 10.0;
    let mut doublings = 0;
    while g(lo) > u {
        lo /= 2.0;
        doublings += 1;
        if doublings > MAX_DOUBLINGS {
            return Err(MrsError::BracketFailure { u, doublings });
        }
    }
    while g(hi) < u {
        hi *= 2.0;
        doublings += 1;
        if doublings > MAX_DOUBLINGS {
            return Err(MrsError::BracketFailure { u, doublings });
        }
    }
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..400 {
        mid = 0.5 * (lo + hi);
        let gm = g(mid);
        if (gm - u).abs() <= tol * u {
            return Ok(mid);
        }
        if gm < u {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 2.0 * f64::EPSILON * hi {
            break;
        }
    }
    Ok(mid)
}

/// `(u, a_u)` pairs for a weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MrsTable {
    pub weight: WeightSpec,
    pub tol: f64,
    pub entries: Vec<(f64, f64)>,
}

impl MrsTable {
    /// Solves for every `u` in `us` (sorted ascending, deduplicated).
    pub fn build(weight: WeightSpec, us: &[f64], tol: f64) -> Result<Self, MrsError> {
        let mut us: Vec<f64> = us.to_vec();
        us.sort_by(f64::total_cmp);
        us.dedup();
        let entries = us
            .into_iter()
            .map(|u| mrs_number(&weight, u, tol).map(|a| (u, a)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { weight, tol, entries })
    }

    /// Table at the integers `1..=n_max`.
    pub fn for_degrees(weight: WeightSpec, n_max: usize, tol: f64) -> Result<Self, MrsError> {
        let us: Vec<f64> = (1..=n_max.max(1)).map(|n| n as f64).collect();
        Self::build(weight, &us, tol)
    }

    pub fn get(&self, u: f64) -> Option<f64> {
        self.entries.iter().find(|(v, _)| *v == u).map(|(_, a)| *a)
    }

    /// `a_u`, from the table when present, otherwise solved on demand.
    pub fn a(&self, u: f64) -> Result<f64, MrsError> {
        match self.get(u) {
            Some(a) => Ok(a),
            None => mrs_number(&self.weight, u, self.tol),
        }
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.entries.windows(2).all(|w| w[0].1 < w[1].1) && self.entries.iter().all(|e| e.1 > 0.0)
    }

    /// CSV with header `u,a_u`, 17 significant digits.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["u", "a_u"])?;
        for (u, a) in &self.entries {
            w.write_record([crate::io::fmt_f64(*u), crate::io::fmt_f64(*a)])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Result of [`infinite_finite_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfiniteFiniteReport {
    pub n: usize,
    pub s: f64,
    pub a_n: f64,
    pub trials: usize,
    pub seed: u64,
    /// Fraction of trials whose argmax of `|Pw|` lies in `[-a_n, a_n]`
    /// (up to a grid tolerance of `1e-3·a_n`).
    pub inside_fraction: f64,
    /// Largest `sup_{|x| >= s a_n} |Pw| / sup_{[-a_n, a_n]} |Pw|`.
    pub max_outer_ratio: f64,
    pub argmax: Vec<f64>,
    pub outer_ratios: Vec<f64>,
}

/// Grid tolerance for locating an argmax inside `[-a_n, a_n]`.
pub const ARGMAX_TOLERANCE: f64 = 1e-3;

/// Draws `trials` random polynomials `P = Σ_{j<=n} c_j p_j` with standard
/// normal coefficients and measures where `|P w|` peaks.
pub fn infinite_finite_check(
    table: &RecurrenceTable,
    mrs: &MrsTable,
    n: usize,
    s: f64,
    trials: usize,
    seed: u64,
) -> Result<InfiniteFiniteReport, MrsError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut polys = Vec::with_capacity(trials);
    for _ in 0..trials {
        let c: Vec<f64> = (0..=n).map(|_| StandardNormal.sample(&mut rng)).collect();
        polys.push(c);
    }
    infinite_finite_for(table, mrs, n, s, &polys, seed)
}

/// Same measurement for caller-supplied coefficient vectors (each of length
/// at most `n + 1`).
pub fn infinite_finite_for(
    table: &RecurrenceTable,
    mrs: &MrsTable,
    n: usize,
    s: f64,
    polys: &[Vec<f64>],
    seed: u64,
) -> Result<InfiniteFiniteReport, MrsError> {
    if n > table.n_max() {
        return Err(MrsError::DegreeOutOfRange { n, max: table.n_max() });
    }
    let a_n = mrs.a(n.max(1) as f64)?;
    let weight = table.weight;
    let grid_points = 6001;
    let lo = -3.0 * a_n;
    let hi = 3.0 * a_n;
    let h = (hi - lo) / (grid_points - 1) as f64;
    let xs: Vec<f64> = (0..grid_points).map(|i| lo + h * i as f64).collect();
    let basis: Vec<Vec<f64>> = xs.iter().map(|&x| table.eval_all(n, x)).collect();

    let mut argmax = Vec::with_capacity(polys.len());
    let mut ratios = Vec::with_capacity(polys.len());
    let mut inside = 0usize;
    for c in polys {
        let value = |x: f64| -> f64 {
            let p = table.eval_all(n, x);
            (c.iter().zip(&p).map(|(a, b)| a * b).sum::<f64>() * weight.weight(x)).abs()
        };
        let vals: Vec<f64> = basis
            .iter()
            .zip(&xs)
            .map(|(p, &x)| (c.iter().zip(p).map(|(a, b)| a * b).sum::<f64>() * weight.weight(x)).abs())
            .collect();
        let mut best = (xs[0], vals[0]);
        let mut inner = 0.0f64;
        let mut outer = 0.0f64;
        for i in 0..grid_points {
            let x = xs[i];
            let v = vals[i];
            if x.abs() <= a_n {
                inner = inner.max(v);
            }
            if x.abs() >= s * a_n {
                outer = outer.max(v);
            }
            if i > 0 && i + 1 < grid_points && v >= vals[i - 1] && v >= vals[i + 1] {
                let (xr, vr) = golden_max(value, xs[i - 1], xs[i + 1], 80);
                if xr.abs() <= a_n {
                    inner = inner.max(vr);
                }
                if xr.abs() >= s * a_n {
                    outer = outer.max(vr);
                }
                if vr > best.1 {
                    best = (xr, vr);
                }
            } else if v > best.1 {
                best = (x, v);
            }
        }
        if best.0.abs() <= a_n * (1.0 + ARGMAX_TOLERANCE) {
            inside += 1;
        }
        argmax.push(best.0);
        ratios.push(if inner > 0.0 { outer / inner } else { f64::INFINITY });
    }
    let trials = polys.len();
    Ok(InfiniteFiniteReport {
        n,
        s,
        a_n,
        trials,
        seed,
        inside_fraction: if trials == 0 { 1.0 } else { inside as f64 / trials as f64 },
        max_outer_ratio: ratios.iter().copied().fold(0.0, f64::max),
        argmax,
        outer_ratios: ratios,
    })
}

/// One row of [`ratio_diagnostic`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub n: usize,
    pub alpha_n: f64,
    pub a_n: f64,
    pub ratio: f64,
    pub deviation: f64,
}

/// `α_n / a_n` and its distance from `1/2` for each requested degree.
pub fn ratio_diagnostic(
    table: &RecurrenceTable,
    mrs: &MrsTable,
    n_list: &[usize],
) -> Result<Vec<RatioRow>, MrsError> {
    n_list
        .iter()
        .map(|&n| {
            if n > table.n_max() || n == 0 {
                return Err(MrsError::DegreeOutOfRange { n, max: table.n_max() });
            }
            let alpha_n = table.alphas[n];
            let a_n = mrs.a(n as f64)?;
            let ratio = alpha_n / a_n;
            Ok(RatioRow { n, alpha_n, a_n, ratio, deviation: (ratio - 0.5).abs() })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn hermite() -> WeightSpec {
        WeightSpec::new(2.0).unwrap()
    }

    #[test]
    fn quadratic_field_has_square_root_numbers() {
        // G(a) = a^2 for Q = x^2.
        assert_abs_diff_eq!(mrs_integral(&hermite(), 1.0), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(mrs_number(&hermite(), 1.0, 1e-14).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(mrs_number(&hermite(), 4.0, 1e-14).unwrap(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn power_law_scaling_is_constant() {
        let w = hermite();
        let base = mrs_number(&w, 1.0, 1e-14).unwrap();
        for u in [2.0, 5.0, 10.0, 100.0] {
            let a = mrs_number(&w, u, 1e-14).unwrap();
            assert_abs_diff_eq!(a / u.sqrt(), base, epsilon = 1e-6);
        }
    }

    #[test]
    fn solver_meets_its_tolerance() {
        for beta in [1.5, 2.0, 3.0] {
            let w = WeightSpec::new(beta).unwrap();
            for u in [0.5, 3.0, 40.0] {
                let a = mrs_number(&w, u, 1e-12).unwrap();
                assert!((mrs_integral(&w, a) - u).abs() <= 1e-12 * u);
            }
        }
    }

    #[test]
    fn rejects_nonpositive_u() {
        assert_eq!(mrs_number(&hermite(), 0.0, 1e-10), Err(MrsError::InvalidU(0.0)));
    }

    #[test]
    fn table_csv_has_header() {
        let t = MrsTable::build(hermite(), &[4.0, 1.0], 1e-14).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("u,a_u"));
        let row: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(row[0], 1.0);
        assert_abs_diff_eq!(row[1], 1.0, epsilon = 1e-12);
    }
}
