//! Numerical screening of the admissibility conditions for `w = exp(-Q)`.

use serde::{Deserialize, Serialize};

use super::weight::Potential;
use crate::quadrature::integrate_adaptive;

/// Sample points `±x` for `x` log-spaced on `[x_min, x_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub points: usize,
}

impl ProbeGrid {
    pub fn positive(&self) -> Vec<f64> {
        let n = self.points.max(2);
        let (l0, l1) = (self.x_min.ln(), self.x_max.ln());
        (0..n).map(|i| (l0 + (l1 - l0) * i as f64 / (n - 1) as f64).exp()).collect()
    }
}

impl Default for ProbeGrid {
    fn default() -> Self {
        Self { x_min: 0.01, x_max: 10.0, points: 200 }
    }
}

/// Condition (a): `Q` even with `Q(0) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvenReport {
    pub pass: bool,
    pub q_at_zero: f64,
    pub max_asymmetry: f64,
    pub witness: f64,
}

/// Condition (b): `Q'` nondecreasing and `η < xQ'/Q <= C`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub pass: bool,
    pub monotone: bool,
    pub ratio_min: f64,
    pub ratio_min_at: f64,
    pub ratio_max: f64,
    pub ratio_max_at: f64,
    pub eta: f64,
    pub c_upper: f64,
}

/// Condition (c): local Lipschitz-1/2 control of `Q'`, measured as
/// `∫_{x-δ|x|}^{x+δ|x|} |Q'(s)-Q'(x)| / |s-x|^{3/2} ds / |Q'(x)|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzReport {
    pub pass: bool,
    pub epsilon: f64,
    pub delta: f64,
    pub worst_ratio: f64,
    pub witness: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub even: EvenReport,
    pub growth: GrowthReport,
    pub lipschitz: LipschitzReport,
}

impl AdmissibilityReport {
    pub fn admissible(&self) -> bool {
        self.even.pass && self.growth.pass && self.lipschitz.pass
    }
}

/// Parameters of the `(ε, δ)` probe for condition (c).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LipschitzProbe {
    pub epsilon: f64,
    pub delta: f64,
}

pub fn admissibility_report<P: Potential + ?Sized>(
    weight: &P,
    eta: f64,
    c_upper: f64,
    grid: ProbeGrid,
    probe: LipschitzProbe,
) -> AdmissibilityReport {
    let xs = grid.positive();

    let q0 = weight.q(0.0);
    let (mut asym, mut asym_at) = (0.0f64, 0.0);
    for &x in &xs {
        let d = (weight.q(x) - weight.q(-x)).abs() / (1.0 + weight.q(x).abs());
        if d > asym {
            asym = d;
            asym_at = x;
        }
    }
    let even = EvenReport { pass: q0 == 0.0 && asym <= 1e-12, q_at_zero: q0, max_asymmetry: asym, witness: asym_at };

    let mut line: Vec<f64> = xs.iter().rev().map(|x| -x).chain(std::iter::once(0.0)).chain(xs.iter().copied()).collect();
    line.dedup();
    let monotone = line.windows(2).all(|w| weight.dq(w[0]) <= weight.dq(w[1]) * (1.0 + 1e-12) + 1e-15);
    let mut rmin = (f64::INFINITY, 0.0);
    let mut rmax = (f64::NEG_INFINITY, 0.0);
    for &x in line.iter().filter(|x| **x != 0.0) {
        let r = x * weight.dq(x) / weight.q(x);
        if r < rmin.0 {
            rmin = (r, x);
        }
        if r > rmax.0 {
            rmax = (r, x);
        }
    }
    let growth = GrowthReport {
        pass: monotone && rmin.0 > eta && rmax.0 <= c_upper * (1.0 + 1e-12),
        monotone,
        ratio_min: rmin.0,
        ratio_min_at: rmin.1,
        ratio_max: rmax.0,
        ratio_max_at: rmax.1,
        eta,
        c_upper,
    };

    let mut worst = (0.0f64, xs[0]);
    for &x in xs.iter().chain(xs.iter().map(|x| -x).collect::<Vec<_>>().iter()) {
        let r = lipschitz_ratio(weight, x, probe.delta);
        if !r.is_finite() || r > worst.0 {
            worst = (r, x);
            if !r.is_finite() {
                break;
            }
        }
    }
    let lipschitz = LipschitzReport {
        pass: worst.0.is_finite() && worst.0 <= probe.epsilon,
        epsilon: probe.epsilon,
        delta: probe.delta,
        worst_ratio: worst.0,
        witness: worst.1,
    };

    AdmissibilityReport { even, growth, lipschitz }
}

/// The condition-(c) integral at `x`, divided by `|Q'(x)|`.
///
/// With `s = x ± u^2` the integrand `|Q'(s)-Q'(x)| |s-x|^{-3/2} ds`
/// becomes `2 |Q'(x±u^2)-Q'(x)| / u^2 du`, which is bounded at `u = 0`.
pub fn lipschitz_ratio<P: Potential + ?Sized>(weight: &P, x: f64, delta: f64) -> f64 {
    let dq = weight.dq(x);
    if dq == 0.0 {
        return f64::INFINITY;
    }
    let top = (delta * x.abs()).sqrt();
    let mut total = 0.0;
    for sign in [-1.0, 1.0] {
        let r = integrate_adaptive(
            |u: f64| 2.0 * (weight.dq(x + sign * u * u) - dq).abs() / (u * u),
            0.0,
            top,
            4,
            1e-14,
            1e-10,
            4000,
        );
        total += r.value;
    }
    total / dq.abs()
}
