use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ExpansionError;
use crate::mrs::mrs_number;
use crate::ortho::{Potential, WeightSpec};
use crate::quadrature::{integrate_adaptive, refined_grid_max};

/// Integrability exponent `p ∈ (1, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum LpExponent {
    Finite(f64),
    Infinity,
}

impl LpExponent {
    pub fn new(p: f64) -> Result<Self, ExpansionError> {
        if p == f64::INFINITY {
            Ok(Self::Infinity)
        } else if p.is_finite() && p > 1.0 {
            Ok(Self::Finite(p))
        } else {
            Err(ExpansionError::InvalidExponent(p))
        }
    }

    /// `1/p`, zero for `p = ∞`.
    pub fn reciprocal(self) -> f64 {
        match self {
            Self::Finite(p) => 1.0 / p,
            Self::Infinity => 0.0,
        }
    }
}

impl fmt::Display for LpExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(p) => write!(f, "{p}"),
            Self::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for LpExponent {
    type Err = ExpansionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "infinity" | "Infinity" | "∞" => Ok(Self::Infinity),
            other => {
                let p: f64 = other.parse().map_err(|_| ExpansionError::InvalidExponent(f64::NAN))?;
                Self::new(p)
            }
        }
    }
}

impl From<LpExponent> for String {
    fn from(p: LpExponent) -> String {
        p.to_string()
    }
}

impl TryFrom<String> for LpExponent {
    type Error = ExpansionError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

/// `u_γ(y) = (1 + |y|)^γ`.
pub fn u_gamma(gamma: f64, y: f64) -> f64 {
    (1.0 + y.abs()).powf(gamma)
}

/// Resolution knobs for [`weighted_norm`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormOptions {
    /// Grid points for the `p = ∞` scan.
    pub grid: usize,
    /// Initial panels for the adaptive `p < ∞` quadrature.
    pub panels: usize,
    pub rel_tol: f64,
}

impl Default for NormOptions {
    fn default() -> Self {
        Self { grid: 4001, panels: 64, rel_tol: 1e-12 }
    }
}

impl NormOptions {
    /// Twice the resolution in every knob.
    pub fn doubled(self) -> Self {
        Self { grid: 2 * self.grid - 1, panels: 2 * self.panels, rel_tol: self.rel_tol / 2.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedNorm {
    pub value: f64,
    /// Half-width of the domain actually scanned or integrated.
    pub radius: f64,
    /// Largest integrand value seen on the tail probe.
    pub tail: f64,
}

const TAIL_PROBES: usize = 16;
const MAX_EXTENSIONS: usize = 60;

fn tail_max<G: Fn(f64) -> f64>(g: &G, r: f64) -> f64 {
    let mut m = 0.0f64;
    for k in 1..=TAIL_PROBES {
        let x = r * (1.0 + k as f64 / TAIL_PROBES as f64);
        for s in [-x, x] {
            let v = g(s);
            if !v.is_finite() {
                return f64::INFINITY;
            }
            m = m.max(v);
        }
    }
    m
}

/// `|f w u_γ|_p` for `w = exp(-|x|^β)`.
///
/// For `p = ∞` the sup is taken on `|x| <= 2·a_{n_ref}` and the tail
/// `[r, 2r]` is probed to confirm that it does not exceed it. For `p < ∞`
/// the domain starts at the same radius and is widened until the
/// integrand is negligible at its edge.
pub fn weighted_norm<F: Fn(f64) -> f64>(
    f: F,
    weight: &WeightSpec,
    gamma: f64,
    p: LpExponent,
    n_ref: usize,
    opts: NormOptions,
) -> Result<WeightedNorm, ExpansionError> {
    let a = mrs_number(weight, n_ref.max(1) as f64, 1e-13)?;
    let radius = 2.0 * a;
    let g = |x: f64| (f(x) * weight.weight(x) * u_gamma(gamma, x)).abs();
    match p {
        LpExponent::Infinity => {
            let (_, sup) = refined_grid_max(g, -radius, radius, opts.grid);
            if !sup.is_finite() {
                return Err(ExpansionError::NonFinite { radius });
            }
            let tail = tail_max(&g, radius);
            if !(tail <= sup) {
                return Err(ExpansionError::NonFinite { radius });
            }
            Ok(WeightedNorm { value: sup, radius, tail })
        }
        LpExponent::Finite(p) => {
            let gp = |x: f64| g(x).powf(p);
            let mut r = radius;
            let (_, peak) = refined_grid_max(gp, -r, r, 1001);
            if !peak.is_finite() {
                return Err(ExpansionError::NonFinite { radius: r });
            }
            let mut tail = tail_max(&gp, r);
            let mut extensions = 0;
            while tail > 1e-20 * peak.max(f64::MIN_POSITIVE) {
                r *= 1.25;
                tail = tail_max(&gp, r);
                extensions += 1;
                if extensions > MAX_EXTENSIONS || !tail.is_finite() {
                    return Err(ExpansionError::NonFinite { radius: r });
                }
            }
            let res = integrate_adaptive(gp, -r, r, opts.panels, 0.0, opts.rel_tol, 200_000);
            if !res.value.is_finite() {
                return Err(ExpansionError::NonFinite { radius: r });
            }
            Ok(WeightedNorm { value: res.value.powf(1.0 / p), radius: r, tail })
        }
    }
}

/// `Δ_u f (x) = f(x + u) - f(x)`.
pub fn delta_u<F: Fn(f64) -> f64>(f: F, u: f64, x: f64) -> f64 {
    f(x + u) - f(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn w2() -> WeightSpec {
        WeightSpec::new(2.0).unwrap()
    }

    #[test]
    fn sup_of_weight_is_one() {
        let n = weighted_norm(|_| 1.0, &w2(), 0.0, LpExponent::Infinity, 4, NormOptions::default()).unwrap();
        assert_abs_diff_eq!(n.value, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn l2_norm_of_weight() {
        let n = weighted_norm(|_| 1.0, &w2(), 0.0, LpExponent::Finite(2.0), 1, NormOptions::default()).unwrap();
        assert_abs_diff_eq!(n.value, (std::f64::consts::PI / 2.0).powf(0.25), epsilon = 1e-12);
    }

    #[test]
    fn u_gamma_at_origin() {
        for g in [-3.0, 0.0, 0.5, 7.0] {
            assert_eq!(u_gamma(g, 0.0), 1.0);
        }
    }

    #[test]
    fn growing_function_is_rejected() {
        let r = weighted_norm(|x: f64| (2.0 * x * x).exp(), &w2(), 0.0, LpExponent::Infinity, 4, NormOptions::default());
        assert!(matches!(r, Err(ExpansionError::NonFinite { .. })));
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta_u(|_| 3.0, 0.7, 1.0), 0.0);
        assert_eq!(delta_u(|x| x, 0.25, -4.0), 0.25);
        assert_eq!(delta_u(|x| x * x, 1.0, 2.0), 5.0);
    }

    #[test]
    fn exponent_parsing() {
        assert_eq!("inf".parse::<LpExponent>().unwrap(), LpExponent::Infinity);
        assert_eq!("4".parse::<LpExponent>().unwrap(), LpExponent::Finite(4.0));
        assert!("1".parse::<LpExponent>().is_err());
        assert!(LpExponent::new(0.5).is_err());
    }
}
