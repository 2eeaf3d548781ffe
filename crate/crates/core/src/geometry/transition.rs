use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{AngleProfile, GeometryError, SlowTwistSpec};

/// Planar twist equal to the rotation by `theta` on `|x| <= c1` and to the
/// identity on `|x| >= c2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionTwist {
    pub spec: SlowTwistSpec,
    /// `|θ| / ln(c2/c1)`, the rate of the unsmoothed log profile.
    pub nominal_rate: f64,
    /// Exact `sup t|f'(t)|` of the smoothed profile.
    pub rate_bound: f64,
    /// Smallest admissible `c2/c1`, `exp(2|θ|/ε)`.
    pub required_ratio: f64,
}

/// Log-width of the smoothing bands for a transition of log-length `l`:
/// 1% in `t`, shrunk for very short transitions.
pub fn transition_band(l: f64) -> f64 {
    1.01f64.ln().min(l / 12.0)
}

pub fn build_transition_twist(theta: f64, c1: f64, c2: f64, epsilon: f64) -> Result<TransitionTwist, GeometryError> {
    if !(theta > -PI && theta <= PI) {
        return Err(GeometryError::InvalidParameter(format!("theta = {theta} outside (-π, π]")));
    }
    if !(c1 > 0.0 && c2 > c1 && c2.is_finite()) {
        return Err(GeometryError::InvalidParameter(format!("need 0 < c1 < c2, got c1 = {c1}, c2 = {c2}")));
    }
    if !(epsilon > 0.0) {
        return Err(GeometryError::InvalidParameter(format!("epsilon = {epsilon} must be positive")));
    }
    let l = (c2 / c1).ln();
    let nominal_rate = theta.abs() / l;
    let required_ratio = (2.0 * theta.abs() / epsilon).exp();
    if nominal_rate > epsilon / 2.0 {
        return Err(GeometryError::RatioTooSmall { ratio: c2 / c1, required: required_ratio });
    }
    let band = transition_band(l);
    let profile = AngleProfile::LogTransition { theta, c1, c2, band };
    Ok(TransitionTwist {
        spec: SlowTwistSpec::planar(profile),
        nominal_rate,
        rate_bound: theta.abs() / (l - band),
        required_ratio,
    })
}
