use serde::{Deserialize, Serialize};

use super::{GeometryError, SlideSpec};
use crate::quadrature::refined_grid_max;

/// Grid size used by [`decay_check`] before golden-section polishing.
pub const DECAY_GRID: usize = 4001;

/// Angle `f(t)`, `t >= 0`, of a slow-twist rotation block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum AngleProfile {
    /// `amplitude · exp(-rate t)`.
    Exponential { amplitude: f64, rate: f64 },
    /// `coeff · t^exponent`; `exponent = 1` is the fast twist.
    Power { coeff: f64, exponent: f64 },
    /// `theta` on `[0, c1]`, `0` on `[c2, ∞)`, linear in `ln t` between
    /// with cubic smoothing over bands of log-width `band` at both knots.
    LogTransition { theta: f64, c1: f64, c2: f64, band: f64 },
    /// Cubic Hermite interpolation of `(t, f, f')` samples, extended
    /// linearly outside the knots.
    Table { t: Vec<f64>, f: Vec<f64>, df: Vec<f64> },
}

fn smoothstep(u: f64) -> f64 {
    u * u * (3.0 - 2.0 * u)
}

/// `∫_0^u smoothstep`.
fn smoothstep_integral(u: f64) -> f64 {
    u * u * u * (1.0 - 0.5 * u)
}

impl AngleProfile {
    pub fn constant(theta: f64) -> Self {
        Self::Power { coeff: theta, exponent: 0.0 }
    }

    pub fn table(t: Vec<f64>, f: Vec<f64>, df: Vec<f64>) -> Result<Self, GeometryError> {
        if t.len() < 2 || f.len() != t.len() || df.len() != t.len() {
            return Err(GeometryError::InvalidParameter("table needs >= 2 knots with matching columns".into()));
        }
        if t[0] < 0.0 || t.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(GeometryError::InvalidParameter("table knots must be >= 0 and strictly increasing".into()));
        }
        if t.iter().chain(&f).chain(&df).any(|v| !v.is_finite()) {
            return Err(GeometryError::InvalidParameter("table entries must be finite".into()));
        }
        Ok(Self::Table { t, f, df })
    }

    pub fn family(&self) -> &'static str {
        match self {
            Self::Exponential { .. } => "exponential",
            Self::Power { .. } => "power",
            Self::LogTransition { .. } => "log_transition",
            Self::Table { .. } => "table",
        }
    }

    /// Slope `θ/(L - band)` in `ln t` of a log-transition, `L = ln(c2/c1)`.
    fn log_slope(theta: f64, c1: f64, c2: f64, band: f64) -> f64 {
        theta / ((c2 / c1).ln() - band)
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            Self::Exponential { amplitude, rate } => amplitude * (-rate * t).exp(),
            Self::Power { coeff, exponent } => {
                if *exponent == 0.0 {
                    *coeff
                } else if *coeff == 0.0 {
                    0.0
                } else {
                    coeff * t.powf(*exponent)
                }
            }
            Self::LogTransition { theta, c1, c2, band } => {
                if *theta == 0.0 || t <= *c1 {
                    return *theta;
                }
                if t >= *c2 {
                    return 0.0;
                }
                let k = Self::log_slope(*theta, *c1, *c2, *band);
                let (s, s1, s2) = (t.ln(), c1.ln(), c2.ln());
                if s < s1 + band {
                    theta - k * band * smoothstep_integral((s - s1) / band)
                } else if s > s2 - band {
                    k * band * smoothstep_integral((s2 - s) / band)
                } else {
                    theta - k * (0.5 * band + (s - s1 - band))
                }
            }
            Self::Table { t: ts, f, df } => {
                let n = ts.len();
                if t <= ts[0] {
                    return f[0] + df[0] * (t - ts[0]);
                }
                if t >= ts[n - 1] {
                    return f[n - 1] + df[n - 1] * (t - ts[n - 1]);
                }
                let i = ts.partition_point(|&x| x <= t) - 1;
                let h = ts[i + 1] - ts[i];
                let u = (t - ts[i]) / h;
                let (u2, u3) = (u * u, u * u * u);
                (2.0 * u3 - 3.0 * u2 + 1.0) * f[i]
                    + (u3 - 2.0 * u2 + u) * h * df[i]
                    + (-2.0 * u3 + 3.0 * u2) * f[i + 1]
                    + (u3 - u2) * h * df[i + 1]
            }
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match self {
            Self::Exponential { amplitude, rate } => -amplitude * rate * (-rate * t).exp(),
            Self::Power { coeff, exponent } => {
                if *exponent == 0.0 || *coeff == 0.0 {
                    0.0
                } else {
                    coeff * exponent * t.powf(exponent - 1.0)
                }
            }
            Self::LogTransition { .. } => {
                if t <= 0.0 {
                    0.0
                } else {
                    self.radial_rate(t) / t
                }
            }
            Self::Table { t: ts, f, df } => {
                let n = ts.len();
                if t <= ts[0] {
                    return df[0];
                }
                if t >= ts[n - 1] {
                    return df[n - 1];
                }
                let i = ts.partition_point(|&x| x <= t) - 1;
                let h = ts[i + 1] - ts[i];
                let u = (t - ts[i]) / h;
                let u2 = u * u;
                ((6.0 * u2 - 6.0 * u) * f[i]
                    + (3.0 * u2 - 4.0 * u + 1.0) * h * df[i]
                    + (-6.0 * u2 + 6.0 * u) * f[i + 1]
                    + (3.0 * u2 - 2.0 * u) * h * df[i + 1])
                    / h
            }
        }
    }

    /// `t · f'(t)`, evaluated without forming `f'` where that is singular.
    pub fn radial_rate(&self, t: f64) -> f64 {
        match self {
            Self::Power { coeff, exponent } => {
                if *exponent == 0.0 || *coeff == 0.0 {
                    0.0
                } else {
                    coeff * exponent * t.powf(*exponent)
                }
            }
            Self::LogTransition { theta, c1, c2, band } => {
                if *theta == 0.0 || t <= *c1 || t >= *c2 {
                    return 0.0;
                }
                let k = Self::log_slope(*theta, *c1, *c2, *band);
                let (s, s1, s2) = (t.ln(), c1.ln(), c2.ln());
                if s < s1 + band {
                    -k * smoothstep((s - s1) / band)
                } else if s > s2 - band {
                    -k * smoothstep((s2 - s) / band)
                } else {
                    -k
                }
            }
            _ => {
                if t == 0.0 {
                    0.0
                } else {
                    t * self.derivative(t)
                }
            }
        }
    }

    /// The profile `s · f`.
    pub fn scaled(&self, s: f64) -> Self {
        match self {
            Self::Exponential { amplitude, rate } => Self::Exponential { amplitude: s * amplitude, rate: *rate },
            Self::Power { coeff, exponent } => Self::Power { coeff: s * coeff, exponent: *exponent },
            Self::LogTransition { theta, c1, c2, band } => {
                Self::LogTransition { theta: s * theta, c1: *c1, c2: *c2, band: *band }
            }
            Self::Table { t, f, df } => Self::Table {
                t: t.clone(),
                f: f.iter().map(|v| s * v).collect(),
                df: df.iter().map(|v| s * v).collect(),
            },
        }
    }

    /// Largest relative gap between a central difference of `f` and `f'`
    /// on `points` equally spaced samples of `(0, t_max]`.
    pub fn derivative_defect(&self, t_max: f64, points: usize) -> f64 {
        let points = points.max(2);
        let ts: Vec<f64> = (1..=points).map(|i| t_max * i as f64 / points as f64).collect();
        let scale = ts.iter().fold(0.0f64, |m, &t| m.max(self.derivative(t).abs()));
        let mut worst = 0.0f64;
        for &t in &ts {
            let h = 1e-5 * t.clamp(1e-3, 1.0);
            let fd = (self.value(t + h) - self.value(t - h)) / (2.0 * h);
            let d = self.derivative(t);
            let gap = (fd - d).abs() / (d.abs() + 1e-3 * scale + f64::MIN_POSITIVE);
            worst = worst.max(if gap.is_nan() { f64::INFINITY } else { gap });
        }
        worst
    }
}

/// Displacement `g(t)` of one coordinate of a slide.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SlideProfile {
    Zero,
    Constant { value: f64 },
    /// `amplitude / (1 + (t/scale)^2)`.
    Lorentzian { amplitude: f64, scale: f64 },
    /// `amplitude · exp(-rate |t|)`.
    AbsExp { amplitude: f64, rate: f64 },
    /// `amplitude · sin(frequency t)`.
    Sine { amplitude: f64, frequency: f64 },
}

impl SlideProfile {
    pub fn value(&self, t: f64) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::Constant { value } => *value,
            Self::Lorentzian { amplitude, scale } => {
                let u = t / scale;
                amplitude / (1.0 + u * u)
            }
            Self::AbsExp { amplitude, rate } => amplitude * (-rate * t.abs()).exp(),
            Self::Sine { amplitude, frequency } => amplitude * (frequency * t).sin(),
        }
    }

    /// `g'(t)`; for `AbsExp` the kink at `0` reports `0`.
    pub fn derivative(&self, t: f64) -> f64 {
        match self {
            Self::Zero | Self::Constant { .. } => 0.0,
            Self::Lorentzian { amplitude, scale } => {
                let u = t / scale;
                -2.0 * amplitude * u / (scale * (1.0 + u * u).powi(2))
            }
            Self::AbsExp { amplitude, rate } => {
                if t == 0.0 {
                    0.0
                } else {
                    -amplitude * rate * t.signum() * (-rate * t.abs()).exp()
                }
            }
            Self::Sine { amplitude, frequency } => amplitude * frequency * (frequency * t).cos(),
        }
    }
}

/// What [`decay_check`] measures.
#[derive(Debug, Clone, Copy)]
pub enum DecayTarget<'a> {
    /// `t |f'(t)|` on `[0, domain_max]`.
    Twist(&'a AngleProfile),
    /// `max_i |g_i'(t)|` on `[-domain_max, domain_max]`.
    Slide(&'a SlideSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayCheck {
    pub sup_value: f64,
    pub argmax: f64,
    pub pass: bool,
}

pub fn decay_check(target: DecayTarget<'_>, domain_max: f64, threshold: f64) -> Result<DecayCheck, GeometryError> {
    if !(domain_max > 0.0 && domain_max.is_finite()) {
        return Err(GeometryError::InvalidParameter(format!("domain_max = {domain_max} must be positive")));
    }
    if !(threshold > 0.0) {
        return Err(GeometryError::InvalidParameter(format!("threshold = {threshold} must be positive")));
    }
    let (argmax, sup) = match target {
        DecayTarget::Twist(p) => {
            refined_grid_max(|t| finite_or_inf(p.radial_rate(t).abs()), 0.0, domain_max, DECAY_GRID)
        }
        DecayTarget::Slide(spec) => {
            let mut best = (0.0, 0.0f64);
            for g in spec.profiles() {
                let r = refined_grid_max(|t| finite_or_inf(g.derivative(t).abs()), -domain_max, domain_max, DECAY_GRID);
                if r.1 > best.1 || !r.1.is_finite() {
                    best = r;
                }
                if !best.1.is_finite() {
                    break;
                }
            }
            best
        }
    };
    let sup_value = if sup.is_finite() { sup } else { f64::INFINITY };
    Ok(DecayCheck { sup_value, argmax, pass: sup_value < threshold })
}

fn finite_or_inf(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        f64::INFINITY
    }
}
