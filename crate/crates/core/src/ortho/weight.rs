use serde::{Deserialize, Serialize};

/// An external field `Q` defining the weight `w = exp(-Q)` on the line.
pub trait Potential {
    fn q(&self, x: f64) -> f64;
    fn dq(&self, x: f64) -> f64;

    fn weight(&self, x: f64) -> f64 {
        (-self.q(x)).exp()
    }

    /// Rough growth exponent of `Q`, used only to seed root brackets.
    fn growth_hint(&self) -> f64 {
        2.0
    }
}

/// The Freud-type weight `w(x) = exp(-|x|^beta)`, `beta > 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("weight exponent beta = {0} must be finite and > 1")]
pub struct InvalidBeta(pub f64);

impl WeightSpec {
    pub fn new(beta: f64) -> Result<Self, InvalidBeta> {
        if beta.is_finite() && beta > 1.0 {
            Ok(Self { beta })
        } else {
            Err(InvalidBeta(beta))
        }
    }

    /// `w(x)^2 = exp(-2|x|^beta)`, the density of `dα`.
    pub fn density(&self, x: f64) -> f64 {
        (-2.0 * x.abs().powf(self.beta)).exp()
    }
}

impl Potential for WeightSpec {
    fn q(&self, x: f64) -> f64 {
        x.abs().powf(self.beta)
    }

    fn dq(&self, x: f64) -> f64 {
        if x == 0.0 {
            return 0.0;
        }
        self.beta * x.abs().powf(self.beta - 1.0) * x.signum()
    }

    fn growth_hint(&self) -> f64 {
        self.beta
    }
}

/// A potential given by closures, for admissibility experiments on
/// arbitrary `Q`.
pub struct FnPotential<F, G> {
    pub q: F,
    pub dq: G,
}

impl<F: Fn(f64) -> f64, G: Fn(f64) -> f64> Potential for FnPotential<F, G> {
    fn q(&self, x: f64) -> f64 {
        (self.q)(x)
    }

    fn dq(&self, x: f64) -> f64 {
        (self.dq)(x)
    }
}
