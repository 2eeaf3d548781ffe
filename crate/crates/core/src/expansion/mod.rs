//! Orthonormal expansions `S_n(f) = Σ_{j<n} c_j p_j` and the weighted
//! `L_p` machinery used to study their convergence.

mod coefficients;
mod conditions;
mod experiment;
mod norm;

pub use coefficients::{expansion_coefficients, partial_sum_eval, ExpansionCoefficients, COEFFICIENT_STABILITY};
pub use conditions::{
    condition_check, product_bounded, ConditionReport, LogFactor, Regime, Verdict, BOUNDARY_TOL,
};
pub use experiment::{convergence_experiment, ConvergenceExperiment, ExperimentRow};
pub use norm::{delta_u, u_gamma, weighted_norm, LpExponent, NormOptions, WeightedNorm};

use crate::mrs::MrsError;
use crate::ortho::RecurrenceError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExpansionError {
    #[error("degree {n} outside available range 0..={max}")]
    DegreeOutOfRange { n: usize, max: usize },
    #[error("coefficients did not stabilize (last change {change:.3e} at {nodes} nodes)")]
    IntegrationDivergence { nodes: usize, change: f64 },
    #[error("weighted integrand does not decay beyond radius {radius}")]
    NonFinite { radius: f64 },
    #[error("exponent p = {0} must satisfy p > 1 or p = inf")]
    InvalidExponent(f64),
    #[error("beta = {0} must be > 1")]
    InvalidBeta(f64),
    #[error(transparent)]
    Recurrence(#[from] RecurrenceError),
    #[error(transparent)]
    Mrs(#[from] MrsError),
}
