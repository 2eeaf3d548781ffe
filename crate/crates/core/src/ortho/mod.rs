//! Weighted orthonormal polynomials for `dα = exp(-2|x|^β) dx`.

mod admissibility;
mod recurrence;
mod weight;

pub use admissibility::{
    admissibility_report, lipschitz_ratio, AdmissibilityReport, EvenReport, GrowthReport, LipschitzProbe,
    LipschitzReport, ProbeGrid,
};
pub use recurrence::{
    freud_rule, gauss_from_recurrence, orthonormality_residual, recurrence_coefficients, QuadratureMeta,
    RecurrenceError, RecurrenceTable, MAX_DOUBLINGS, TRUNCATION_SLACK,
};
pub use weight::{FnPotential, InvalidBeta, Potential, WeightSpec};
