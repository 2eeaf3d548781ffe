//! Numerical toolkit for near-isometric maps of `R^d` and weighted
//! orthonormal expansions.
//!
//! * [`geometry`]: slow twists, slides, Euclidean motions, sampled distortion
//!   certificates, Procrustes alignment and degeneracy diagnostics.
//! * [`jets`]: multi-indices, jet Taylor polynomials and the Whitney
//!   compatibility residual of a finite jet field.
//! * [`ortho`]: Freud weights `exp(-|x|^β)`, recurrence coefficients and
//!   Gauss rules for `dα = w² dx`.
//! * [`mrs`]: Mhaskar–Rakhmanov–Saff numbers and infinite–finite checks.
//! * [`expansion`]: expansion coefficients, partial sums, weighted norms and
//!   the two-weight condition evaluator.
//! * [`laguerre`]: Laguerre polynomials/functions and tensor expansions on
//!   the positive orthant.
//! * [`io`]: CSV/JSON encodings shared by the command-line front end.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod expansion;
pub mod geometry;
pub mod io;
pub mod jets;
pub mod laguerre;
pub mod mrs;
pub mod ortho;
pub mod quadrature;
