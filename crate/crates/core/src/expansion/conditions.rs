//! Verdicts for the necessary/sufficient two-weight conditions of uniform
//! boundedness of `S_n[f] w u_b` against `f w u_B`.
//!
//! For `Q = |x|^β` the MRS numbers satisfy `a_n ≍ n^{1/β}` exactly, so a
//! product `a_n^E n^F C_{B,n}` is `O(1)` iff `E/β + F < 0`, or `E/β + F = 0`
//! with `C_{B,n} = 1`.

use serde::{Deserialize, Serialize};

use super::{ExpansionError, LpExponent};

/// Exponent sums within this distance of zero count as the boundary case.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// `C_{B,n}`: `1` for `B != 1`, `log n` for `B = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LogFactor {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "log n")]
    LogN,
}

impl LogFactor {
    pub fn for_b(big_b: f64) -> Self {
        if (big_b - 1.0).abs() <= BOUNDARY_TOL {
            Self::LogN
        } else {
            Self::One
        }
    }
}

/// Which family of conditions applies for the given `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `p = ∞`.
    Uniform,
    /// `1 < p < 4/3`, item (a).
    BelowFourThirds,
    /// `p = 4/3` or `p = 4`, item (b).
    Endpoint,
    /// `4/3 < p < 4`: only the range condition.
    Interior,
    /// `p > 4`, item (c).
    AboveFour,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub holds: bool,
    pub detail: String,
    /// `E/β + F` for product conditions.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub p: LpExponent,
    pub b: f64,
    #[serde(rename = "B")]
    pub big_b: f64,
    pub beta: f64,
    pub regime: Regime,
    pub log_factor: LogFactor,
    pub verdicts: Vec<Verdict>,
    /// Growth exponent `E/β + F` of the critical product, when one applies.
    pub critical_exponent: Option<f64>,
    pub holds: bool,
}

impl ConditionReport {
    pub fn verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }
}

/// Whether `a_n^e n^f C` is bounded; `exponent = e/β + f`.
pub fn product_bounded(exponent: f64, log_factor: LogFactor) -> bool {
    if exponent < -BOUNDARY_TOL {
        true
    } else if exponent.abs() <= BOUNDARY_TOL {
        log_factor == LogFactor::One
    } else {
        false
    }
}

fn product(name: &str, e: f64, f: f64, beta: f64, c: LogFactor) -> Verdict {
    let exponent = e / beta + f;
    Verdict {
        name: name.into(),
        holds: product_bounded(exponent, c),
        detail: format!("a_n^{e} n^{f} C_Bn with C_Bn = {c:?}; growth exponent {exponent}"),
        exponent: Some(exponent),
    }
}

fn simple(name: &str, holds: bool, detail: String) -> Verdict {
    Verdict { name: name.into(), holds, detail, exponent: None }
}

fn near(a: f64, b: f64) -> bool {
    (a - b).abs() <= BOUNDARY_TOL
}

pub fn condition_check(p: LpExponent, b: f64, big_b: f64, beta: f64) -> Result<ConditionReport, ExpansionError> {
    if let LpExponent::Finite(v) = p {
        if !(v > 1.0) {
            return Err(ExpansionError::InvalidExponent(v));
        }
    }
    if !(beta.is_finite() && beta > 1.0) {
        return Err(ExpansionError::InvalidBeta(beta));
    }
    let c = LogFactor::for_b(big_b);
    let mut verdicts = Vec::new();
    let mut critical = None;
    let regime = match p {
        LpExponent::Infinity => {
            verdicts.push(simple("hypothesis_b_lt_B", b < big_b, format!("b = {b} < B = {big_b}")));
            verdicts.push(simple("positive_B", big_b > 0.0, format!("B = {big_b} > 0")));
            let v = product("uniform_product", b - big_b.min(1.0), 1.0 / 6.0, beta, c);
            critical = v.exponent;
            verdicts.push(v);
            Regime::Uniform
        }
        LpExponent::Finite(p) => {
            let inv = 1.0 / p;
            verdicts.push(simple("hypothesis_b_le_B", b <= big_b, format!("b = {b} <= B = {big_b}")));
            verdicts.push(simple(
                "lp_range",
                b < 1.0 - inv && big_b > -inv,
                format!("b = {b} < 1 - 1/p = {}, B = {big_b} > -1/p = {}", 1.0 - inv, -inv),
            ));
            if near(p, 4.0 / 3.0) || near(p, 4.0) {
                verdicts.push(simple("case_b_strict", b < big_b, format!("b = {b} < B = {big_b}")));
                Regime::Endpoint
            } else if p < 4.0 / 3.0 {
                let v = product("case_a_product", b.max(-inv) - big_b, (4.0 * inv - 3.0) / 6.0, beta, c);
                critical = v.exponent;
                verdicts.push(v);
                Regime::BelowFourThirds
            } else if p > 4.0 {
                let v = product("case_c_product", b - big_b.min(1.0 - inv), (1.0 - 4.0 * inv) / 6.0, beta, c);
                critical = v.exponent;
                verdicts.push(v);
                Regime::AboveFour
            } else {
                Regime::Interior
            }
        }
    };
    let holds = verdicts.iter().all(|v| v.holds);
    Ok(ConditionReport { p, b, big_b, beta, regime, log_factor: c, verdicts, critical_exponent: critical, holds })
}
