//! Finite Whitney jet fields: multi-indices, jet Taylor polynomials and the
//! compatibility residual
//!
//! `R_α(x, a) = |f_α(x) - Σ_{|β| <= m-|α|} f_{α+β}(a) (x-a)^β / β!| / |x-a|^{m-|α|}`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::geometry::distance;

/// Largest order `|α|` for which factorials are evaluated exactly.
pub const MAX_EXACT_ORDER: u32 = 20;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum JetError {
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("need at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("order {0} exceeds the exact factorial range")]
    OrderTooLarge(u32),
    #[error("invalid multi-index {0:?}")]
    BadMultiIndex(String),
    #[error("invalid field: {0}")]
    InvalidField(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        Self(entries)
    }

    pub fn zero(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `|α|`.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `α! = Π α_i!`, exact for `|α| <= 20`.
    pub fn factorial(&self) -> Result<u64, JetError> {
        if self.order() > MAX_EXACT_ORDER {
            return Err(JetError::OrderTooLarge(self.order()));
        }
        Ok(self.0.iter().map(|&a| (1..=a as u64).product::<u64>()).product())
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `v^α = Π v_i^{α_i}`.
    pub fn monomial(&self, v: &[f64]) -> f64 {
        self.0.iter().zip(v).map(|(&a, &x)| x.powi(a as i32)).product()
    }

    /// All `α ∈ N^n` with `|α| <= m`, ordered by degree then lexicographically
    /// descending.
    pub fn all_up_to(n: usize, m: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        for deg in 0..=m {
            let mut cur = vec![0; n];
            fill(&mut cur, 0, deg, &mut out);
        }
        out
    }
}

fn fill(cur: &mut Vec<u32>, i: usize, left: u32, out: &mut Vec<MultiIndex>) {
    let n = cur.len();
    if n == 0 {
        if left == 0 {
            out.push(MultiIndex(Vec::new()));
        }
        return;
    }
    if i + 1 == n {
        cur[i] = left;
        out.push(MultiIndex(cur.clone()));
        return;
    }
    for a in (0..=left).rev() {
        cur[i] = a;
        fill(cur, i + 1, left - a, out);
    }
    cur[i] = 0;
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for MultiIndex {
    type Err = JetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split(',')
            .map(|p| p.trim().parse::<u32>().map_err(|_| JetError::BadMultiIndex(s.into())))
            .collect::<Result<Vec<_>, _>>()
            .map(MultiIndex)
    }
}

/// Points `E ⊂ R^n` carrying jets `{f_α : |α| <= m}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FieldFile", into = "FieldFile")]
pub struct WhitneyField {
    n: usize,
    m: u32,
    points: Vec<Vec<f64>>,
    jets: Vec<HashMap<MultiIndex, f64>>,
}

#[derive(Serialize, Deserialize)]
struct FieldFile {
    n: usize,
    m: u32,
    points: Vec<Vec<f64>>,
    jets: Vec<BTreeMap<String, f64>>,
}

impl From<WhitneyField> for FieldFile {
    fn from(w: WhitneyField) -> Self {
        let jets = w.jets.iter().map(|t| t.iter().map(|(k, v)| (k.to_string(), *v)).collect()).collect();
        Self { n: w.n, m: w.m, points: w.points, jets }
    }
}

impl TryFrom<FieldFile> for WhitneyField {
    type Error = JetError;

    fn try_from(f: FieldFile) -> Result<Self, Self::Error> {
        let jets = f
            .jets
            .into_iter()
            .map(|t| t.into_iter().map(|(k, v)| Ok((k.parse()?, v))).collect::<Result<HashMap<_, _>, JetError>>())
            .collect::<Result<Vec<_>, _>>()?;
        WhitneyField::new(f.n, f.m, f.points, jets)
    }
}

impl WhitneyField {
    pub fn new(n: usize, m: u32, points: Vec<Vec<f64>>, jets: Vec<HashMap<MultiIndex, f64>>) -> Result<Self, JetError> {
        if n == 0 {
            return Err(JetError::InvalidField("dimension must be >= 1".into()));
        }
        if m > MAX_EXACT_ORDER {
            return Err(JetError::OrderTooLarge(m));
        }
        if jets.len() != points.len() {
            return Err(JetError::InvalidField(format!("{} points but {} jet tables", points.len(), jets.len())));
        }
        for (i, p) in points.iter().enumerate() {
            if p.len() != n || p.iter().any(|v| !v.is_finite()) {
                return Err(JetError::InvalidField(format!("point {i} is not a finite {n}-vector")));
            }
            if points[..i].contains(p) {
                return Err(JetError::InvalidField(format!("point {i} repeats an earlier point")));
            }
        }
        let required = MultiIndex::all_up_to(n, m);
        for (i, table) in jets.iter().enumerate() {
            if let Some(a) = required.iter().find(|a| !table.contains_key(a)) {
                return Err(JetError::InvalidField(format!("point {i} lacks f_{{{a}}}")));
            }
            if let Some(a) = table.keys().find(|a| a.dim() != n || a.order() > m) {
                return Err(JetError::InvalidField(format!("point {i} has extra index {{{a}}}")));
            }
            if let Some((a, v)) = table.iter().find(|(_, v)| !v.is_finite()) {
                return Err(JetError::InvalidField(format!("point {i}: f_{{{a}}} = {v}")));
            }
        }
        Ok(Self { n, m, points, jets })
    }

    /// Jets `f_α(p) = jet(α, p)` at each point.
    pub fn from_fn<F: Fn(&MultiIndex, &[f64]) -> f64>(
        n: usize,
        m: u32,
        points: Vec<Vec<f64>>,
        jet: F,
    ) -> Result<Self, JetError> {
        let indices = MultiIndex::all_up_to(n, m);
        let jets = points.iter().map(|p| indices.iter().map(|a| (a.clone(), jet(a, p))).collect()).collect();
        Self::new(n, m, points, jets)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> u32 {
        self.m
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn jet(&self, point: usize, alpha: &MultiIndex) -> Option<f64> {
        self.jets.get(point)?.get(alpha).copied()
    }

    /// Pointwise sum of the jets of two fields on the same points.
    pub fn add_jets(&self, other: &WhitneyField) -> Result<WhitneyField, JetError> {
        if self.n != other.n || self.m != other.m || self.points != other.points {
            return Err(JetError::InvalidField("fields live on different points".into()));
        }
        let jets = self
            .jets
            .iter()
            .zip(&other.jets)
            .map(|(a, b)| a.iter().map(|(k, v)| (k.clone(), v + b[k])).collect())
            .collect();
        Ok(WhitneyField { jets, ..self.clone() })
    }
}

/// `Σ_{|β| <= m-|α|} f_{α+β}(a) (x-a)^β / β!` with `a` the point `base`.
pub fn taylor_poly_eval(field: &WhitneyField, base: usize, alpha: &MultiIndex, x: &[f64]) -> Result<f64, JetError> {
    let a = field
        .points
        .get(base)
        .ok_or_else(|| JetError::IndexOutOfRange(format!("base {base} of {} points", field.len())))?;
    if alpha.dim() != field.n || x.len() != field.n {
        return Err(JetError::IndexOutOfRange(format!("dimension {} expected", field.n)));
    }
    if alpha.order() > field.m {
        return Err(JetError::IndexOutOfRange(format!("|α| = {} > m = {}", alpha.order(), field.m)));
    }
    let h: Vec<f64> = x.iter().zip(a).map(|(xi, ai)| xi - ai).collect();
    let table = &field.jets[base];
    let mut sum = 0.0;
    for beta in MultiIndex::all_up_to(field.n, field.m - alpha.order()) {
        let f = table[&alpha.add(&beta)];
        sum += f * beta.monomial(&h) / beta.factorial()? as f64;
    }
    Ok(sum)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualEntry {
    /// Comma-joined `α`.
    pub alpha: String,
    pub x: usize,
    pub a: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualTable {
    pub entries: Vec<ResidualEntry>,
    pub max: f64,
}

impl ResidualTable {
    pub fn get(&self, alpha: &MultiIndex, x: usize, a: usize) -> Option<f64> {
        let key = alpha.to_string();
        self.entries.iter().find(|e| e.alpha == key && e.x == x && e.a == a).map(|e| e.value)
    }
}

/// `R_α(x, a)` for every ordered pair of distinct points and `|α| <= m`.
pub fn compatibility_residual(field: &WhitneyField) -> Result<ResidualTable, JetError> {
    if field.len() < 2 {
        return Err(JetError::TooFewPoints(field.len()));
    }
    let alphas = MultiIndex::all_up_to(field.n, field.m);
    let mut entries = Vec::new();
    let mut max = 0.0f64;
    for (xi, x) in field.points.iter().enumerate() {
        for ai in 0..field.len() {
            if ai == xi {
                continue;
            }
            let dist = distance(x, &field.points[ai]);
            for alpha in &alphas {
                let t = taylor_poly_eval(field, ai, alpha, x)?;
                let r = (field.jets[xi][alpha] - t).abs() / dist.powi((field.m - alpha.order()) as i32);
                max = max.max(r);
                entries.push(ResidualEntry { alpha: alpha.to_string(), x: xi, a: ai, value: r });
            }
        }
    }
    Ok(ResidualTable { entries, max })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    #[test]
    fn index_enumeration_counts() {
        // C(n+m, m) indices of order <= m
        assert_eq!(MultiIndex::all_up_to(1, 3).len(), 4);
        assert_eq!(MultiIndex::all_up_to(2, 2).len(), 6);
        assert_eq!(MultiIndex::all_up_to(3, 4).len(), 35);
        assert_eq!(MultiIndex::all_up_to(2, 1), vec![mi(&[0, 0]), mi(&[1, 0]), mi(&[0, 1])]);
    }

    #[test]
    fn factorials_are_exact() {
        assert_eq!(mi(&[3, 2]).factorial().unwrap(), 12);
        assert_eq!(mi(&[20]).factorial().unwrap(), 2_432_902_008_176_640_000);
        assert_eq!(mi(&[11, 10]).factorial(), Err(JetError::OrderTooLarge(21)));
    }

    #[test]
    fn key_round_trip() {
        let a = mi(&[1, 0, 4]);
        assert_eq!(a.to_string(), "1,0,4");
        assert_eq!("1, 0,4".parse::<MultiIndex>().unwrap(), a);
        assert!("1,-1".parse::<MultiIndex>().is_err());
    }

    #[test]
    fn quadratic_reproduced() {
        let f = WhitneyField::from_fn(1, 2, vec![vec![1.0], vec![2.0]], |a, p| match a.entries()[0] {
            0 => p[0] * p[0],
            1 => 2.0 * p[0],
            _ => 2.0,
        })
        .unwrap();
        assert_abs_diff_eq!(taylor_poly_eval(&f, 0, &mi(&[0]), &[1.1]).unwrap(), 1.21, epsilon = 1e-15);
    }

    #[test]
    fn bilinear_reproduced() {
        let f = WhitneyField::from_fn(2, 2, vec![vec![0.0, 0.0], vec![1.0, 1.0]], |a, p| match a.entries() {
            [0, 0] => p[0] * p[1],
            [1, 0] => p[1],
            [0, 1] => p[0],
            [1, 1] => 1.0,
            _ => 0.0,
        })
        .unwrap();
        assert_eq!(taylor_poly_eval(&f, 0, &mi(&[0, 0]), &[1.0, 1.0]).unwrap(), 1.0);
    }

    #[test]
    fn sine_linearization_and_residual() {
        let sin_jets = |a: &MultiIndex, p: &[f64]| if a.order() == 0 { p[0].sin() } else { p[0].cos() };
        let f = WhitneyField::from_fn(1, 1, vec![vec![0.0], vec![0.1]], sin_jets).unwrap();
        assert_eq!(taylor_poly_eval(&f, 0, &mi(&[0]), &[0.1]).unwrap(), 0.1);
        let r = compatibility_residual(&f).unwrap();
        let v = r.get(&mi(&[0]), 1, 0).unwrap();
        assert_abs_diff_eq!(v, (0.1f64.sin() - 0.1).abs() / 0.1, epsilon = 1e-16);
        assert_eq!(r.entries.len(), 4);
    }

    #[test]
    fn top_order_jet_is_constant() {
        let f = WhitneyField::from_fn(2, 2, vec![vec![0.5, -1.0], vec![0.0, 0.0]], |a, _| a.order() as f64 + 0.25).unwrap();
        for x in [[3.0, 4.0], [-10.0, 0.1]] {
            assert_eq!(taylor_poly_eval(&f, 0, &mi(&[1, 1]), &x).unwrap(), 2.25);
        }
    }

    #[test]
    fn incomplete_field_rejected() {
        let mut t = HashMap::new();
        t.insert(mi(&[0]), 1.0);
        let e = WhitneyField::new(1, 1, vec![vec![0.0]], vec![t]).unwrap_err();
        assert!(matches!(e, JetError::InvalidField(_)));
        let dup = WhitneyField::from_fn(1, 0, vec![vec![1.0], vec![1.0]], |_, _| 0.0);
        assert!(dup.is_err());
    }

    #[test]
    fn errors_on_bad_queries() {
        let f = WhitneyField::from_fn(1, 1, vec![vec![0.0]], |_, _| 1.0).unwrap();
        assert!(matches!(taylor_poly_eval(&f, 3, &mi(&[0]), &[0.0]), Err(JetError::IndexOutOfRange(_))));
        assert!(matches!(taylor_poly_eval(&f, 0, &mi(&[2]), &[0.0]), Err(JetError::IndexOutOfRange(_))));
        assert_eq!(compatibility_residual(&f), Err(JetError::TooFewPoints(1)));
    }

    #[test]
    fn json_layout() {
        let f = WhitneyField::from_fn(2, 1, vec![vec![0.0, 1.0]], |a, _| a.order() as f64).unwrap();
        let v: serde_json::Value = serde_json::to_value(&f).unwrap();
        assert_eq!(v["n"], 2);
        assert_eq!(v["jets"][0]["1,0"], 1.0);
        let back: WhitneyField = serde_json::from_value(v).unwrap();
        assert_eq!(back, f);
    }
}
