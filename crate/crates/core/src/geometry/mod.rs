//! Near-isometric maps of `R^d`: Euclidean motions, slow twists and slides,
//! sampled distortion certificates, Procrustes alignment and degeneracy
//! diagnostics for finite point sets.

mod certify;
mod degeneracy;
mod map;
mod motion;
mod procrustes;
mod profile;
mod transition;

pub use certify::{distortion_certificate, pair_ratio_bounds, sample_points, DistortionCertificate, SampleBox, Sampler};
pub use degeneracy::{cayley_menger_volume, degeneracy_report, DegeneracyReport, EXHAUSTIVE_LIMIT};
pub use map::{Block, DistortionMap, SlideSpec, SlowTwistSpec};
pub use motion::{rotation_from_quaternion, EuclideanMotion, ORTHOGONALITY_TOL};
pub use procrustes::{pairwise_ratio_check, procrustes_align, Alignment, RatioCheck};
pub use profile::{decay_check, AngleProfile, DecayCheck, DecayTarget, SlideProfile, DECAY_GRID};
pub use transition::{build_transition_twist, transition_band, TransitionTwist};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("point must have at least one coordinate")]
    EmptyPoint,
    #[error("non-finite coordinate {0}")]
    NonFinite(f64),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("quaternion norm {0} is not 1")]
    NonUnitQuaternion(f64),
    #[error("matrix is not orthogonal (|M^T M - I| = {0:e})")]
    NotOrthogonal(f64),
    #[error("invalid slow twist: {0}")]
    InvalidTwist(String),
    #[error("composition must contain at least one map")]
    EmptyComposition,
    #[error("sampled points coincide after {attempts} draws")]
    DegenerateSample { attempts: usize },
    #[error("c2/c1 = {ratio} is below the required exp(2|θ|/ε) = {required}")]
    RatioTooSmall { ratio: f64, required: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("empty input")]
    EmptyInput,
    #[error("point sets differ in size: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("source points {0} and {1} coincide")]
    CoincidentSourcePoints(usize, usize),
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
}

/// A point of `R^d`, `d >= 1`, with finite coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self, GeometryError> {
        if coords.is_empty() {
            return Err(GeometryError::EmptyPoint);
        }
        if let Some(&bad) = coords.iter().find(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite(bad));
        }
        Ok(Self(coords))
    }

    pub fn origin(d: usize) -> Self {
        Self(vec![0.0; d.max(1)])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    pub fn distance(&self, other: &Point) -> f64 {
        distance(&self.0, &other.0)
    }

    /// Unchecked constructor for internally produced coordinates.
    pub(crate) fn from_raw(coords: Vec<f64>) -> Self {
        debug_assert!(!coords.is_empty());
        Self(coords)
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = GeometryError;

    fn try_from(v: Vec<f64>) -> Result<Self, Self::Error> {
        Self::new(v)
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Vec<f64> {
        p.0
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub(crate) fn check_dims(points: &[Point], d: usize) -> Result<(), GeometryError> {
    match points.iter().find(|p| p.dim() != d) {
        Some(p) => Err(GeometryError::DimensionMismatch { expected: d, found: p.dim() }),
        None => Ok(()),
    }
}

/// Largest pairwise distance.
pub fn diameter(points: &[Point]) -> f64 {
    let mut best = 0.0f64;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            best = best.max(p.distance(q));
        }
    }
    best
}

/// Equally spaced points `start + s (end - start)`, `s = i/(count-1)`.
pub fn line_points(start: &Point, end: &Point, count: usize) -> Result<Vec<Point>, GeometryError> {
    if start.dim() != end.dim() {
        return Err(GeometryError::DimensionMismatch { expected: start.dim(), found: end.dim() });
    }
    let count = count.max(2);
    Ok((0..count)
        .map(|i| {
            let s = i as f64 / (count - 1) as f64;
            Point::from_raw(start.0.iter().zip(&end.0).map(|(a, b)| a + s * (b - a)).collect())
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_rejects_bad_coordinates() {
        assert_eq!(Point::new(vec![]), Err(GeometryError::EmptyPoint));
        assert!(matches!(Point::new(vec![1.0, f64::NAN]), Err(GeometryError::NonFinite(_))));
        let p: Result<Point, _> = serde_json::from_str("[1.0, 2.0]");
        assert_eq!(p.unwrap().coords(), &[1.0, 2.0]);
        assert!(serde_json::from_str::<Point>("[]").is_err());
    }

    #[test]
    fn line_endpoints_are_exact() {
        let a = Point::new(vec![-3.0, 3.0]).unwrap();
        let b = Point::new(vec![3.0, -3.0]).unwrap();
        let pts = line_points(&a, &b, 7).unwrap();
        assert_eq!(pts[0], a);
        assert_eq!(pts[6], b);
        assert_eq!(pts[3].coords(), &[0.0, 0.0]);
    }

    #[test]
    fn diameter_of_square() {
        let pts: Vec<Point> = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]
            .iter()
            .map(|c| Point::new(c.to_vec()).unwrap())
            .collect();
        assert!((diameter(&pts) - 2f64.sqrt()).abs() < 1e-15);
    }
}
