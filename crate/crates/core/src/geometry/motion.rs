use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{GeometryError, Point};

/// Entrywise bound on `M^T M - I` for a matrix to count as orthogonal.
pub const ORTHOGONALITY_TOL: f64 = 1e-12;

/// `A(x) = M x + x_0` with `M` orthogonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MotionRepr", into = "MotionRepr")]
pub struct EuclideanMotion {
    matrix: DMatrix<f64>,
    translation: Point,
    proper: bool,
}

#[derive(Serialize, Deserialize)]
struct MotionRepr {
    matrix: Vec<Vec<f64>>,
    translation: Vec<f64>,
    proper: bool,
}

impl From<EuclideanMotion> for MotionRepr {
    fn from(m: EuclideanMotion) -> Self {
        let matrix = m.matrix.row_iter().map(|r| r.iter().copied().collect()).collect();
        Self { matrix, translation: m.translation.into(), proper: m.proper }
    }
}

impl TryFrom<MotionRepr> for EuclideanMotion {
    type Error = GeometryError;

    fn try_from(r: MotionRepr) -> Result<Self, Self::Error> {
        let d = r.matrix.len();
        if let Some(row) = r.matrix.iter().find(|row| row.len() != d) {
            return Err(GeometryError::DimensionMismatch { expected: d, found: row.len() });
        }
        let flat: Vec<f64> = r.matrix.into_iter().flatten().collect();
        let m = Self::new(DMatrix::from_row_slice(d, d, &flat), Point::new(r.translation)?)?;
        if m.proper != r.proper {
            return Err(GeometryError::InvalidParameter(format!(
                "proper flag {} contradicts determinant sign",
                r.proper
            )));
        }
        Ok(m)
    }
}

fn orthogonality_defect(m: &DMatrix<f64>) -> f64 {
    let g = m.transpose() * m - DMatrix::identity(m.nrows(), m.ncols());
    g.amax()
}

impl EuclideanMotion {
    /// Validates orthogonality; `proper` is read off the determinant.
    pub fn new(matrix: DMatrix<f64>, translation: Point) -> Result<Self, GeometryError> {
        let d = matrix.nrows();
        if d == 0 || matrix.ncols() != d {
            return Err(GeometryError::DimensionMismatch { expected: d.max(1), found: matrix.ncols() });
        }
        if translation.dim() != d {
            return Err(GeometryError::DimensionMismatch { expected: d, found: translation.dim() });
        }
        if let Some(&bad) = matrix.iter().find(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite(bad));
        }
        let defect = orthogonality_defect(&matrix);
        if defect > ORTHOGONALITY_TOL {
            return Err(GeometryError::NotOrthogonal(defect));
        }
        let proper = matrix.determinant() > 0.0;
        Ok(Self { matrix, translation, proper })
    }

    pub fn linear(matrix: DMatrix<f64>) -> Result<Self, GeometryError> {
        let d = matrix.nrows();
        Self::new(matrix, Point::origin(d))
    }

    pub fn identity(d: usize) -> Self {
        Self { matrix: DMatrix::identity(d.max(1), d.max(1)), translation: Point::origin(d), proper: true }
    }

    pub fn translation_only(t: Point) -> Self {
        let d = t.dim();
        Self { matrix: DMatrix::identity(d, d), translation: t, proper: true }
    }

    /// Counter-clockwise rotation of the plane by `theta`.
    pub fn rotation2(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self {
            matrix: DMatrix::from_row_slice(2, 2, &[c, -s, s, c]),
            translation: Point::origin(2),
            proper: true,
        }
    }

    pub fn with_translation(mut self, t: Point) -> Result<Self, GeometryError> {
        if t.dim() != self.dim() {
            return Err(GeometryError::DimensionMismatch { expected: self.dim(), found: t.dim() });
        }
        self.translation = t;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn translation(&self) -> &Point {
        &self.translation
    }

    pub fn is_proper(&self) -> bool {
        self.proper
    }

    pub fn is_linear(&self) -> bool {
        self.translation.coords().iter().all(|&v| v == 0.0)
    }

    /// `|M^T M - I|_max`.
    pub fn orthogonality_defect(&self) -> f64 {
        orthogonality_defect(&self.matrix)
    }

    pub fn determinant(&self) -> f64 {
        self.matrix.determinant()
    }

    pub fn apply(&self, x: &Point) -> Result<Point, GeometryError> {
        if x.dim() != self.dim() {
            return Err(GeometryError::DimensionMismatch { expected: self.dim(), found: x.dim() });
        }
        let y = &self.matrix * DVector::from_column_slice(x.coords());
        Ok(Point::from_raw(y.iter().zip(self.translation.coords()).map(|(a, b)| a + b).collect()))
    }

    pub(crate) fn apply_linear(&self, v: &[f64]) -> Vec<f64> {
        (&self.matrix * DVector::from_column_slice(v)).iter().copied().collect()
    }

    pub(crate) fn apply_transpose(&self, v: &[f64]) -> Vec<f64> {
        (self.matrix.transpose() * DVector::from_column_slice(v)).iter().copied().collect()
    }

    /// `self ∘ other`, i.e. `x ↦ self(other(x))`.
    pub fn compose(&self, other: &EuclideanMotion) -> Result<Self, GeometryError> {
        if other.dim() != self.dim() {
            return Err(GeometryError::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        let matrix = &self.matrix * &other.matrix;
        let t = self.apply(&other.translation)?;
        Ok(Self { matrix, translation: t, proper: self.proper == other.proper })
    }

    pub fn inverse(&self) -> Self {
        let mt = self.matrix.transpose();
        let t = -(&mt * DVector::from_column_slice(self.translation.coords()));
        Self { matrix: mt, translation: Point::from_raw(t.iter().copied().collect()), proper: self.proper }
    }
}

/// Rotation matrix of the unit quaternion `(a, b, a1, dq)`. Inputs within
/// `1e-6` of unit norm are normalized first.
pub fn rotation_from_quaternion(a: f64, b: f64, a1: f64, dq: f64) -> Result<EuclideanMotion, GeometryError> {
    let n = (a * a + b * b + a1 * a1 + dq * dq).sqrt();
    if !n.is_finite() || (n - 1.0).abs() > 1e-6 {
        return Err(GeometryError::NonUnitQuaternion(n));
    }
    let (a, b, c, d) = (a / n, b / n, a1 / n, dq / n);
    #[rustfmt::skip]
    let m = DMatrix::from_row_slice(3, 3, &[
        a * a + b * b - c * c - d * d, 2.0 * (b * c - a * d),         2.0 * (b * d + a * c),
        2.0 * (b * c + a * d),         a * a - b * b + c * c - d * d, 2.0 * (c * d - a * b),
        2.0 * (b * d - a * c),         2.0 * (c * d + a * b),         a * a - b * b - c * c + d * d,
    ]);
    EuclideanMotion::linear(m)
}
