use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{check_dims, diameter, EuclideanMotion, GeometryError, Point};

/// Relative size below which the smallest singular value counts as zero.
const RANK_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Alignment {
    pub motion: EuclideanMotion,
    /// `sqrt(Σ |A(y_i) - z_i|^2)`.
    pub residual: f64,
    /// `max_i |A(y_i) - z_i|`.
    pub max_dev: f64,
    pub diam: f64,
    /// `max_dev / diam(Y)`, zero for a single point.
    pub relative_dev: f64,
}

fn centroid(points: &[Point], d: usize) -> DVector<f64> {
    let mut c = DVector::zeros(d);
    for p in points {
        c += DVector::from_column_slice(p.coords());
    }
    c / points.len() as f64
}

/// Index of the smallest singular value; among ties the last one.
fn smallest_index(s: &DVector<f64>) -> usize {
    let scale = s.amax().max(f64::MIN_POSITIVE);
    let min = s.min();
    (0..s.len()).rev().find(|&i| s[i] - min <= RANK_TOL * scale).unwrap_or(s.len() - 1)
}

/// Least-squares Euclidean motion taking `y` onto `z`.
///
/// The orthogonal factor comes from the SVD of the centred cross-covariance.
/// With `prefer_proper`, a reflection is replaced by a rotation whenever
/// that loses nothing (the smallest singular value vanishes, which is
/// always the case for `k <= d`); otherwise the improper optimum is kept.
pub fn procrustes_align(y: &[Point], z: &[Point], prefer_proper: bool) -> Result<Alignment, GeometryError> {
    if y.is_empty() {
        return Err(GeometryError::EmptyInput);
    }
    if y.len() != z.len() {
        return Err(GeometryError::LengthMismatch(y.len(), z.len()));
    }
    let d = y[0].dim();
    check_dims(y, d)?;
    check_dims(z, d)?;
    let (cy, cz) = (centroid(y, d), centroid(z, d));
    let mut h = DMatrix::zeros(d, d);
    for (p, q) in y.iter().zip(z) {
        let a = DVector::from_column_slice(p.coords()) - &cy;
        let b = DVector::from_column_slice(q.coords()) - &cz;
        h += a * b.transpose();
    }
    let svd = h.svd(true, true);
    let (u, v_t) = (svd.u.expect("requested U"), svd.v_t.expect("requested V^T"));
    let v = v_t.transpose();
    let mut r = &v * u.transpose();
    if prefer_proper && r.determinant() < 0.0 {
        let s = &svd.singular_values;
        let i = smallest_index(s);
        let lossless = y.len() <= d || s[i] <= RANK_TOL * s.amax().max(f64::MIN_POSITIVE);
        if lossless {
            let mut flip = DMatrix::identity(d, d);
            flip[(i, i)] = -1.0;
            r = &v * flip * u.transpose();
        }
    }
    let t = &cz - &r * &cy;
    let motion = EuclideanMotion::new(r, Point::new(t.iter().copied().collect())?)?;
    let (mut ss, mut max_dev) = (0.0f64, 0.0f64);
    for (p, q) in y.iter().zip(z) {
        let e = motion.apply(p)?.distance(q);
        ss += e * e;
        max_dev = max_dev.max(e);
    }
    let diam = diameter(y);
    let relative_dev = if diam > 0.0 { max_dev / diam } else { 0.0 };
    Ok(Alignment { motion, residual: ss.sqrt(), max_dev, diam, relative_dev })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioCheck {
    pub pass: bool,
    pub worst_ratio_lo: f64,
    pub worst_ratio_hi: f64,
}

/// Tests `1 - c' < |z_i - z_j| / |y_i - y_j| <= 1 + c'` for all `i < j`.
pub fn pairwise_ratio_check(y: &[Point], z: &[Point], c_prime: f64) -> Result<RatioCheck, GeometryError> {
    if y.len() != z.len() {
        return Err(GeometryError::LengthMismatch(y.len(), z.len()));
    }
    if y.len() < 2 {
        return Err(GeometryError::TooFewPoints { needed: 2, got: y.len() });
    }
    let d = y[0].dim();
    check_dims(y, d)?;
    check_dims(z, d)?;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for i in 0..y.len() {
        for j in i + 1..y.len() {
            let den = y[i].distance(&y[j]);
            if den == 0.0 {
                return Err(GeometryError::CoincidentSourcePoints(i, j));
            }
            let r = z[i].distance(&z[j]) / den;
            lo = lo.min(r);
            hi = hi.max(r);
        }
    }
    let pass = lo > 1.0 - c_prime && hi <= 1.0 + c_prime;
    Ok(RatioCheck { pass, worst_ratio_lo: lo, worst_ratio_hi: hi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pts(c: &[[f64; 2]]) -> Vec<Point> {
        c.iter().map(|p| Point::new(p.to_vec()).unwrap()).collect()
    }

    #[test]
    fn identical_sets_align_trivially() {
        let y = pts(&[[0.0, 0.0], [1.0, 0.5], [-2.0, 3.0]]);
        let a = procrustes_align(&y, &y, true).unwrap();
        assert!(a.residual < 1e-14);
        assert!((a.motion.matrix() - DMatrix::<f64>::identity(2, 2)).amax() < 1e-14);
    }

    #[test]
    fn recovers_rotation_and_shift() {
        let y = pts(&[[0.0, 0.0], [1.0, 0.0], [0.3, 2.0], [-1.5, 0.7], [2.0, -1.0]]);
        let m = EuclideanMotion::rotation2(30f64.to_radians()).with_translation(Point::new(vec![1.0, 2.0]).unwrap()).unwrap();
        let z: Vec<Point> = y.iter().map(|p| m.apply(p).unwrap()).collect();
        let a = procrustes_align(&y, &z, true).unwrap();
        assert!(a.residual < 1e-10);
        assert!((a.motion.matrix() - m.matrix()).amax() < 1e-12);
    }

    #[test]
    fn mirror_pair_is_matched_by_rotation() {
        let y = pts(&[[0.0, 0.0], [1.0, 2.0]]);
        let z = pts(&[[0.0, 0.0], [1.0, -2.0]]);
        let a = procrustes_align(&y, &z, true).unwrap();
        assert!(a.motion.is_proper());
        assert!(a.residual < 1e-12);
    }

    #[test]
    fn improper_optimum_kept_when_flip_costs() {
        let y = pts(&[[0.0, 0.0], [2.0, 0.0], [0.0, 1.0]]);
        let z = pts(&[[0.0, 0.0], [2.0, 0.0], [0.0, -1.0]]);
        let a = procrustes_align(&y, &z, true).unwrap();
        assert!(!a.motion.is_proper());
        assert!(a.residual < 1e-12);
    }

    #[test]
    fn scaling_fails_ratio_check() {
        let y = pts(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
        let z: Vec<Point> = y.iter().map(|p| Point::new(p.coords().iter().map(|v| 1.2 * v).collect()).unwrap()).collect();
        let r = pairwise_ratio_check(&y, &z, 0.1).unwrap();
        assert!(!r.pass);
        assert_abs_diff_eq!(r.worst_ratio_hi, 1.2, epsilon = 1e-15);
        assert!(pairwise_ratio_check(&y, &y, 1e-9).unwrap().pass);
    }

    #[test]
    fn coincident_sources_rejected() {
        let y = pts(&[[0.0, 0.0], [0.0, 0.0]]);
        assert_eq!(pairwise_ratio_check(&y, &y, 0.1), Err(GeometryError::CoincidentSourcePoints(0, 1)));
        assert_eq!(procrustes_align(&[], &[], true).unwrap_err(), GeometryError::EmptyInput);
    }
}
