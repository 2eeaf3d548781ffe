use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{check_dims, distance, DistortionMap, GeometryError, Point};

const MAX_DRAWS: usize = 4;

/// Axis-aligned sampling box `[lo_i, hi_i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl SampleBox {
    /// `[-half, half]^d`.
    pub fn cube(d: usize, half: f64) -> Self {
        Self { lo: vec![-half; d], hi: vec![half; d] }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    fn validate(&self) -> Result<(), GeometryError> {
        if self.lo.is_empty() || self.lo.len() != self.hi.len() {
            return Err(GeometryError::InvalidParameter("box bounds must be non-empty and of equal length".into()));
        }
        if self.lo.iter().zip(&self.hi).any(|(a, b)| !(a.is_finite() && b.is_finite() && a < b)) {
            return Err(GeometryError::InvalidParameter("box needs finite lo < hi on every axis".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sampler {
    pub domain: SampleBox,
    pub count: usize,
    pub seed: u64,
}

/// Extreme pairwise distance ratios of a map over a seeded sample. This is
/// a sampled estimate, not a proof of the distortion bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistortionCertificate {
    pub lo: f64,
    pub hi: f64,
    pub k: usize,
    pub pairs: usize,
    pub seed: u64,
}

impl DistortionCertificate {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Whether every sampled ratio lies in `[1 - c, 1 + c]`.
    pub fn within(&self, c: f64) -> bool {
        self.lo >= 1.0 - c && self.hi <= 1.0 + c
    }
}

fn draw(rng: &mut ChaCha8Rng, domain: &SampleBox, k: usize) -> Vec<Point> {
    (0..k)
        .map(|_| Point::from_raw(domain.lo.iter().zip(&domain.hi).map(|(&a, &b)| rng.random_range(a..b)).collect()))
        .collect()
}

fn has_coincidence(points: &[Point]) -> bool {
    points.iter().enumerate().any(|(i, p)| points[i + 1..].iter().any(|q| p == q))
}

/// Min/max of `|F(x) - F(y)| / |x - y|` over all pairs of `points`.
/// Rigid motions act on the difference `x - y` directly.
pub fn pair_ratio_bounds(map: &DistortionMap, points: &[Point]) -> Result<(f64, f64), GeometryError> {
    let d = map.validate()?;
    check_dims(points, d)?;
    if points.len() < 2 {
        return Err(GeometryError::TooFewPoints { needed: 2, got: points.len() });
    }
    let images = match map {
        DistortionMap::Motion(_) => None,
        _ => Some(map.apply_all(points)?),
    };
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let (x, y) = (points[i].coords(), points[j].coords());
            let den = distance(x, y);
            if den == 0.0 {
                return Err(GeometryError::CoincidentSourcePoints(i, j));
            }
            let num = match (map, &images) {
                (DistortionMap::Motion(m), _) => {
                    let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
                    super::norm(&m.apply_linear(&diff))
                }
                (_, Some(img)) => distance(img[i].coords(), img[j].coords()),
                (_, None) => unreachable!(),
            };
            let r = num / den;
            lo = lo.min(r);
            hi = hi.max(r);
        }
    }
    Ok((lo, hi))
}

pub fn distortion_certificate(map: &DistortionMap, sampler: &Sampler) -> Result<DistortionCertificate, GeometryError> {
    if sampler.count < 2 {
        return Err(GeometryError::TooFewPoints { needed: 2, got: sampler.count });
    }
    sampler.domain.validate()?;
    let d = map.validate()?;
    if sampler.domain.dim() != d {
        return Err(GeometryError::DimensionMismatch { expected: d, found: sampler.domain.dim() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(sampler.seed);
    let mut points = draw(&mut rng, &sampler.domain, sampler.count);
    let mut draws = 1;
    while has_coincidence(&points) {
        if draws == MAX_DRAWS {
            return Err(GeometryError::DegenerateSample { attempts: draws });
        }
        points = draw(&mut rng, &sampler.domain, sampler.count);
        draws += 1;
    }
    let (lo, hi) = pair_ratio_bounds(map, &points)?;
    let k = sampler.count;
    Ok(DistortionCertificate { lo, hi, k, pairs: k * (k - 1) / 2, seed: sampler.seed })
}

/// The points a certificate with this sampler is computed on.
pub fn sample_points(sampler: &Sampler) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(sampler.seed);
    let mut points = draw(&mut rng, &sampler.domain, sampler.count);
    for _ in 1..MAX_DRAWS {
        if !has_coincidence(&points) {
            break;
        }
        points = draw(&mut rng, &sampler.domain, sampler.count);
    }
    points
}
