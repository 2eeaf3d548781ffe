use serde::{Deserialize, Serialize};

use super::{check_dims, norm, AngleProfile, EuclideanMotion, GeometryError, Point, SlideProfile};

/// One diagonal block of the twist matrix `T_x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Block {
    Identity1,
    /// `[[cos f, sin f], [-sin f, cos f]]` with `f = f(|x|)`.
    Rot2 { profile: AngleProfile },
}

impl Block {
    pub fn size(&self) -> usize {
        match self {
            Self::Identity1 => 1,
            Self::Rot2 { .. } => 2,
        }
    }
}

/// `x ↦ M^T T_x (M x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SlowTwistRepr", into = "SlowTwistRepr")]
pub struct SlowTwistSpec {
    base: EuclideanMotion,
    blocks: Vec<Block>,
}

#[derive(Serialize, Deserialize)]
struct SlowTwistRepr {
    dim: usize,
    base: EuclideanMotion,
    blocks: Vec<Block>,
}

impl From<SlowTwistSpec> for SlowTwistRepr {
    fn from(s: SlowTwistSpec) -> Self {
        Self { dim: s.dim(), base: s.base, blocks: s.blocks }
    }
}

impl TryFrom<SlowTwistRepr> for SlowTwistSpec {
    type Error = GeometryError;

    fn try_from(r: SlowTwistRepr) -> Result<Self, Self::Error> {
        let s = SlowTwistSpec::new(r.base, r.blocks)?;
        if s.dim() != r.dim {
            return Err(GeometryError::DimensionMismatch { expected: r.dim, found: s.dim() });
        }
        Ok(s)
    }
}

impl SlowTwistSpec {
    pub fn new(base: EuclideanMotion, blocks: Vec<Block>) -> Result<Self, GeometryError> {
        if !base.is_proper() {
            return Err(GeometryError::InvalidTwist("base rotation must be proper".into()));
        }
        if !base.is_linear() {
            return Err(GeometryError::InvalidTwist("base rotation must have zero translation".into()));
        }
        let total: usize = blocks.iter().map(Block::size).sum();
        if total != base.dim() {
            return Err(GeometryError::InvalidTwist(format!(
                "block sizes sum to {total}, dimension is {}",
                base.dim()
            )));
        }
        Ok(Self { base, blocks })
    }

    /// The planar twist with `M = I`.
    pub fn planar(profile: AngleProfile) -> Self {
        Self { base: EuclideanMotion::identity(2), blocks: vec![Block::Rot2 { profile }] }
    }

    /// `diag(1, R(f))` in `R^3` with base rotation `base`.
    pub fn spatial(base: EuclideanMotion, profile: AngleProfile) -> Result<Self, GeometryError> {
        Self::new(base, vec![Block::Identity1, Block::Rot2 { profile }])
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn base(&self) -> &EuclideanMotion {
        &self.base
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn profiles(&self) -> impl Iterator<Item = &AngleProfile> {
        self.blocks.iter().filter_map(|b| match b {
            Block::Rot2 { profile } => Some(profile),
            Block::Identity1 => None,
        })
    }

    /// Every angle profile multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        let blocks = self
            .blocks
            .iter()
            .map(|b| match b {
                Block::Identity1 => Block::Identity1,
                Block::Rot2 { profile } => Block::Rot2 { profile: profile.scaled(s) },
            })
            .collect();
        Self { base: self.base.clone(), blocks }
    }

    pub fn apply(&self, x: &Point) -> Result<Point, GeometryError> {
        if x.dim() != self.dim() {
            return Err(GeometryError::DimensionMismatch { expected: self.dim(), found: x.dim() });
        }
        let r = norm(x.coords());
        let mut y = self.base.apply_linear(x.coords());
        let mut i = 0;
        for b in &self.blocks {
            if let Block::Rot2 { profile } = b {
                let (s, c) = profile.value(r).sin_cos();
                let (u, v) = (y[i], y[i + 1]);
                y[i] = c * u + s * v;
                y[i + 1] = -s * u + c * v;
            }
            i += b.size();
        }
        Ok(Point::from_raw(self.base.apply_transpose(&y)))
    }
}

/// `t ↦ t + g(t)` with `g_i` acting on coordinate `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<SlideProfile>", into = "Vec<SlideProfile>")]
pub struct SlideSpec {
    profiles: Vec<SlideProfile>,
}

impl TryFrom<Vec<SlideProfile>> for SlideSpec {
    type Error = GeometryError;

    fn try_from(v: Vec<SlideProfile>) -> Result<Self, Self::Error> {
        Self::new(v)
    }
}

impl From<SlideSpec> for Vec<SlideProfile> {
    fn from(s: SlideSpec) -> Self {
        s.profiles
    }
}

impl SlideSpec {
    pub fn new(profiles: Vec<SlideProfile>) -> Result<Self, GeometryError> {
        if profiles.is_empty() {
            return Err(GeometryError::EmptyPoint);
        }
        Ok(Self { profiles })
    }

    pub fn identity(d: usize) -> Self {
        Self { profiles: vec![SlideProfile::Zero; d.max(1)] }
    }

    pub fn dim(&self) -> usize {
        self.profiles.len()
    }

    pub fn profiles(&self) -> &[SlideProfile] {
        &self.profiles
    }

    pub fn apply(&self, x: &Point) -> Result<Point, GeometryError> {
        if x.dim() != self.dim() {
            return Err(GeometryError::DimensionMismatch { expected: self.dim(), found: x.dim() });
        }
        Ok(Point::from_raw(x.coords().iter().zip(&self.profiles).map(|(t, g)| t + g.value(*t)).collect()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", content = "spec", rename_all = "snake_case")]
pub enum DistortionMap {
    Motion(EuclideanMotion),
    SlowTwist(SlowTwistSpec),
    Slide(SlideSpec),
    /// Applied left to right.
    Composition(Vec<DistortionMap>),
}

impl DistortionMap {
    pub fn identity(d: usize) -> Self {
        Self::Motion(EuclideanMotion::identity(d))
    }

    pub fn compose(maps: Vec<DistortionMap>) -> Result<Self, GeometryError> {
        let m = Self::Composition(maps);
        m.validate()?;
        Ok(m)
    }

    /// Checks non-empty compositions of a single dimension.
    pub fn validate(&self) -> Result<usize, GeometryError> {
        match self {
            Self::Composition(parts) => {
                let first = parts.first().ok_or(GeometryError::EmptyComposition)?.validate()?;
                for p in &parts[1..] {
                    let d = p.validate()?;
                    if d != first {
                        return Err(GeometryError::DimensionMismatch { expected: first, found: d });
                    }
                }
                Ok(first)
            }
            other => Ok(other.dim()),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Motion(m) => m.dim(),
            Self::SlowTwist(s) => s.dim(),
            Self::Slide(s) => s.dim(),
            Self::Composition(parts) => parts.first().map_or(0, DistortionMap::dim),
        }
    }

    pub fn apply(&self, x: &Point) -> Result<Point, GeometryError> {
        match self {
            Self::Motion(m) => m.apply(x),
            Self::SlowTwist(s) => s.apply(x),
            Self::Slide(s) => s.apply(x),
            Self::Composition(parts) => {
                let (first, rest) = parts.split_first().ok_or(GeometryError::EmptyComposition)?;
                rest.iter().try_fold(first.apply(x)?, |y, m| m.apply(&y))
            }
        }
    }

    pub fn apply_all(&self, points: &[Point]) -> Result<Vec<Point>, GeometryError> {
        let d = self.validate()?;
        check_dims(points, d)?;
        points.iter().map(|p| self.apply(p)).collect()
    }
}
