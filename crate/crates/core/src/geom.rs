//! Points, lattice coordinates, tolerances and the two lattices.

use std::fmt::Debug;
use std::hash::Hash;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::error::{CoreError, Result};

pub const SQRT3: f64 = 1.732_050_807_568_877_2;
pub const SQRT2: f64 = std::f64::consts::SQRT_2;

/// A center in units of the sphere radius. Touching unit spheres sit at distance 2.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point<const D: usize>(pub [f64; D]);

impl<const D: usize> Point<D> {
    pub const ORIGIN: Self = Point([0.0; D]);

    pub fn new(coords: [f64; D]) -> Result<Self> {
        if coords.iter().all(|c| c.is_finite()) {
            Ok(Point(coords))
        } else {
            Err(CoreError::InvalidDefect(format!("non-finite coordinates {coords:?}")))
        }
    }

    pub fn from_slice(s: &[f64]) -> Result<Self> {
        let arr: [f64; D] = s
            .try_into()
            .map_err(|_| CoreError::DimensionMismatch { expected: D, found: s.len() })?;
        Self::new(arr)
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn norm2(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm2().sqrt()
    }

    /// Unit vector in the same direction; `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| *self * (1.0 / n))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }
}

impl<const D: usize> Default for Point<D> {
    fn default() -> Self {
        Self::ORIGIN
    }
}

impl<const D: usize> Add for Point<D> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a += b;
        }
        self
    }
}

impl<const D: usize> AddAssign for Point<D> {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl<const D: usize> Sub for Point<D> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a -= b;
        }
        self
    }
}

impl<const D: usize> Neg for Point<D> {
    type Output = Self;
    fn neg(self) -> Self {
        self * -1.0
    }
}

impl<const D: usize> Mul<f64> for Point<D> {
    type Output = Self;
    fn mul(mut self, s: f64) -> Self {
        for a in self.0.iter_mut() {
            *a *= s;
        }
        self
    }
}

/// Squared Euclidean distance. Both arguments share the dimension `D` by construction.
pub fn dist2<const D: usize>(p: &Point<D>, q: &Point<D>) -> f64 {
    let mut s = 0.0;
    for k in 0..D {
        let d = p.0[k] - q.0[k];
        s += d * d;
    }
    s
}

/// Squared distance between coordinate slices of possibly different length.
pub fn dist2_dyn(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(CoreError::DimensionMismatch { expected: p.len(), found: q.len() });
    }
    Ok(p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum())
}

/// Integer indices naming one sphere of a perfect lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeCoord<const D: usize>(pub [i64; D]);

impl<const D: usize> Add for LatticeCoord<D> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a += b;
        }
        self
    }
}

impl<const D: usize> Sub for LatticeCoord<D> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a -= b;
        }
        self
    }
}

/// Tolerances on squared distances and search convergence.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ToleranceConfig {
    /// Slack allowed below squared distance 4 in validity checks.
    pub eps_valid: f64,
    /// Margin required above radius 2 for insertions.
    pub eps_cert: f64,
    /// Convergence tolerance of the 1D searches.
    pub eps_opt: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig { eps_valid: 1e-9, eps_cert: 1e-6, eps_opt: 1e-9 }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps_valid > 0.0 && self.eps_valid < self.eps_cert) {
            return Err(CoreError::InvalidTolerance(format!(
                "need 0 < eps_valid < eps_cert, got {} and {}",
                self.eps_valid, self.eps_cert
            )));
        }
        if !(self.eps_opt > 0.0) {
            return Err(CoreError::InvalidTolerance(format!("eps_opt must be positive, got {}", self.eps_opt)));
        }
        Ok(())
    }
}

/// Which of the two supported lattices a packing is built on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LatticeKind {
    Honeycomb,
    Fcc,
}

impl LatticeKind {
    pub fn dim(self) -> usize {
        match self {
            LatticeKind::Honeycomb => 2,
            LatticeKind::Fcc => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LatticeKind::Honeycomb => "honeycomb",
            LatticeKind::Fcc => "fcc",
        }
    }
}

impl std::str::FromStr for LatticeKind {
    type Err = CoreError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "honeycomb" => Ok(LatticeKind::Honeycomb),
            "fcc" => Ok(LatticeKind::Fcc),
            other => Err(CoreError::Parse(format!("unknown lattice '{other}'"))),
        }
    }
}

/// A unit-sphere lattice packing in dimension `D`.
pub trait Lattice<const D: usize>: Copy + Clone + Debug + Default + Send + Sync + 'static {
    const KIND: LatticeKind;

    fn center(c: LatticeCoord<D>) -> Point<D>;

    /// A superset of the coordinates whose centers lie in the closed box `[lo, hi]`,
    /// padded by two indices per axis.
    fn coords_covering(lo: &Point<D>, hi: &Point<D>) -> Vec<LatticeCoord<D>>;

    /// Nearest-neighbor offsets in lattice coordinates.
    fn neighbor_offsets() -> Vec<LatticeCoord<D>>;
}

/// Triangular lattice with centers at (2i+j, √3 j).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Honeycomb;

/// Face-centered cubic lattice with centers at (2i+k, 2j+k, √2 k).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Fcc;

pub fn honeycomb_point(c: LatticeCoord<2>) -> Point<2> {
    let [i, j] = c.0;
    Point([(2 * i + j) as f64, SQRT3 * j as f64])
}

pub fn fcc_point(c: LatticeCoord<3>) -> Point<3> {
    let [i, j, k] = c.0;
    Point([(2 * i + k) as f64, (2 * j + k) as f64, SQRT2 * k as f64])
}

fn span(lo: f64, hi: f64) -> std::ops::RangeInclusive<i64> {
    (lo.floor() as i64 - 2)..=(hi.ceil() as i64 + 2)
}

impl Lattice<2> for Honeycomb {
    const KIND: LatticeKind = LatticeKind::Honeycomb;

    fn center(c: LatticeCoord<2>) -> Point<2> {
        honeycomb_point(c)
    }

    fn coords_covering(lo: &Point<2>, hi: &Point<2>) -> Vec<LatticeCoord<2>> {
        let mut out = Vec::new();
        for j in span(lo.0[1] / SQRT3, hi.0[1] / SQRT3) {
            for i in span((lo.0[0] - j as f64) / 2.0, (hi.0[0] - j as f64) / 2.0) {
                out.push(LatticeCoord([i, j]));
            }
        }
        out
    }

    fn neighbor_offsets() -> Vec<LatticeCoord<2>> {
        [[1, 0], [0, 1], [-1, 1], [-1, 0], [0, -1], [1, -1]].map(LatticeCoord).to_vec()
    }
}

impl Lattice<3> for Fcc {
    const KIND: LatticeKind = LatticeKind::Fcc;

    fn center(c: LatticeCoord<3>) -> Point<3> {
        fcc_point(c)
    }

    fn coords_covering(lo: &Point<3>, hi: &Point<3>) -> Vec<LatticeCoord<3>> {
        let mut out = Vec::new();
        for k in span(lo.0[2] / SQRT2, hi.0[2] / SQRT2) {
            let kf = k as f64;
            for j in span((lo.0[1] - kf) / 2.0, (hi.0[1] - kf) / 2.0) {
                for i in span((lo.0[0] - kf) / 2.0, (hi.0[0] - kf) / 2.0) {
                    out.push(LatticeCoord([i, j, k]));
                }
            }
        }
        out
    }

    fn neighbor_offsets() -> Vec<LatticeCoord<3>> {
        let mut v = Vec::with_capacity(12);
        for di in -1..=1i64 {
            for dj in -1..=1i64 {
                for dk in -1..=1i64 {
                    let c = LatticeCoord([di, dj, dk]);
                    if (fcc_point(c).norm2() - 4.0).abs() < 1e-9 {
                        v.push(c);
                    }
                }
            }
        }
        v
    }
}
