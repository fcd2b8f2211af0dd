//! Infinite lattice packings with one hyperplane gap, and finite windows onto them.

use std::marker::PhantomData;

use crate::error::{CoreError, Result};
use crate::geom::{Fcc, Honeycomb, Lattice, LatticeCoord, LatticeKind, Point};

/// Slack on the closed half-space test so a lattice row lying on the hyperplane is never split.
pub const HALF_SPACE_SLACK: f64 = 1e-12;

/// Hyperplane `<p, normal> = offset`; every center with `<p, normal> >= offset` moves by `width * normal`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GapDefect<const D: usize> {
    normal: Point<D>,
    offset: f64,
    width: f64,
}

impl<const D: usize> GapDefect<D> {
    pub fn new(normal: Point<D>, offset: f64, width: f64) -> Result<Self> {
        if !normal.is_finite() || !offset.is_finite() || !width.is_finite() {
            return Err(CoreError::InvalidDefect("non-finite parameters".into()));
        }
        if (normal.norm() - 1.0).abs() > 1e-12 {
            return Err(CoreError::InvalidDefect(format!("normal {:?} is not a unit vector", normal.0)));
        }
        if width < 0.0 {
            return Err(CoreError::InvalidDefect(format!("negative width {width}")));
        }
        Ok(GapDefect { normal, offset, width })
    }

    /// Builds a defect from a direction that need not be normalized.
    pub fn from_direction(direction: Point<D>, offset: f64, width: f64) -> Result<Self> {
        let n = direction
            .normalized()
            .ok_or_else(|| CoreError::InvalidDefect("zero gap normal".into()))?;
        Self::new(n, offset, width)
    }

    pub fn normal(&self) -> Point<D> {
        self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    /// Same hyperplane and half-space, different width.
    pub fn with_width(&self, width: f64) -> Result<Self> {
        Self::new(self.normal, self.offset, width)
    }

    /// Whether an unshifted lattice center belongs to the moving half-space.
    pub fn in_upper(&self, p: &Point<D>) -> bool {
        p.dot(&self.normal) >= self.offset - HALF_SPACE_SLACK
    }

    pub fn shift_vector(&self) -> Point<D> {
        self.normal * self.width
    }

    /// Signed distance of a point from the hyperplane.
    pub fn side(&self, p: &Point<D>) -> f64 {
        p.dot(&self.normal) - self.offset
    }
}

pub fn defect_shift<const D: usize>(defect: &GapDefect<D>, p: Point<D>) -> Point<D> {
    if defect.in_upper(&p) {
        p + defect.shift_vector()
    } else {
        p
    }
}

/// Closed axis-aligned box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Region<const D: usize> {
    pub lo: Point<D>,
    pub hi: Point<D>,
}

impl<const D: usize> Region<D> {
    pub fn new(lo: Point<D>, hi: Point<D>) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(CoreError::InvalidRegion("non-finite bounds".into()));
        }
        if (0..D).any(|k| lo.0[k] > hi.0[k]) {
            return Err(CoreError::InvalidRegion(format!("lo {:?} exceeds hi {:?}", lo.0, hi.0)));
        }
        Ok(Region { lo, hi })
    }

    /// The cube `[-h, h]^D` around `center`.
    pub fn cube(center: Point<D>, half: f64) -> Result<Self> {
        Self::new(center + Point([-half; D]), center + Point([half; D]))
    }

    /// Smallest box containing all points.
    pub fn bounding(points: impl IntoIterator<Item = Point<D>>) -> Option<Self> {
        let mut it = points.into_iter();
        let first = it.next()?;
        let (mut lo, mut hi) = (first, first);
        for p in it {
            for k in 0..D {
                lo.0[k] = lo.0[k].min(p.0[k]);
                hi.0[k] = hi.0[k].max(p.0[k]);
            }
        }
        Some(Region { lo, hi })
    }

    pub fn contains(&self, p: &Point<D>) -> bool {
        (0..D).all(|k| p.0[k] >= self.lo.0[k] && p.0[k] <= self.hi.0[k])
    }

    pub fn expanded(&self, r: f64) -> Self {
        Region { lo: self.lo + Point([-r; D]), hi: self.hi + Point([r; D]) }
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut out = *self;
        for k in 0..D {
            out.lo.0[k] = out.lo.0[k].min(other.lo.0[k]);
            out.hi.0[k] = out.hi.0[k].max(other.hi.0[k]);
        }
        out
    }

    pub fn translated(&self, v: Point<D>) -> Self {
        Region { lo: self.lo + v, hi: self.hi + v }
    }

    pub fn center(&self) -> Point<D> {
        (self.lo + self.hi) * 0.5
    }

    /// Euclidean distance from a point to the box (0 inside).
    pub fn distance_to(&self, p: &Point<D>) -> f64 {
        let mut s = 0.0;
        for k in 0..D {
            let e = (self.lo.0[k] - p.0[k]).max(0.0).max(p.0[k] - self.hi.0[k]);
            s += e * e;
        }
        s.sqrt()
    }
}

/// A perfect lattice packing with one gap defect.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DefectivePacking<const D: usize, L: Lattice<D>> {
    pub defect: GapDefect<D>,
    lattice: PhantomData<L>,
}

pub type HoneycombPacking = DefectivePacking<2, Honeycomb>;
pub type FccPacking = DefectivePacking<3, Fcc>;

impl<const D: usize, L: Lattice<D>> DefectivePacking<D, L> {
    pub fn new(defect: GapDefect<D>) -> Self {
        DefectivePacking { defect, lattice: PhantomData }
    }

    pub fn kind(&self) -> LatticeKind {
        L::KIND
    }

    pub fn with_width(&self, width: f64) -> Result<Self> {
        Ok(Self::new(self.defect.with_width(width)?))
    }

    /// Unshifted lattice position.
    pub fn lattice_point(&self, c: LatticeCoord<D>) -> Point<D> {
        L::center(c)
    }

    /// Position of a center in the defective packing.
    pub fn position(&self, c: LatticeCoord<D>) -> Point<D> {
        defect_shift(&self.defect, L::center(c))
    }

    /// Coordinates whose shifted centers may fall in `region`, unordered.
    fn candidates(&self, region: &Region<D>) -> Vec<LatticeCoord<D>> {
        let v = self.defect.shift_vector();
        let cover = region.union(&region.translated(-v));
        L::coords_covering(&cover.lo, &cover.hi)
    }

    /// Defect-shifted centers inside the closed region, sorted by lattice coordinate.
    pub fn enumerate_centers(&self, region: &Region<D>) -> Vec<(LatticeCoord<D>, Point<D>)> {
        let mut out: Vec<_> = self
            .candidates(region)
            .into_iter()
            .map(|c| (c, self.position(c)))
            .filter(|(_, p)| region.contains(p))
            .collect();
        out.sort_by_key(|a| a.0);
        out
    }

    /// Centers outside `region` within distance `reach` of it, sorted by lattice coordinate.
    pub fn background_neighbors_with_coords(&self, region: &Region<D>, reach: f64) -> Vec<(LatticeCoord<D>, Point<D>)> {
        if reach <= 0.0 {
            return Vec::new();
        }
        let outer = region.expanded(reach);
        let mut out: Vec<_> = self
            .candidates(&outer)
            .into_iter()
            .map(|c| (c, self.position(c)))
            .filter(|(_, p)| !region.contains(p) && region.distance_to(p) <= reach)
            .collect();
        out.sort_by_key(|a| a.0);
        out
    }

    pub fn background_neighbors(&self, region: &Region<D>, reach: f64) -> Vec<Point<D>> {
        self.background_neighbors_with_coords(region, reach).into_iter().map(|(_, p)| p).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{dist2, SQRT3};

    fn up(d: f64) -> GapDefect<2> {
        GapDefect::new(Point([0.0, 1.0]), 0.0, d).unwrap()
    }

    #[test]
    fn shift_examples() {
        let g = up(0.5);
        assert_eq!(defect_shift(&g, Point([0.0, 0.0])), Point([0.0, 0.5]));
        assert_eq!(defect_shift(&g, Point([1.0, -SQRT3])), Point([1.0, -SQRT3]));
        let z = up(0.0);
        assert_eq!(defect_shift(&z, Point([3.0, 7.0])), Point([3.0, 7.0]));
    }

    #[test]
    fn rejects_bad_defects() {
        assert!(GapDefect::new(Point([0.0, 2.0]), 0.0, 1.0).is_err());
        assert!(GapDefect::new(Point([0.0, 1.0]), 0.0, -1.0).is_err());
        assert!(GapDefect::<2>::from_direction(Point([0.0, 0.0]), 0.0, 1.0).is_err());
    }

    #[test]
    fn enumerate_examples() {
        let box2 = Region::cube(Point([0.0, 0.0]), 2.0).unwrap();
        let perfect = HoneycombPacking::new(up(0.0));
        let pts = perfect.enumerate_centers(&box2);
        assert_eq!(pts.len(), 7);

        let wide = HoneycombPacking::new(up(10.0));
        // Only the two centers of row j = -1 remain; the upper rows leave the box.
        assert_eq!(wide.enumerate_centers(&box2).len(), 2);

        let fcc = FccPacking::new(GapDefect::new(Point([0.0, 0.0, 1.0]), 0.0, 0.0).unwrap());
        let unit = Region::cube(Point([0.0; 3]), 0.5).unwrap();
        assert_eq!(fcc.enumerate_centers(&unit).len(), 1);
    }

    #[test]
    fn background_examples() {
        let perfect = HoneycombPacking::new(up(0.0));
        let tiny = Region::cube(Point([0.0, 0.0]), 0.1).unwrap();
        let nb = perfect.background_neighbors(&tiny, 2.1);
        assert_eq!(nb.len(), 6);
        assert!(nb.iter().all(|p| (dist2(p, &Point([0.0, 0.0])) - 4.0).abs() < 1e-12));
        assert!(perfect.background_neighbors(&tiny, 0.0).is_empty());

        let fcc = FccPacking::new(GapDefect::new(Point([0.0, 0.0, 1.0]), 0.0, 0.0).unwrap());
        let tiny3 = Region::cube(Point([0.0; 3]), 0.1).unwrap();
        assert_eq!(fcc.background_neighbors(&tiny3, 2.1).len(), 12);
    }
}
