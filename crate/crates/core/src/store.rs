//! Finite editable configurations on top of a frozen defective packing.

use rustc_hash::FxHashMap;

use crate::error::{CoreError, Result};
use crate::geom::{dist2, Lattice, LatticeCoord, Point, ToleranceConfig};
use crate::lattice::{DefectivePacking, Region};

/// Reach used when collecting frozen background centers for validity checks.
pub const BACKGROUND_REACH: f64 = 2.0 + 1e-6;

/// Largest radius `largest_empty_ball` will report; beyond it the neighbor set may be incomplete.
pub const EMPTY_BALL_REACH: f64 = 4.0;

/// Uniform hash grid with cells of one diameter.
#[derive(Clone, Debug, Default)]
pub struct SpatialHash<const D: usize> {
    cells: FxHashMap<[i64; D], Vec<usize>>,
}

pub const CELL: f64 = 2.0;

pub fn cell_of<const D: usize>(p: &Point<D>) -> [i64; D] {
    p.0.map(|x| (x / CELL).floor() as i64)
}

impl<const D: usize> SpatialHash<D> {
    pub fn insert(&mut self, p: &Point<D>, id: usize) {
        self.cells.entry(cell_of(p)).or_default().push(id);
    }

    pub fn remove(&mut self, p: &Point<D>, id: usize) {
        let key = cell_of(p);
        if let Some(v) = self.cells.get_mut(&key) {
            v.retain(|&x| x != id);
            if v.is_empty() {
                self.cells.remove(&key);
            }
        }
    }

    /// Visits every id stored in the cells within `rings` cells of `p`'s cell.
    pub fn for_each_near(&self, p: &Point<D>, rings: i64, mut f: impl FnMut(usize)) {
        let base = cell_of(p);
        let side = 2 * rings + 1;
        let total = side.pow(D as u32);
        for code in 0..total {
            let mut key = base;
            let mut rest = code;
            for k in key.iter_mut() {
                *k += rest % side - rings;
                rest /= side;
            }
            if let Some(ids) = self.cells.get(&key) {
                ids.iter().for_each(|&id| f(id));
            }
        }
    }
}

/// One side of an overlapping pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Site {
    Patch(usize),
    Background(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Violation {
    pub a: Site,
    pub b: Site,
    pub dist2: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidityReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
}

impl ValidityReport {
    fn from_violations(mut violations: Vec<Violation>) -> Self {
        violations.sort_by_key(|x| (x.a, x.b));
        ValidityReport { valid: violations.is_empty(), violations }
    }

    pub fn worst(&self) -> f64 {
        self.violations.iter().map(|v| v.dist2).fold(f64::INFINITY, f64::min)
    }
}

/// A stored center: lattice identity (absent for inserted centers) and current position.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Entry<const D: usize> {
    pub coord: Option<LatticeCoord<D>>,
    pub pos: Point<D>,
}

/// Finite set of centers inside `region`, edited against the frozen remainder of a packing.
#[derive(Clone, Debug)]
pub struct PackingPatch<const D: usize, L: Lattice<D>> {
    packing: DefectivePacking<D, L>,
    region: Region<D>,
    tol: ToleranceConfig,
    entries: Vec<Option<Entry<D>>>,
    by_coord: FxHashMap<LatticeCoord<D>, usize>,
    grid: SpatialHash<D>,
    background: Vec<(LatticeCoord<D>, Point<D>)>,
    bg_grid: SpatialHash<D>,
    live: usize,
}

impl<const D: usize, L: Lattice<D>> PackingPatch<D, L> {
    /// All centers of `packing` inside `region`, with the surrounding background frozen.
    pub fn from_packing(packing: DefectivePacking<D, L>, region: Region<D>, tol: ToleranceConfig) -> Self {
        let mut patch = Self::empty(packing, region, tol);
        for (c, p) in packing.enumerate_centers(&region) {
            let id = patch.push(Entry { coord: Some(c), pos: p });
            patch.by_coord.insert(c, id);
        }
        patch
    }

    /// No centers inside `region`; the background outside is still frozen.
    pub fn empty(packing: DefectivePacking<D, L>, region: Region<D>, tol: ToleranceConfig) -> Self {
        let background = packing.background_neighbors_with_coords(&region, BACKGROUND_REACH);
        let mut bg_grid = SpatialHash::default();
        for (k, (_, p)) in background.iter().enumerate() {
            bg_grid.insert(p, k);
        }
        PackingPatch {
            packing,
            region,
            tol,
            entries: Vec::new(),
            by_coord: FxHashMap::default(),
            grid: SpatialHash::default(),
            background,
            bg_grid,
            live: 0,
        }
    }

    /// An empty patch with no background at all, for standalone point sets.
    pub fn isolated(packing: DefectivePacking<D, L>, region: Region<D>, tol: ToleranceConfig) -> Self {
        let mut p = Self::empty(packing, region, tol);
        p.background.clear();
        p.bg_grid = SpatialHash::default();
        p
    }

    fn push(&mut self, e: Entry<D>) -> usize {
        let id = self.entries.len();
        self.grid.insert(&e.pos, id);
        self.entries.push(Some(e));
        self.live += 1;
        id
    }

    pub fn packing(&self) -> &DefectivePacking<D, L> {
        &self.packing
    }

    pub fn region(&self) -> &Region<D> {
        &self.region
    }

    pub fn tolerances(&self) -> &ToleranceConfig {
        &self.tol
    }

    pub fn len(&self) -> usize {
        self.live
    }

    pub fn is_empty(&self) -> bool {
        self.live == 0
    }

    pub fn get(&self, id: usize) -> Option<&Entry<D>> {
        self.entries.get(id).and_then(|e| e.as_ref())
    }

    pub fn id_of(&self, c: &LatticeCoord<D>) -> Option<usize> {
        self.by_coord.get(c).copied()
    }

    /// Live `(id, entry)` pairs in id order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &Entry<D>)> {
        self.entries.iter().enumerate().filter_map(|(i, e)| e.as_ref().map(|e| (i, e)))
    }

    pub fn positions(&self) -> impl Iterator<Item = Point<D>> + '_ {
        self.iter().map(|(_, e)| e.pos)
    }

    pub fn background(&self) -> &[(LatticeCoord<D>, Point<D>)] {
        &self.background
    }

    pub fn insert_center(&mut self, p: Point<D>) -> Result<usize> {
        if !self.region.contains(&p) {
            return Err(CoreError::OutsideRegion(p.0.to_vec()));
        }
        Ok(self.push(Entry { coord: None, pos: p }))
    }

    pub fn remove_center(&mut self, id: usize) -> Result<Point<D>> {
        let e = self.entries.get_mut(id).and_then(Option::take).ok_or(CoreError::UnknownId(id))?;
        self.grid.remove(&e.pos, id);
        if let Some(c) = e.coord {
            self.by_coord.remove(&c);
        }
        self.live -= 1;
        Ok(e.pos)
    }

    /// Moves every listed center by `distance * direction`.
    pub fn translate_set(&mut self, ids: &[usize], direction: Point<D>, distance: f64) -> Result<()> {
        if (direction.norm() - 1.0).abs() > 1e-12 {
            return Err(CoreError::InvalidDefect(format!("direction {:?} is not a unit vector", direction.0)));
        }
        self.translate_by(ids, direction * distance)
    }

    /// Moves every listed center by `v`; nothing changes if any id is unknown or would leave the region.
    pub fn translate_by(&mut self, ids: &[usize], v: Point<D>) -> Result<()> {
        for &id in ids {
            let e = self.get(id).ok_or(CoreError::UnknownId(id))?;
            let q = e.pos + v;
            if !self.region.contains(&q) {
                return Err(CoreError::OutsideRegion(q.0.to_vec()));
            }
        }
        for &id in ids {
            let e = self.entries[id].as_mut().expect("checked above");
            let old = e.pos;
            e.pos = old + v;
            let new = e.pos;
            self.grid.remove(&old, id);
            self.grid.insert(&new, id);
        }
        Ok(())
    }

    /// Overwrites positions; used to roll back a failed stage.
    pub fn set_positions(&mut self, moves: &[(usize, Point<D>)]) -> Result<()> {
        for &(id, p) in moves {
            let e = self.entries.get_mut(id).and_then(|e| e.as_mut()).ok_or(CoreError::UnknownId(id))?;
            let old = e.pos;
            e.pos = p;
            self.grid.remove(&old, id);
            self.grid.insert(&p, id);
        }
        Ok(())
    }

    fn threshold(&self) -> f64 {
        4.0 - self.tol.eps_valid
    }

    /// Pairwise check through the spatial hash, including the frozen background.
    pub fn is_valid_packing(&self) -> ValidityReport {
        let thr = self.threshold();
        let mut out = Vec::new();
        for (a, e) in self.iter() {
            self.grid.for_each_near(&e.pos, 1, |b| {
                if b > a {
                    let d = dist2(&e.pos, &self.entries[b].as_ref().expect("grid holds live ids").pos);
                    if d < thr {
                        out.push(Violation { a: Site::Patch(a), b: Site::Patch(b), dist2: d });
                    }
                }
            });
            self.bg_grid.for_each_near(&e.pos, 1, |k| {
                let d = dist2(&e.pos, &self.background[k].1);
                if d < thr {
                    out.push(Violation { a: Site::Patch(a), b: Site::Background(k), dist2: d });
                }
            });
        }
        ValidityReport::from_violations(out)
    }

    /// The same check by exhaustive all-pairs scan.
    pub fn validity_naive(&self) -> ValidityReport {
        let thr = self.threshold();
        let live: Vec<_> = self.iter().map(|(i, e)| (i, e.pos)).collect();
        let mut out = Vec::new();
        for (x, &(a, p)) in live.iter().enumerate() {
            for &(b, q) in &live[x + 1..] {
                let d = dist2(&p, &q);
                if d < thr {
                    out.push(Violation { a: Site::Patch(a), b: Site::Patch(b), dist2: d });
                }
            }
            for (k, (_, q)) in self.background.iter().enumerate() {
                let d = dist2(&p, q);
                if d < thr {
                    out.push(Violation { a: Site::Patch(a), b: Site::Background(k), dist2: d });
                }
            }
        }
        ValidityReport::from_violations(out)
    }

    /// Edits relative to the underlying packing: removed coordinates, moved centers, inserted points.
    pub fn edits(&self) -> PatchEdits<D> {
        let mut removals = Vec::new();
        for (c, _) in self.packing.enumerate_centers(&self.region) {
            if !self.by_coord.contains_key(&c) {
                removals.push(c);
            }
        }
        let mut moves = Vec::new();
        let mut insertions = Vec::new();
        for (_, e) in self.iter() {
            match e.coord {
                Some(c) if self.packing.position(c) != e.pos => moves.push((c, e.pos)),
                Some(_) => {}
                None => insertions.push(e.pos),
            }
        }
        moves.sort_by_key(|a| a.0);
        PatchEdits { removals, moves, insertions }
    }

    /// Centers (patch and frozen packing) that can lie within `EMPTY_BALL_REACH` of `search`.
    fn nearby_centers(&self, search: &Region<D>) -> Vec<Point<D>> {
        let reach_box = search.expanded(EMPTY_BALL_REACH);
        let mut pts: Vec<_> = self.positions().filter(|p| reach_box.contains(p)).collect();
        pts.extend(
            self.packing
                .background_neighbors(&self.region, EMPTY_BALL_REACH + 1.0)
                .into_iter()
                .filter(|p| search.distance_to(p) <= EMPTY_BALL_REACH),
        );
        pts
    }

    fn check_search(&self, search: &Region<D>) -> Result<()> {
        let inside = (0..D).all(|k| {
            search.lo.0[k] >= self.region.lo.0[k] - 1e-12 && search.hi.0[k] <= self.region.hi.0[k] + 1e-12
        });
        if !inside {
            return Err(CoreError::InvalidRegion("search box must lie inside the patch region".into()));
        }
        Ok(())
    }
}

/// Difference between a patch and the packing it was cut from.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct PatchEdits<const D: usize> {
    pub removals: Vec<LatticeCoord<D>>,
    pub moves: Vec<(LatticeCoord<D>, Point<D>)>,
    pub insertions: Vec<Point<D>>,
}

/// Nearest-distance queries over a fixed point set.
struct NearestField<const D: usize> {
    pts: Vec<Point<D>>,
    grid: SpatialHash<D>,
}

impl<const D: usize> NearestField<D> {
    fn new(pts: Vec<Point<D>>) -> Self {
        let mut grid = SpatialHash::default();
        for (i, p) in pts.iter().enumerate() {
            grid.insert(p, i);
        }
        NearestField { pts, grid }
    }

    /// Distance to the closest point, capped at `EMPTY_BALL_REACH`.
    fn radius(&self, q: &Point<D>) -> f64 {
        let rings = (EMPTY_BALL_REACH / CELL).ceil() as i64;
        let mut best = EMPTY_BALL_REACH * EMPTY_BALL_REACH;
        self.grid.for_each_near(q, rings, |i| best = best.min(dist2(q, &self.pts[i])));
        best.sqrt()
    }
}

fn clamp_into<const D: usize>(p: Point<D>, r: &Region<D>) -> Point<D> {
    let mut q = p;
    for k in 0..D {
        q.0[k] = q.0[k].clamp(r.lo.0[k], r.hi.0[k]);
    }
    q
}

impl<L: Lattice<2>> PackingPatch<2, L> {
    /// Largest-empty-circle search over Voronoi vertices, box corners and bisector/boundary crossings.
    pub fn largest_empty_ball(&self, search: &Region<2>) -> Result<(Point<2>, f64)> {
        use spade::{DelaunayTriangulation, Point2, Triangulation};

        self.check_search(search)?;
        let pts = self.nearby_centers(search);
        let field = NearestField::new(pts.clone());
        let [x0, y0] = search.lo.0;
        let [x1, y1] = search.hi.0;
        let mut cands = vec![
            Point([x0, y0]),
            Point([x1, y0]),
            Point([x0, y1]),
            Point([x1, y1]),
            search.center(),
        ];

        let mut tri: DelaunayTriangulation<Point2<f64>> = DelaunayTriangulation::new();
        for p in &pts {
            tri.insert(Point2::new(p.0[0], p.0[1])).map_err(|e| CoreError::Infeasible(format!("triangulation: {e:?}")))?;
        }
        for face in tri.inner_faces() {
            let c = face.circumcenter();
            let q = Point([c.x, c.y]);
            if q.is_finite() && search.contains(&q) {
                cands.push(q);
            }
        }
        // A Voronoi edge is part of the bisector of a Delaunay edge; its crossings with the
        // box boundary are candidates too.
        for edge in tri.undirected_edges() {
            let [a, b] = edge.positions();
            let m = Point([(a.x + b.x) / 2.0, (a.y + b.y) / 2.0]);
            let dir = Point([-(b.y - a.y), b.x - a.x]);
            for (axis, value) in [(0, x0), (0, x1), (1, y0), (1, y1)] {
                if dir.0[axis].abs() < 1e-300 {
                    continue;
                }
                let t = (value - m.0[axis]) / dir.0[axis];
                let q = clamp_into(m + dir * t, search);
                cands.push(q);
            }
        }
        if pts.len() < 3 {
            for p in &pts {
                for q in &pts {
                    cands.push(clamp_into((*p + *q) * 0.5, search));
                }
            }
        }

        let mut best = (cands[0], field.radius(&cands[0]));
        for q in cands.into_iter().skip(1) {
            let r = field.radius(&q);
            if r > best.1 {
                best = (q, r);
            }
        }
        Ok(best)
    }
}

impl<L: Lattice<3>> PackingPatch<3, L> {
    /// Grid search with step 0.25 followed by coordinate-wise ternary refinement of the best cells.
    pub fn largest_empty_ball(&self, search: &Region<3>) -> Result<(Point<3>, f64)> {
        self.check_search(search)?;
        let field = NearestField::new(self.nearby_centers(search));
        let step = 0.25;
        let counts: [usize; 3] =
            std::array::from_fn(|k| ((search.hi.0[k] - search.lo.0[k]) / step).floor() as usize + 1);
        let mut scored = Vec::with_capacity(counts.iter().product());
        for a in 0..counts[0] {
            for b in 0..counts[1] {
                for c in 0..counts[2] {
                    let q = Point([
                        search.lo.0[0] + a as f64 * step,
                        search.lo.0[1] + b as f64 * step,
                        search.lo.0[2] + c as f64 * step,
                    ]);
                    scored.push((field.radius(&q), q));
                }
            }
        }
        scored.sort_by(|x, y| y.0.total_cmp(&x.0));
        let mut best = (scored[0].1, scored[0].0);
        for &(_, start) in scored.iter().take(10) {
            let mut q = start;
            for _ in 0..6 {
                for k in 0..3 {
                    let lo = (q.0[k] - step).max(search.lo.0[k]);
                    let hi = (q.0[k] + step).min(search.hi.0[k]);
                    q.0[k] = ternary_max(lo, hi, |x| {
                        let mut t = q;
                        t.0[k] = x;
                        field.radius(&t)
                    });
                }
            }
            let r = field.radius(&q);
            if r > best.1 {
                best = (q, r);
            }
        }
        Ok(best)
    }
}

fn ternary_max(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    for _ in 0..60 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if f(m1) < f(m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    (lo + hi) / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{Honeycomb, SQRT3};
    use crate::lattice::{GapDefect, HoneycombPacking};

    fn packing(d: f64) -> HoneycombPacking {
        HoneycombPacking::new(GapDefect::new(Point([0.0, 1.0]), 0.0, d).unwrap())
    }

    fn standalone() -> PackingPatch<2, Honeycomb> {
        let region = Region::cube(Point([0.0, 0.0]), 50.0).unwrap();
        PackingPatch::isolated(packing(0.0), region, ToleranceConfig::default())
    }

    #[test]
    fn tangent_and_overlapping_pairs() {
        let mut p = standalone();
        p.insert_center(Point([0.0, 0.0])).unwrap();
        p.insert_center(Point([2.0, 0.0])).unwrap();
        assert!(p.is_valid_packing().valid);
        let mut q = standalone();
        q.insert_center(Point([0.0, 0.0])).unwrap();
        q.insert_center(Point([1.9, 0.0])).unwrap();
        assert_eq!(q.is_valid_packing().violations.len(), 1);
    }

    #[test]
    fn insert_remove_translate() {
        let mut p = standalone();
        assert_eq!(p.insert_center(Point([0.0, 0.0])).unwrap(), 0);
        assert!(p.is_valid_packing().valid);
        let b = p.insert_center(Point([1.0, 0.0])).unwrap();
        assert!(!p.is_valid_packing().valid);
        assert_eq!(p.remove_center(b).unwrap(), Point([1.0, 0.0]));
        assert!(p.is_valid_packing().valid);
        assert!(p.remove_center(b).is_err());
        p.translate_set(&[0], Point([0.0, 1.0]), 3.0).unwrap();
        assert_eq!(p.get(0).unwrap().pos, Point([0.0, 3.0]));
        p.translate_set(&[0], Point([0.0, 1.0]), 0.0).unwrap();
        assert_eq!(p.get(0).unwrap().pos, Point([0.0, 3.0]));
        assert!(p.translate_set(&[7], Point([0.0, 1.0]), 1.0).is_err());
        assert!(p.insert_center(Point([100.0, 0.0])).is_err());
    }

    #[test]
    fn defective_windows_are_valid() {
        for d in [0.0, 0.3, 1.7] {
            let region = Region::cube(Point([0.3, -0.2]), 6.0).unwrap();
            let p = PackingPatch::from_packing(packing(d), region, ToleranceConfig::default());
            assert!(p.is_valid_packing().valid);
            assert_eq!(p.is_valid_packing(), p.validity_naive());
        }
    }

    #[test]
    fn deep_hole_of_perfect_lattice() {
        let region = Region::cube(Point([0.0, 0.0]), 8.0).unwrap();
        let p = PackingPatch::from_packing(packing(0.0), region, ToleranceConfig::default());
        let search = Region::cube(Point([0.4, 0.3]), 3.0).unwrap();
        let (_, r) = p.largest_empty_ball(&search).unwrap();
        assert!((r - 2.0 / SQRT3).abs() < 1e-9, "r = {r}");
    }

    #[test]
    fn wide_gap_admits_a_circle() {
        let region = Region::cube(Point([0.0, 0.0]), 8.0).unwrap();
        let p = PackingPatch::from_packing(packing(2.0), region, ToleranceConfig::default());
        let search = Region::new(Point([-0.5, -0.5]), Point([0.5, 0.5])).unwrap();
        let (q, r) = p.largest_empty_ball(&search).unwrap();
        assert!(r >= 2.0 - 1e-9, "r = {r} at {q:?}");
    }

    #[test]
    fn lone_center_far_corner() {
        let region = Region::cube(Point([0.0, 0.0]), 50.0).unwrap();
        let mut p = PackingPatch::isolated(packing(0.0), region, ToleranceConfig::default());
        p.insert_center(Point([0.0, 0.0])).unwrap();
        let search = Region::cube(Point([10.0, 10.0]), 1.0).unwrap();
        let (q, r) = p.largest_empty_ball(&search).unwrap();
        // Farther than the reach cap, so the cap is reported.
        assert_eq!(r, EMPTY_BALL_REACH);
        assert!(search.contains(&q));
        let near = Region::cube(Point([1.5, 1.5]), 0.5).unwrap();
        let (q, r) = p.largest_empty_ball(&near).unwrap();
        assert_eq!(q, Point([2.0, 2.0]));
        assert!((r - 8f64.sqrt()).abs() < 1e-12);
    }
}
