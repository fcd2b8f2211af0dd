//! Reductions from a general gap to a lattice-direction gap by moving one corner piece.

use crate::blocks::{
    corner_simplex, half_cuboctahedron_block, is_honeycomb_direction, wedge_triangle, Block, HEX_STEPS,
};
use crate::error::{CoreError, Result};
use crate::geom::{dist2, Fcc, Honeycomb, Lattice, LatticeCoord, Point, ToleranceConfig, SQRT2, SQRT3};
use crate::lattice::{DefectivePacking, Region};
use crate::store::PackingPatch;

use super::probe::PROBE_THRESHOLD;
use super::SHRINK;

/// Members closer than this to the cutting hyperplane make a block inadmissible.
const CUT_CLEARANCE: f64 = 1e-9;

/// A rigid translation of `moved` that opens lattice-direction gaps of width `width`.
#[derive(Clone, Debug, PartialEq)]
pub struct Reduction<const D: usize> {
    /// The block that was split (or moved whole).
    pub block: Block<D>,
    pub moved: Vec<LatticeCoord<D>>,
    pub direction: Point<D>,
    pub distance: f64,
    pub width: f64,
    /// Box containing every moved center before and after the move.
    pub region: Region<D>,
}

impl<const D: usize> Reduction<D> {
    /// Final positions of the moved centers.
    pub fn moves<L: Lattice<D>>(&self, packing: &DefectivePacking<D, L>) -> Vec<(LatticeCoord<D>, Point<D>)> {
        let v = self.direction * self.distance;
        self.moved.iter().map(|&c| (c, packing.position(c) + v)).collect()
    }

    /// Applies the translation to a patch holding every moved center.
    pub fn apply<L: Lattice<D>>(&self, patch: &mut PackingPatch<D, L>) -> Result<()> {
        let ids = self
            .moved
            .iter()
            .map(|c| patch.id_of(c).ok_or_else(|| CoreError::MissingMember(c.0.to_vec())))
            .collect::<Result<Vec<_>>>()?;
        patch.translate_by(&ids, self.direction * self.distance)
    }
}

/// Largest `t <= cap` such that translating `moved` by `t * dir` keeps every pair with the rest
/// of the packing apart along the whole motion.
fn max_translation<const D: usize, L: Lattice<D>>(
    packing: &DefectivePacking<D, L>,
    moved: &[LatticeCoord<D>],
    dir: Point<D>,
    cap: f64,
) -> f64 {
    let set: rustc_hash::FxHashSet<_> = moved.iter().copied().collect();
    let pts: Vec<Point<D>> = moved.iter().map(|&c| packing.position(c)).collect();
    let Some(bbox) = Region::bounding(pts.iter().copied()) else {
        return 0.0;
    };
    let others: Vec<Point<D>> = packing
        .enumerate_centers(&bbox.expanded(2.0 + cap + 0.5))
        .into_iter()
        .filter(|(c, _)| !set.contains(c))
        .map(|(_, p)| p)
        .collect();
    let mut limit = cap;
    for p in &pts {
        for q in &others {
            let r = *p - *q;
            let c = r.norm2() - PROBE_THRESHOLD;
            if c < 0.0 {
                return 0.0;
            }
            let b = r.dot(&dir);
            if b >= 0.0 {
                continue;
            }
            let disc = b * b - c;
            if disc > 0.0 {
                limit = limit.min((-b - disc.sqrt()).max(0.0));
            }
        }
    }
    limit
}

fn verify<const D: usize, L: Lattice<D>>(
    packing: &DefectivePacking<D, L>,
    red: &Reduction<D>,
    tol: &ToleranceConfig,
) -> Result<()> {
    let mut patch = PackingPatch::from_packing(*packing, red.region, *tol);
    red.apply(&mut patch)?;
    let report = patch.is_valid_packing();
    if !report.valid {
        return Err(CoreError::Infeasible(format!(
            "reduction leaves {} overlaps (worst squared distance {})",
            report.violations.len(),
            report.worst()
        )));
    }
    Ok(())
}

fn moved_region<const D: usize, L: Lattice<D>>(
    packing: &DefectivePacking<D, L>,
    moved: &[LatticeCoord<D>],
    v: Point<D>,
) -> Result<Region<D>> {
    let pts = moved.iter().flat_map(|&c| {
        let p = packing.position(c);
        [p, p + v]
    });
    Ok(Region::bounding(pts).ok_or_else(|| CoreError::Infeasible("nothing to move".into()))?.expanded(0.5))
}

/// Lattice centers strictly on the fixed side of the gap at signed distance in `[lo, hi)` below
/// it, nearest to the foot of the origin first.
fn anchors_below<const D: usize, L: Lattice<D>>(
    packing: &DefectivePacking<D, L>,
    lo: f64,
    hi: f64,
    window: f64,
) -> Result<Vec<LatticeCoord<D>>> {
    let g = packing.defect;
    let foot = g.normal() * g.offset();
    let bx = Region::cube(foot, window)?;
    let all = L::coords_covering(&bx.lo, &bx.hi);
    if all.iter().any(|&c| g.side(&L::center(c)).abs() < CUT_CLEARANCE) {
        return Err(CoreError::NoAdmissibleBlock("the gap hyperplane passes through a lattice center".into()));
    }
    let mut out: Vec<_> = all
        .into_iter()
        .filter(|&c| {
            let s = -g.side(&L::center(c));
            s >= lo && s < hi && bx.contains(&L::center(c))
        })
        .collect();
    out.sort_by(|a, b| {
        let (da, db) = (dist2(&L::center(*a), &foot), dist2(&L::center(*b), &foot));
        da.partial_cmp(&db).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(b))
    });
    Ok(out)
}

/// Members of `block` on the fixed side, if the hyperplane cleanly separates the corner at
/// `vertex` from all other corners.
fn corner_piece<const D: usize, L: Lattice<D>>(
    packing: &DefectivePacking<D, L>,
    block: &Block<D>,
    vertex: LatticeCoord<D>,
) -> Option<Vec<LatticeCoord<D>>> {
    let g = packing.defect;
    let side = |c: &LatticeCoord<D>| g.side(&L::center(*c));
    if block.members().iter().any(|c| side(c).abs() < CUT_CLEARANCE) {
        return None;
    }
    if side(&vertex) >= 0.0 || block.corners.iter().any(|c| *c != vertex && side(c) <= 0.0) {
        return None;
    }
    Some(block.members().iter().copied().filter(|c| side(c) < 0.0).collect())
}

/// Planar reduction. A triangle of size `n` with a corner just below the gap line is cut by the
/// line; the corner piece slides along the corner bisector toward the rest of the triangle,
/// opening gaps of equal width along its two lattice-line sides.
pub fn reduce_line_gap(
    packing: &DefectivePacking<2, Honeycomb>,
    n: usize,
    tol: &ToleranceConfig,
) -> Result<Reduction<2>> {
    if n < 2 {
        return Err(CoreError::SizeTooSmall { n, min: 2 });
    }
    let g = packing.defect;
    let normal = g.normal();
    if crate::blocks::PlaneFrame::for_gap(&g).is_ok() {
        return Err(CoreError::UnsupportedGap("the gap already runs along a lattice line".into()));
    }
    // The corner depends only on the line, so the moved piece is the same for every large n.
    let anchors = anchors_below(packing, 1.5, 3.0, 12.0)?;
    let vertex = *anchors
        .first()
        .ok_or_else(|| CoreError::NoAdmissibleBlock("no lattice center near the line".into()))?;
    let bisector = |k: usize| {
        let (s, t) = (HEX_STEPS[k], HEX_STEPS[(k + 1) % 6]);
        Honeycomb::center(LatticeCoord([s[0] + t[0], s[1] + t[1]])).normalized().expect("nonzero")
    };
    let k = (0..6)
        .max_by(|&a, &b| bisector(a).dot(&normal).partial_cmp(&bisector(b).dot(&normal)).expect("finite"))
        .expect("six wedges");
    let block = wedge_triangle(vertex, k, n);
    let moved = corner_piece(packing, &block, vertex).ok_or_else(|| {
        CoreError::NoAdmissibleBlock(format!("a size-{n} triangle at {:?} is not cut cleanly by the line", vertex.0))
    })?;
    let dir = bisector(k);
    let t = max_translation(packing, &moved, dir, g.width()) * SHRINK;
    // The bisector makes 30 degrees with both sides.
    let width = t * 0.5;
    let region = moved_region(packing, &moved, dir * t)?;
    let red = Reduction { block, moved, direction: dir, distance: t, width, region };
    verify(packing, &red, tol)?;
    Ok(red)
}

/// Converts a Cartesian direction to cubic axes (inverse of `cubic_direction`).
fn to_cubic(v: Point<3>) -> [f64; 3] {
    [(v.0[0] - v.0[1]) / SQRT2, (v.0[0] + v.0[1]) / SQRT2, v.0[2]]
}

/// Reduction of a honeycomb-layer gap. Half of a cuboctahedral cluster, flat face on the last
/// layer below the gap, is lifted into the gap by `distance` (at most the gap width), opening
/// gaps of width `distance / sqrt(3)` along its three square faces.
pub fn reduce_honeycomb_gap(
    packing: &DefectivePacking<3, Fcc>,
    n: usize,
    tol: &ToleranceConfig,
) -> Result<Reduction<3>> {
    reduce_honeycomb_gap_by(packing, n, packing.defect.width() * SHRINK, tol)
}

/// As `reduce_honeycomb_gap` with an explicit lift `distance` in `[0, width]`.
pub fn reduce_honeycomb_gap_by(
    packing: &DefectivePacking<3, Fcc>,
    n: usize,
    distance: f64,
    tol: &ToleranceConfig,
) -> Result<Reduction<3>> {
    if n < 2 {
        return Err(CoreError::SizeTooSmall { n, min: 2 });
    }
    let g = packing.defect;
    let normal = g.normal();
    if !is_honeycomb_direction(&normal, 1e-9) {
        return Err(CoreError::UnsupportedGap("the gap is not parallel to a honeycomb layer".into()));
    }
    if !(0.0..=g.width()).contains(&distance) {
        return Err(CoreError::Infeasible(format!("lift {distance} outside [0, {}]", g.width())));
    }
    let sigma = to_cubic(normal).map(|u| if u > 0.0 { 1 } else { -1 });
    let layer_gap = 2.0 * (2.0f64 / 3.0).sqrt();
    let anchors = anchors_below(packing, 0.0, layer_gap - 1e-9, 4.0 * n as f64 + 8.0)?;
    let anchor = *anchors
        .first()
        .ok_or_else(|| CoreError::NoAdmissibleBlock("no layer below the gap".into()))?;
    let block = half_cuboctahedron_block(anchor, n, sigma);
    if block.members().iter().any(|c| g.in_upper(&Fcc::center(*c))) {
        return Err(CoreError::Infeasible("block crosses the gap".into()));
    }
    let moved = block.members().to_vec();
    let region = moved_region(packing, &moved, normal * distance)?;
    let red = Reduction { block, moved, direction: normal, distance, width: distance / SQRT3, region };
    verify(packing, &red, tol)?;
    Ok(red)
}

/// The eight triples of mutually adjacent neighbor steps (corners of the tetrahedral holes at a center).
fn tetrahedral_triples() -> Vec<[LatticeCoord<3>; 3]> {
    let nb = Fcc::neighbor_offsets();
    let adj = |a: &LatticeCoord<3>, b: &LatticeCoord<3>| (dist2(&Fcc::center(*a), &Fcc::center(*b)) - 4.0).abs() < 1e-9;
    let mut out = Vec::new();
    for x in 0..nb.len() {
        for y in x + 1..nb.len() {
            for z in y + 1..nb.len() {
                if adj(&nb[x], &nb[y]) && adj(&nb[y], &nb[z]) && adj(&nb[x], &nb[z]) {
                    out.push([nb[x], nb[y], nb[z]]);
                }
            }
        }
    }
    out
}

/// Reduction of a generic planar gap. A tetrahedral block of size `n` with a corner just below
/// the plane is cut by it; the corner piece moves along its altitude toward the opposite face,
/// opening honeycomb-layer gaps of width `distance / 3` on its three other faces.
pub fn reduce_plane_gap(packing: &DefectivePacking<3, Fcc>, n: usize, tol: &ToleranceConfig) -> Result<Reduction<3>> {
    if n < 2 {
        return Err(CoreError::SizeTooSmall { n, min: 2 });
    }
    let g = packing.defect;
    let normal = g.normal();
    if is_honeycomb_direction(&normal, 1e-9) {
        return Err(CoreError::UnsupportedGap("the plane is parallel to a honeycomb layer".into()));
    }
    let altitude = |s: &[LatticeCoord<3>; 3]| {
        (Fcc::center(s[0]) + Fcc::center(s[1]) + Fcc::center(s[2])).normalized().expect("nonzero")
    };
    // Prefer the corner whose three edges climb most steeply through the plane.
    let mut triples = tetrahedral_triples();
    let steepness = |s: &[LatticeCoord<3>; 3]| s.iter().map(|e| Fcc::center(*e).dot(&normal)).fold(f64::INFINITY, f64::min);
    triples.sort_by(|a, b| steepness(b).partial_cmp(&steepness(a)).expect("finite"));
    let anchors = anchors_below(packing, 0.5, 2.5, 2.0 * n as f64 + 8.0)?;
    for &vertex in &anchors {
        for steps in &triples {
            let block = corner_simplex(vertex, *steps, n);
            let Some(moved) = corner_piece(packing, &block, vertex) else { continue };
            let dir = altitude(steps);
            let t = max_translation(packing, &moved, dir, g.width()) * SHRINK;
            if !(t > 0.0) {
                continue;
            }
            let region = moved_region(packing, &moved, dir * t)?;
            let red = Reduction { block, moved, direction: dir, distance: t, width: t / 3.0, region };
            verify(packing, &red, tol)?;
            return Ok(red);
        }
    }
    Err(CoreError::NoAdmissibleBlock(format!("no size-{n} tetrahedron near the plane is cut cleanly")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::cubic_direction;
    use crate::lattice::GapDefect;

    #[test]
    fn eight_tetrahedral_holes() {
        let t = tetrahedral_triples();
        assert_eq!(t.len(), 8);
    }

    #[test]
    fn cubic_round_trip() {
        let u = [0.3, -0.5, 0.8];
        let back = to_cubic(cubic_direction(u));
        for k in 0..3 {
            assert!((back[k] - u[k]).abs() < 1e-15);
        }
    }

    #[test]
    fn line_through_center_rejected() {
        let p = DefectivePacking::<2, Honeycomb>::new(GapDefect::from_direction(Point([-0.3, 1.0]), 0.0, 0.4).unwrap());
        assert!(matches!(
            reduce_line_gap(&p, 5, &ToleranceConfig::default()),
            Err(CoreError::NoAdmissibleBlock(_))
        ));
    }
}
