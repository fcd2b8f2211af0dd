//! Blocks of lattice spheres, the two widening families, and block splits.
//!
//! Membership is always decided by integer index predicates. Each family is built in a
//! canonical frame (gap normal pointing up, first moving row or layer at index 0 above the
//! gap) and mapped to the actual gap orientation by a lattice automorphism.

use rustc_hash::FxHashSet;

use crate::error::{CoreError, Result};
use crate::geom::{Fcc, Honeycomb, Lattice, LatticeCoord, Point, SQRT2, SQRT3};
use crate::lattice::GapDefect;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BlockKind {
    TriUp,
    TriDown,
    SquarePyramid,
    Simplex,
    HalfCuboctahedron,
    Generic,
}

/// Whether a pyramid or triangle points away from (`Up`) or toward (`Down`) its base plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    Up,
    Down,
}

/// Which horizontal axis carries the bottom edge of an edge-down simplex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SimplexAxis {
    BottomAlongY,
    BottomAlongX,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Block<const D: usize> {
    members: Vec<LatticeCoord<D>>,
    pub kind: BlockKind,
    pub size: usize,
    pub anchor: LatticeCoord<D>,
    /// Extreme lattice vertices of the block's polytope.
    pub corners: Vec<LatticeCoord<D>>,
}

impl<const D: usize> Block<D> {
    pub fn new(
        members: impl IntoIterator<Item = LatticeCoord<D>>,
        kind: BlockKind,
        size: usize,
        anchor: LatticeCoord<D>,
        corners: Vec<LatticeCoord<D>>,
    ) -> Self {
        let mut members: Vec<_> = members.into_iter().collect();
        members.sort();
        members.dedup();
        Block { members, kind, size, anchor, corners }
    }

    pub fn generic(members: impl IntoIterator<Item = LatticeCoord<D>>) -> Self {
        let b = Self::new(members, BlockKind::Generic, 0, LatticeCoord([0; D]), Vec::new());
        let anchor = b.members.first().copied().unwrap_or(LatticeCoord([0; D]));
        Block { anchor, size: b.members.len(), ..b }
    }

    pub fn members(&self) -> &[LatticeCoord<D>] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, c: &LatticeCoord<D>) -> bool {
        self.members.binary_search(c).is_ok()
    }

    fn mapped(&self, f: impl Fn(LatticeCoord<D>) -> LatticeCoord<D>) -> Self {
        Block::new(
            self.members.iter().map(|&c| f(c)),
            self.kind,
            self.size,
            f(self.anchor),
            self.corners.iter().map(|&c| f(c)).collect(),
        )
    }
}

pub fn triangle_count(n: usize) -> usize {
    n * (n + 1) / 2
}

pub fn pyramid_count(n: usize) -> usize {
    n * (n + 1) * (2 * n + 1) / 6
}

pub fn simplex_count(n: usize) -> usize {
    n * (n + 1) * (n + 2) / 6
}

/// The six nearest-neighbor steps of the triangular lattice, counterclockwise from +x.
pub const HEX_STEPS: [[i64; 2]; 6] = [[1, 0], [0, 1], [-1, 1], [-1, 0], [0, -1], [1, -1]];

fn add2(c: LatticeCoord<2>, s: [i64; 2], t: i64) -> LatticeCoord<2> {
    LatticeCoord([c.0[0] + t * s[0], c.0[1] + t * s[1]])
}

/// Triangle with corner `vertex` spanned by steps `k` and `k+1` (mod 6).
/// Even `k` gives an upward triangle, odd `k` a downward one.
pub fn wedge_triangle(vertex: LatticeCoord<2>, k: usize, n: usize) -> Block<2> {
    let (s, t) = (HEX_STEPS[k % 6], HEX_STEPS[(k + 1) % 6]);
    let m = n as i64 - 1;
    let mut members = Vec::with_capacity(triangle_count(n));
    for a in 0..=m {
        for b in 0..=(m - a) {
            members.push(add2(add2(vertex, s, a), t, b));
        }
    }
    let kind = if k.is_multiple_of(2) { BlockKind::TriUp } else { BlockKind::TriDown };
    let corners = vec![vertex, add2(vertex, s, m), add2(vertex, t, m)];
    Block::new(members, kind, n, vertex, corners)
}

/// `Up`: anchor is the bottom-left corner. `Down`: anchor is the top-left corner.
pub fn triangular_block(anchor: LatticeCoord<2>, orientation: Orientation, n: usize) -> Block<2> {
    match orientation {
        Orientation::Up => wedge_triangle(anchor, 0, n),
        Orientation::Down => wedge_triangle(anchor, 5, n),
    }
}

/// `Up`: base layer at the anchor's layer with the anchor as its minimal corner.
/// `Down`: apex at the anchor, widening upward with the anchor as the maximal corner of each layer.
pub fn square_pyramid_block(anchor: LatticeCoord<3>, n: usize, orientation: Orientation) -> Block<3> {
    let [i0, j0, k0] = anchor.0;
    let m = n as i64 - 1;
    let mut members = Vec::with_capacity(pyramid_count(n));
    for l in 0..=m {
        // Up pyramids shrink by one per layer; inverted ones grow.
        let w = match orientation {
            Orientation::Up => m - l,
            Orientation::Down => l,
        };
        for a in 0..=w {
            for b in 0..=w {
                members.push(match orientation {
                    Orientation::Up => LatticeCoord([i0 + a, j0 + b, k0 + l]),
                    Orientation::Down => LatticeCoord([i0 - a, j0 - b, k0 + l]),
                });
            }
        }
    }
    let corners = match orientation {
        Orientation::Up => vec![
            anchor,
            LatticeCoord([i0 + m, j0, k0]),
            LatticeCoord([i0, j0 + m, k0]),
            LatticeCoord([i0 + m, j0 + m, k0]),
            LatticeCoord([i0, j0, k0 + m]),
        ],
        Orientation::Down => vec![
            anchor,
            LatticeCoord([i0 - m, j0 - m, k0 + m]),
            LatticeCoord([i0, j0 - m, k0 + m]),
            LatticeCoord([i0 - m, j0, k0 + m]),
            LatticeCoord([i0, j0, k0 + m]),
        ],
    };
    Block::new(members, BlockKind::SquarePyramid, n, anchor, corners)
}

/// Edge-down regular simplex: layer `l` holds `(l+1) x (n-l)` spheres. With `BottomAlongY`
/// the bottom edge runs along y from the anchor and the top edge along x ending at the anchor column.
pub fn simplex_block(anchor: LatticeCoord<3>, n: usize, axis: SimplexAxis) -> Block<3> {
    let [i0, j0, k0] = anchor.0;
    let m = n as i64 - 1;
    let mut members = Vec::with_capacity(simplex_count(n));
    for l in 0..=m {
        for a in 0..=l {
            for b in 0..=(m - l) {
                members.push(match axis {
                    SimplexAxis::BottomAlongY => LatticeCoord([i0 - a, j0 + b, k0 + l]),
                    SimplexAxis::BottomAlongX => LatticeCoord([i0 + b, j0 - a, k0 + l]),
                });
            }
        }
    }
    let corners = match axis {
        SimplexAxis::BottomAlongY => vec![
            anchor,
            LatticeCoord([i0, j0 + m, k0]),
            LatticeCoord([i0 - m, j0, k0 + m]),
            LatticeCoord([i0, j0, k0 + m]),
        ],
        SimplexAxis::BottomAlongX => vec![
            anchor,
            LatticeCoord([i0 + m, j0, k0]),
            LatticeCoord([i0, j0 - m, k0 + m]),
            LatticeCoord([i0, j0, k0 + m]),
        ],
    };
    Block::new(members, BlockKind::Simplex, n, anchor, corners)
}

/// Simplex with corner `vertex` and edges along three mutually adjacent neighbor steps.
pub fn corner_simplex(vertex: LatticeCoord<3>, steps: [LatticeCoord<3>; 3], n: usize) -> Block<3> {
    let m = n as i64 - 1;
    let at = |a: i64, b: i64, c: i64| {
        LatticeCoord(std::array::from_fn(|x| {
            vertex.0[x] + a * steps[0].0[x] + b * steps[1].0[x] + c * steps[2].0[x]
        }))
    };
    let mut members = Vec::with_capacity(simplex_count(n));
    for a in 0..=m {
        for b in 0..=(m - a) {
            for c in 0..=(m - a - b) {
                members.push(at(a, b, c));
            }
        }
    }
    let corners = vec![vertex, at(m, 0, 0), at(0, m, 0), at(0, 0, m)];
    Block::new(members, BlockKind::Simplex, n, vertex, corners)
}

/// Cubic-axis coordinates of an fcc coordinate: integers with even sum, nearest neighbors
/// at the twelve permutations of (±1, ±1, 0).
pub fn fcc_to_cubic(c: LatticeCoord<3>) -> [i64; 3] {
    let [i, j, k] = c.0;
    [i - j, i + j + k, k]
}

pub fn cubic_to_fcc(x: [i64; 3]) -> Option<LatticeCoord<3>> {
    let [a, b, c] = x;
    if (a + b + c).rem_euclid(2) != 0 {
        return None;
    }
    Some(LatticeCoord([(a + b - c) / 2, (b - c - a) / 2, c]))
}

/// Converts a cubic-axis direction to the Cartesian frame of `fcc_point`.
pub fn cubic_direction(u: [f64; 3]) -> Point<3> {
    Point([(u[0] + u[1]) / SQRT2, (u[1] - u[0]) / SQRT2, u[2]])
}

/// Half of the cuboctahedral cluster with `n` spheres per edge, centered at `anchor` and cut
/// through its center by the plane `sigma . x = 0` (cubic axes); the block keeps `sigma . x <= 0`.
/// Its flat face is a hexagon of a honeycomb layer; its three square faces are the cubic planes
/// `x_m = -sigma_m (n - 1)`.
pub fn half_cuboctahedron_block(anchor: LatticeCoord<3>, n: usize, sigma: [i64; 3]) -> Block<3> {
    let s = n as i64 - 1;
    let mut members = Vec::new();
    for a in -s..=s {
        for b in -s..=s {
            for c in -s..=s {
                if a.abs() + b.abs() + c.abs() > 2 * s || sigma[0] * a + sigma[1] * b + sigma[2] * c > 0 {
                    continue;
                }
                if let Some(rel) = cubic_to_fcc([a, b, c]) {
                    members.push(anchor + rel);
                }
            }
        }
    }
    let corner = |x: [i64; 3]| anchor + cubic_to_fcc(x).expect("even corner");
    let [p, q, r] = sigma;
    let corners = vec![
        corner([s * p, -s * q, 0]),
        corner([-s * p, s * q, 0]),
        corner([s * p, 0, -s * r]),
        corner([-s * p, 0, s * r]),
        corner([0, s * q, -s * r]),
        corner([0, -s * q, s * r]),
    ];
    Block::new(members, BlockKind::HalfCuboctahedron, n, anchor, corners)
}

/// Named blocks moved together by one widening schedule.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockFamily<const D: usize> {
    pub roles: Vec<(String, Block<D>)>,
    pub gap: GapDefect<D>,
}

impl<const D: usize> BlockFamily<D> {
    pub fn role(&self, name: &str) -> Option<&Block<D>> {
        self.roles.iter().find(|(r, _)| r == name).map(|(_, b)| b)
    }

    pub fn total_members(&self) -> usize {
        self.roles.iter().map(|(_, b)| b.len()).sum()
    }

    pub fn members(&self) -> impl Iterator<Item = &LatticeCoord<D>> {
        self.roles.iter().flat_map(|(_, b)| b.members().iter())
    }

    pub fn is_disjoint(&self) -> bool {
        let mut seen = FxHashSet::default();
        self.members().all(|c| seen.insert(*c))
    }

    /// Whether every member, at its unshifted lattice position, lies in the moving half-space.
    pub fn on_moving_side<L: Lattice<D>>(&self) -> bool {
        self.members().all(|&c| self.gap.in_upper(&L::center(c)))
    }
}

/// Placement of a family relative to a lattice-line gap in the plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PlaneFrame {
    /// Multiple of 60 degrees rotating the canonical frame onto the gap.
    pub rotation: usize,
    /// Canonical row index of the first row in the moving half-plane.
    pub first_row: i64,
}

fn rot60(c: LatticeCoord<2>) -> LatticeCoord<2> {
    let [i, j] = c.0;
    LatticeCoord([-j, i + j])
}

fn rotate_vec2(v: Point<2>, m: usize) -> Point<2> {
    let th = std::f64::consts::FRAC_PI_3 * m as f64;
    let (s, c) = th.sin_cos();
    Point([c * v.0[0] - s * v.0[1], s * v.0[0] + c * v.0[1]])
}

impl PlaneFrame {
    pub fn for_gap(gap: &GapDefect<2>) -> Result<Self> {
        let n = gap.normal();
        let rotation = (0..6)
            .find(|&m| (rotate_vec2(Point([0.0, 1.0]), m) - n).norm() < 1e-9)
            .ok_or_else(|| CoreError::UnsupportedGap(format!("normal {:?} is not normal to a lattice line", n.0)))?;
        let first_row = ((gap.offset() - crate::lattice::HALF_SPACE_SLACK) / SQRT3).ceil() as i64;
        Ok(PlaneFrame { rotation, first_row })
    }

    pub fn to_lattice(&self, c: LatticeCoord<2>) -> LatticeCoord<2> {
        (0..self.rotation).fold(c, |c, _| rot60(c))
    }

    pub fn to_world(&self, v: Point<2>) -> Point<2> {
        rotate_vec2(v, self.rotation)
    }

    /// Canonical column of the family center used by `trapezoid_family`.
    pub fn default_center(&self, n: usize) -> i64 {
        3 * n as i64 + self.first_row
    }
}

pub mod roles2 {
    pub const OUTER_LEFT: &str = "outer_left";
    pub const WEDGE_LEFT: &str = "wedge_left";
    pub const MIDDLE: &str = "middle";
    pub const WEDGE_RIGHT: &str = "wedge_right";
    pub const OUTER_RIGHT: &str = "outer_right";
}

/// Five blocks forming a trapezoid on the gap: Δn, ∇n, Δ(n-1), ∇n, Δn.
pub fn trapezoid_family(n: usize, gap: GapDefect<2>) -> Result<BlockFamily<2>> {
    let frame = PlaneFrame::for_gap(&gap)?;
    trapezoid_family_at(n, gap, frame.default_center(n))
}

/// As `trapezoid_family`, centered on canonical column `center`. The bottom row spans
/// columns `center - 3n ..= center + 3n`; `center - 3n` must match the parity of the first row.
pub fn trapezoid_family_at(n: usize, gap: GapDefect<2>, center: i64) -> Result<BlockFamily<2>> {
    if n < 3 {
        return Err(CoreError::SizeTooSmall { n, min: 3 });
    }
    let frame = PlaneFrame::for_gap(&gap)?;
    let n_i = n as i64;
    let x0 = center - 3 * n_i;
    let j0 = frame.first_row;
    if (x0 - j0).rem_euclid(2) != 0 {
        return Err(CoreError::Infeasible(format!("column {center} has the wrong parity for row {j0}")));
    }
    // Row r, slot t sits at canonical x = x0 + r + 2t.
    let at = |r: i64, t: i64| LatticeCoord([(x0 + 2 * t - j0) / 2, j0 + r]);
    let tri = |t0: i64, up: bool, size: usize| {
        let anchor = at(0, t0);
        let orientation = if up { Orientation::Up } else { Orientation::Down };
        let b = if up {
            triangular_block(anchor, orientation, size)
        } else {
            // Downward triangle resting on its apex at row 0: top row is row size-1.
            let top_left = at(size as i64 - 1, t0 - (size as i64 - 1));
            triangular_block(top_left, orientation, size)
        };
        b.mapped(|c| frame.to_lattice(c))
    };
    let roles = vec![
        (roles2::OUTER_LEFT.to_string(), tri(0, true, n)),
        (roles2::WEDGE_LEFT.to_string(), tri(n_i, false, n)),
        (roles2::MIDDLE.to_string(), tri(n_i + 1, true, n - 1)),
        (roles2::WEDGE_RIGHT.to_string(), tri(2 * n_i, false, n)),
        (roles2::OUTER_RIGHT.to_string(), tri(2 * n_i + 1, true, n)),
    ];
    let fam = BlockFamily { roles, gap };
    debug_assert!(fam.is_disjoint());
    if !fam.on_moving_side::<Honeycomb>() {
        return Err(CoreError::Infeasible("family straddles the gap".into()));
    }
    Ok(fam)
}

/// Default stage directions for the planar family, in world coordinates.
pub fn trapezoid_directions(frame: &PlaneFrame) -> [(&'static str, Point<2>); 5] {
    let h = SQRT3 / 2.0;
    [
        (roles2::OUTER_LEFT, frame.to_world(Point([0.0, -1.0]))),
        (roles2::OUTER_RIGHT, frame.to_world(Point([0.0, -1.0]))),
        (roles2::WEDGE_LEFT, frame.to_world(Point([-h, -0.5]))),
        (roles2::WEDGE_RIGHT, frame.to_world(Point([h, -0.5]))),
        (roles2::MIDDLE, frame.to_world(Point([0.0, 1.0]))),
    ]
}

/// Placement of a family relative to a square-layer gap in space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpaceFrame {
    /// Whether the canonical frame is turned half a revolution about the x axis.
    pub flipped: bool,
    /// Canonical layer index of the first layer in the moving half-space.
    pub first_layer: i64,
}

impl SpaceFrame {
    pub fn for_gap(gap: &GapDefect<3>) -> Result<Self> {
        let n = gap.normal();
        let flipped = if (n - Point([0.0, 0.0, 1.0])).norm() < 1e-9 {
            false
        } else if (n - Point([0.0, 0.0, -1.0])).norm() < 1e-9 {
            true
        } else {
            return Err(CoreError::UnsupportedGap(format!(
                "normal {:?} is not normal to a horizontal square layer",
                n.0
            )));
        };
        let first_layer = ((gap.offset() - crate::lattice::HALF_SPACE_SLACK) / SQRT2).ceil() as i64;
        Ok(SpaceFrame { flipped, first_layer })
    }

    pub fn to_lattice(&self, c: LatticeCoord<3>) -> LatticeCoord<3> {
        let [i, j, k] = c.0;
        if self.flipped {
            LatticeCoord([i + k, -j, -k])
        } else {
            c
        }
    }

    pub fn to_world(&self, v: Point<3>) -> Point<3> {
        if self.flipped {
            Point([v.0[0], -v.0[1], -v.0[2]])
        } else {
            v
        }
    }
}

/// Grid cells of the spatial family, named by compass position around the middle cell.
pub const CELLS: [(&str, i64, i64); 9] = [
    ("M", 0, 0),
    ("E", 1, 0),
    ("W", -1, 0),
    ("N", 0, 1),
    ("S", 0, -1),
    ("NE", 1, 1),
    ("NW", -1, 1),
    ("SE", 1, -1),
    ("SW", -1, -1),
];

fn cell_name(ci: i64, cj: i64) -> &'static str {
    CELLS.iter().find(|c| c.1 == ci && c.2 == cj).expect("cell in 3x3 grid").0
}

pub const MIDDLE3: &str = "pyramid_M";

/// How a role of the spatial family moves in the default schedule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RoleGroup3 {
    /// Moves straight toward the gap in the first stage.
    Ring,
    /// Moves down and outward in the second stage.
    Inner,
    /// The middle pyramid, lifted in the last stage.
    Middle,
}

/// Spatial family on a 3x3 grid of `n x n` cells: nine pyramids on the gap, twelve edge-down
/// simplices of size `n-1` between neighboring pyramids, and four inverted pyramids of size
/// `n-1` over the interior grid vertices. Cell `M` starts at canonical `(corner_i, corner_j)`.
pub fn cross_gable_family_at(n: usize, gap: GapDefect<3>, corner_i: i64, corner_j: i64) -> Result<BlockFamily<3>> {
    if n < 3 {
        return Err(CoreError::SizeTooSmall { n, min: 3 });
    }
    let frame = SpaceFrame::for_gap(&gap)?;
    let k0 = frame.first_layer;
    let n_i = n as i64;
    let origin = |ci: i64, cj: i64| (corner_i + ci * n_i, corner_j + cj * n_i);
    let mut roles: Vec<(String, Block<3>)> = Vec::new();
    for &(name, ci, cj) in &CELLS {
        let (i, j) = origin(ci, cj);
        roles.push((format!("pyramid_{name}"), square_pyramid_block(LatticeCoord([i, j, k0]), n, Orientation::Up)));
    }
    for ci in -1..=0 {
        for cj in -1..=1 {
            let (i, j) = origin(ci + 1, cj);
            let b = simplex_block(LatticeCoord([i - 1, j, k0 + 1]), n - 1, SimplexAxis::BottomAlongY);
            roles.push((format!("wedge_{}_{}", cell_name(ci, cj), cell_name(ci + 1, cj)), b));
        }
    }
    for ci in -1..=1 {
        for cj in -1..=0 {
            let (i, j) = origin(ci, cj + 1);
            let b = simplex_block(LatticeCoord([i, j - 1, k0 + 1]), n - 1, SimplexAxis::BottomAlongX);
            roles.push((format!("wedge_{}_{}", cell_name(ci, cj), cell_name(ci, cj + 1)), b));
        }
    }
    for ci in -1..=0 {
        for cj in -1..=0 {
            let (i, j) = origin(ci + 1, cj + 1);
            let name = format!("{}{}", if cj == 0 { "N" } else { "S" }, if ci == 0 { "E" } else { "W" });
            let b = square_pyramid_block(LatticeCoord([i - 1, j - 1, k0 + 1]), n - 1, Orientation::Down);
            roles.push((format!("valley_{name}"), b));
        }
    }
    let roles = roles.into_iter().map(|(r, b)| (r, b.mapped(|c| frame.to_lattice(c)))).collect();
    let fam = BlockFamily { roles, gap };
    debug_assert!(fam.is_disjoint());
    if !fam.on_moving_side::<Fcc>() {
        return Err(CoreError::Infeasible("family straddles the gap".into()));
    }
    Ok(fam)
}

pub fn cross_gable_family(n: usize, gap: GapDefect<3>) -> Result<BlockFamily<3>> {
    cross_gable_family_at(n, gap, 0, 0)
}

/// Role classification and default direction for every role of the spatial family.
pub fn cross_gable_motion(role: &str, frame: &SpaceFrame) -> (RoleGroup3, Point<3>) {
    let down = Point([0.0, 0.0, -1.0]);
    let (group, v) = if role == MIDDLE3 {
        (RoleGroup3::Middle, Point([0.0, 0.0, 1.0]))
    } else if let Some(rest) = role.strip_prefix("wedge_M_").or_else(|| role.strip_suffix("_M").and_then(|r| r.strip_prefix("wedge_"))) {
        let (ci, cj) = CELLS.iter().find(|c| c.0 == rest).map(|c| (c.1, c.2)).expect("neighbor cell");
        let v = Point([SQRT2 * ci as f64, SQRT2 * cj as f64, -1.0]) * (1.0 / SQRT3);
        (RoleGroup3::Inner, v)
    } else if let Some(rest) = role.strip_prefix("valley_") {
        let sx = if rest.ends_with('E') { 1.0 } else { -1.0 };
        let sy = if rest.starts_with('N') { 1.0 } else { -1.0 };
        (RoleGroup3::Inner, Point([sx, sy, -SQRT2]) * 0.5)
    } else {
        (RoleGroup3::Ring, down)
    };
    (group, frame.to_world(v))
}

/// The apex of the middle pyramid, removed before the middle block is lifted.
pub fn cross_gable_apex(fam: &BlockFamily<3>) -> Option<LatticeCoord<3>> {
    fam.role(MIDDLE3).map(|b| b.corners[4])
}

fn honeycomb_class_normals() -> [Point<3>; 4] {
    [[1.0, 1.0, 1.0], [1.0, 1.0, -1.0], [1.0, -1.0, 1.0], [-1.0, 1.0, 1.0]]
        .map(|u| cubic_direction(u) * (1.0 / SQRT3))
}

/// Whether a unit normal is (within `tol`) perpendicular to a honeycomb layer of the fcc lattice.
pub fn is_honeycomb_direction(normal: &Point<3>, tol: f64) -> bool {
    honeycomb_class_normals().iter().any(|c| c.dot(normal).abs() >= 1.0 - tol)
}

fn split_by<const D: usize, L: Lattice<D>>(
    block: &Block<D>,
    normal: &Point<D>,
    offset: f64,
) -> Result<(Block<D>, Block<D>)> {
    let side = |c: &LatticeCoord<D>| L::center(*c).dot(normal) - offset;
    if let Some(c) = block.members().iter().find(|c| side(c).abs() < 1e-9) {
        return Err(CoreError::Split(format!("cut passes within 1e-9 of member {:?}", c.0)));
    }
    let positive = block.corners.iter().filter(|c| side(c) > 0.0).count();
    let negative = block.corners.len() - positive;
    let one_corner_positive = match (positive, negative) {
        (1, _) => true,
        (_, 1) => false,
        (0, _) | (_, 0) => return Err(CoreError::Split("cut misses the block".into())),
        _ => {
            return Err(CoreError::Split(format!(
                "cut leaves {positive} and {negative} corners, no side holds exactly one"
            )))
        }
    };
    let (t1, t2): (Vec<_>, Vec<_>) =
        block.members().iter().partition(|c| (side(c) > 0.0) == one_corner_positive);
    Ok((Block::generic(t1), Block::generic(t2)))
}

/// Splits a triangular block by the line `<p, normal> = offset`. `T1` is the piece holding one corner.
pub fn split_block_by_line(block: &Block<2>, normal: Point<2>, offset: f64) -> Result<(Block<2>, Block<2>)> {
    if !matches!(block.kind, BlockKind::TriUp | BlockKind::TriDown) {
        return Err(CoreError::Split("line splits apply to triangular blocks".into()));
    }
    let n = normal.normalized().ok_or_else(|| CoreError::Split("zero normal".into()))?;
    split_by::<2, Honeycomb>(block, &n, offset / normal.norm())
}

/// Splits a simplex block by the plane `<p, normal> = offset`. `T1` holds exactly one vertex.
pub fn split_tetrahedron_by_plane(block: &Block<3>, normal: Point<3>, offset: f64) -> Result<(Block<3>, Block<3>)> {
    if block.kind != BlockKind::Simplex {
        return Err(CoreError::Split("plane splits apply to simplex blocks".into()));
    }
    let n = normal.normalized().ok_or_else(|| CoreError::Split("zero normal".into()))?;
    if is_honeycomb_direction(&n, 1e-9) {
        return Err(CoreError::Split("plane is parallel to a honeycomb layer".into()));
    }
    split_by::<3, Fcc>(block, &n, offset / normal.norm())
}
