//! SVG (planar) and Wavefront OBJ (spatial) pictures of witnesses and packing windows.
//!
//! Lengths are scaled so that one sphere diameter spans 100 units.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::format::PatchFile;
use crate::geom::{Lattice, Point};
use crate::lattice::{GapDefect, Region};
use crate::witness::Witness;

/// Drawing units per unit length (radius 1 maps to 50).
pub const UNITS_PER_LENGTH: f64 = 50.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    Background,
    Moved,
    Inserted,
    Removed,
}

impl Role {
    pub const ALL: [Role; 4] = [Role::Background, Role::Moved, Role::Inserted, Role::Removed];

    pub fn name(self) -> &'static str {
        match self {
            Role::Background => "background",
            Role::Moved => "moved",
            Role::Inserted => "inserted",
            Role::Removed => "removed",
        }
    }

    fn hex(self) -> &'static str {
        match self {
            Role::Background => "#b8c4d6",
            Role::Moved => "#e69f00",
            Role::Inserted => "#009e73",
            Role::Removed => "#d55e00",
        }
    }

    fn rgb(self) -> [f64; 3] {
        match self {
            Role::Background => [0.72, 0.77, 0.84],
            Role::Moved => [0.90, 0.62, 0.0],
            Role::Inserted => [0.0, 0.62, 0.45],
            Role::Removed => [0.84, 0.37, 0.0],
        }
    }
}

/// Unit spheres tagged by role, plus the gap they sit around.
#[derive(Clone, Debug)]
pub struct Scene<const D: usize> {
    pub spheres: Vec<(Point<D>, Role)>,
    pub gap: GapDefect<D>,
    pub bounds: Region<D>,
}

impl<const D: usize> Scene<D> {
    /// Final configuration of a witness over its region plus `margin`; removed spheres appear
    /// at their original positions.
    pub fn from_witness<L: Lattice<D>>(w: &Witness<D, L>, margin: f64) -> Self {
        let bounds = w.region.expanded(margin);
        let removed: BTreeSet<_> = w.removals.iter().copied().collect();
        let moved: BTreeSet<_> = w.moves.iter().map(|(c, _)| *c).collect();
        let mut spheres: Vec<(Point<D>, Role)> = w
            .base
            .enumerate_centers(&bounds)
            .into_iter()
            .filter(|(c, _)| !removed.contains(c) && !moved.contains(c))
            .map(|(_, p)| (p, Role::Background))
            .collect();
        spheres.extend(w.removals.iter().map(|&c| (w.base.position(c), Role::Removed)));
        spheres.extend(w.moves.iter().map(|&(_, p)| (p, Role::Moved)));
        spheres.extend(w.insertions.iter().map(|&p| (p, Role::Inserted)));
        Scene { spheres, gap: w.base.defect, bounds }
    }

    /// Centers with a lattice identity away from their home position count as moved; centers
    /// without one count as inserted.
    pub fn from_patch<L: Lattice<D>>(p: &PatchFile<D, L>) -> Self {
        let spheres = p
            .centers
            .iter()
            .map(|&(c, x)| {
                let role = match c {
                    Some(c) if p.packing.position(c) == x => Role::Background,
                    Some(_) => Role::Moved,
                    None => Role::Inserted,
                };
                (x, role)
            })
            .collect();
        Scene { spheres, gap: p.packing.defect, bounds: p.region }
    }

    pub fn count(&self, role: Role) -> usize {
        self.spheres.iter().filter(|(_, r)| *r == role).count()
    }
}

/// Clips the line `<p, n> = c` to the rectangle `[lo, hi]`.
fn clip_line(n: Point<2>, c: f64, lo: Point<2>, hi: Point<2>) -> Option<(Point<2>, Point<2>)> {
    let mut pts: Vec<Point<2>> = Vec::new();
    let [nx, ny] = n.0;
    for x in [lo.0[0], hi.0[0]] {
        if ny.abs() > 1e-15 {
            let y = (c - nx * x) / ny;
            if y >= lo.0[1] && y <= hi.0[1] {
                pts.push(Point([x, y]));
            }
        }
    }
    for y in [lo.0[1], hi.0[1]] {
        if nx.abs() > 1e-15 {
            let x = (c - ny * y) / nx;
            if x >= lo.0[0] && x <= hi.0[0] {
                pts.push(Point([x, y]));
            }
        }
    }
    let a = *pts.first()?;
    let b = pts.iter().copied().max_by(|p, q| (*p - a).norm().total_cmp(&(*q - a).norm()))?;
    ((b - a).norm() > 0.0).then_some((a, b))
}

/// Planar scene as SVG; `y` grows upwards in scene coordinates.
pub fn render_svg(scene: &Scene<2>) -> String {
    let s = UNITS_PER_LENGTH;
    let lo = scene.bounds.lo;
    let hi = scene.bounds.hi;
    let (w, h) = ((hi.0[0] - lo.0[0] + 2.0) * s, (hi.0[1] - lo.0[1] + 2.0) * s);
    let tx = |p: Point<2>| ((p.0[0] - lo.0[0] + 1.0) * s, (hi.0[1] - p.0[1] + 1.0) * s);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {w:.3} {h:.3}" width="{w:.0}" height="{h:.0}">"#
    );
    let _ = writeln!(out, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
    let n = scene.gap.normal();
    let frame_lo = lo - Point([1.0, 1.0]);
    let frame_hi = hi + Point([1.0, 1.0]);
    for (label, c) in [("gap-lower", scene.gap.offset()), ("gap-upper", scene.gap.offset() + scene.gap.width())] {
        if let Some((a, b)) = clip_line(n, c, frame_lo, frame_hi) {
            let ((x1, y1), (x2, y2)) = (tx(a), tx(b));
            let _ = writeln!(
                out,
                r##"<line class="{label}" x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke="#555555" stroke-width="2" stroke-dasharray="8 6"/>"##
            );
        }
    }
    for role in Role::ALL {
        let _ = writeln!(out, r#"<g class="{}">"#, role.name());
        for (p, r) in scene.spheres.iter().filter(|(_, r)| *r == role) {
            let (x, y) = tx(*p);
            let style = if *r == Role::Removed {
                format!(r#"fill="none" stroke="{}" stroke-width="3" stroke-dasharray="6 4""#, r.hex())
            } else {
                format!(r##"fill="{}" fill-opacity="0.85" stroke="#333333" stroke-width="1""##, r.hex())
            };
            let _ = writeln!(out, r#"<circle cx="{x:.3}" cy="{y:.3}" r="{s:.3}" {style}/>"#);
        }
        let _ = writeln!(out, "</g>");
    }
    out.push_str("</svg>\n");
    out
}

/// Level-1 icosphere on the unit sphere: 42 vertices, 80 triangles (1-based faces).
pub fn icosphere() -> (Vec<[f64; 3]>, Vec<[usize; 3]>) {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut verts: Vec<[f64; 3]> = [
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ]
    .into_iter()
    .map(normalize)
    .collect();
    let base: [[usize; 3]; 20] = [
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    let mut mids: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut mid = |a: usize, b: usize, verts: &mut Vec<[f64; 3]>| {
        let key = (a.min(b), a.max(b));
        *mids.entry(key).or_insert_with(|| {
            let (p, q) = (verts[a], verts[b]);
            verts.push(normalize([(p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0, (p[2] + q[2]) / 2.0]));
            verts.len() - 1
        })
    };
    let mut faces = Vec::with_capacity(80);
    for [a, b, c] in base {
        let ab = mid(a, b, &mut verts);
        let bc = mid(b, c, &mut verts);
        let ca = mid(c, a, &mut verts);
        for f in [[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]] {
            faces.push(f.map(|i| i + 1));
        }
    }
    (verts, faces)
}

fn normalize(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    v.map(|x| x / n)
}

/// Spatial scene as OBJ text (one icosphere per center, grouped by role) and the matching MTL
/// text. `mtl_name` is the file name referenced by `mtllib`.
pub fn render_obj(scene: &Scene<3>, mtl_name: &str) -> (String, String) {
    let s = 2.0 * UNITS_PER_LENGTH;
    let (verts, faces) = icosphere();
    let mut obj = String::new();
    let _ = writeln!(obj, "mtllib {mtl_name}");
    let mut offset = 0;
    for role in Role::ALL {
        let members: Vec<_> = scene.spheres.iter().filter(|(_, r)| *r == role).collect();
        if members.is_empty() {
            continue;
        }
        let _ = writeln!(obj, "g {}", role.name());
        let _ = writeln!(obj, "usemtl {}", role.name());
        for (p, _) in members {
            for v in &verts {
                let q = [0, 1, 2].map(|k| (p.0[k] + v[k]) * s / 2.0);
                let _ = writeln!(obj, "v {} {} {}", q[0], q[1], q[2]);
            }
            for f in &faces {
                let _ = writeln!(obj, "f {} {} {}", f[0] + offset, f[1] + offset, f[2] + offset);
            }
            offset += verts.len();
        }
    }
    let mut mtl = String::new();
    for role in Role::ALL {
        let [r, g, b] = role.rgb();
        let alpha = if role == Role::Removed { 0.3 } else { 1.0 };
        let _ = writeln!(mtl, "newmtl {}\nKd {r} {g} {b}\nKa 0 0 0\nd {alpha}\n", role.name());
    }
    (obj, mtl)
}
