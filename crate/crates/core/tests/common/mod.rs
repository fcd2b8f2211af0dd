//! Independent oracles: closed-form lattice positions and brute-force pair checks, written
//! without the library's geometry code.
#![allow(dead_code)]

use rand::Rng;

pub const EPS_VALID: f64 = 1e-9;

/// Centers of the honeycomb lattice with the upper closed half-space shifted by `d * n`,
/// restricted to the box `[-half, half]^2`.
pub fn honeycomb_window(n: [f64; 2], offset: f64, d: f64, half: f64) -> Vec<[f64; 2]> {
    let s3 = 3f64.sqrt();
    let r = (half / s3).ceil() as i64 + 2 + (d / s3).ceil() as i64;
    let q = (half / 2.0).ceil() as i64 * 2 + 2 * r + 2 + d.ceil() as i64;
    let mut out = Vec::new();
    for j in -r..=r {
        for i in -q..=q {
            let mut p = [(2 * i + j) as f64, s3 * j as f64];
            if p[0] * n[0] + p[1] * n[1] >= offset - 1e-12 {
                p = [p[0] + d * n[0], p[1] + d * n[1]];
            }
            if p.iter().all(|x| x.abs() <= half) {
                out.push(p);
            }
        }
    }
    out
}

/// Same for the fcc lattice.
pub fn fcc_window(n: [f64; 3], offset: f64, d: f64, half: f64) -> Vec<[f64; 3]> {
    let s2 = 2f64.sqrt();
    let rk = (half / s2).ceil() as i64 + 2 + (d / s2).ceil() as i64;
    let r = (half / 2.0).ceil() as i64 + rk + 2 + d.ceil() as i64;
    let mut out = Vec::new();
    for k in -rk..=rk {
        for j in -r..=r {
            for i in -r..=r {
                let mut p = [(2 * i + k) as f64, (2 * j + k) as f64, s2 * k as f64];
                if p[0] * n[0] + p[1] * n[1] + p[2] * n[2] >= offset - 1e-12 {
                    p = [p[0] + d * n[0], p[1] + d * n[1], p[2] + d * n[2]];
                }
                if p.iter().all(|x| x.abs() <= half) {
                    out.push(p);
                }
            }
        }
    }
    out
}

pub fn d2<const D: usize>(a: &[f64; D], b: &[f64; D]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Smallest pairwise squared distance (infinity for fewer than two points).
pub fn min_pair_dist2<const D: usize>(pts: &[[f64; D]]) -> f64 {
    let mut m = f64::INFINITY;
    for (k, a) in pts.iter().enumerate() {
        for b in &pts[k + 1..] {
            m = m.min(d2(a, b));
        }
    }
    m
}

pub fn oracle_valid<const D: usize>(pts: &[[f64; D]]) -> bool {
    min_pair_dist2(pts) >= 4.0 - EPS_VALID
}

pub fn random_unit<const D: usize>(rng: &mut impl Rng) -> [f64; D] {
    loop {
        let v: [f64; D] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 0.1 && n <= 1.0 {
            return v.map(|x| x / n);
        }
    }
}

use gapsat_core::rearrange::{apply_schedule, family_region, WidenSchedule};
use gapsat_core::{DefectivePacking, Lattice, PackingPatch, Point, ToleranceConfig, Witness};

/// Final configuration of a witness near its region, rebuilt directly from the edit lists.
pub fn final_points<const D: usize, L: Lattice<D>>(w: &Witness<D, L>) -> Vec<[f64; D]> {
    let outer = w.region.expanded(2.5);
    let mut pts: Vec<[f64; D]> = w
        .base
        .enumerate_centers(&outer)
        .into_iter()
        .filter(|(c, _)| !w.removals.contains(c) && !w.moves.iter().any(|(m, _)| m == c))
        .map(|(_, p)| p.0)
        .collect();
    pts.extend(w.moves.iter().map(|(_, p)| p.0));
    pts.extend(w.insertions.iter().map(|p| p.0));
    pts
}

/// Moves the point at `target` by `step` toward its nearest other point in `pts`.
pub fn toward_nearest<const D: usize>(target: Point<D>, pts: &[[f64; D]], step: f64) -> Point<D> {
    let nearest = pts
        .iter()
        .filter(|q| d2(q, &target.0) > 1e-18)
        .min_by(|a, b| d2(a, &target.0).total_cmp(&d2(b, &target.0)))
        .expect("other points exist");
    let dist = d2(nearest, &target.0).sqrt();
    Point(std::array::from_fn(|k| target.0[k] + step * (nearest[k] - target.0[k]) / dist))
}

/// Positions of everything in the patch plus its frozen background, for brute-force checks.
pub fn all_points<const D: usize, L: Lattice<D>>(patch: &PackingPatch<D, L>) -> Vec<[f64; D]> {
    patch.positions().map(|p| p.0).chain(patch.background().iter().map(|(_, p)| p.0)).collect()
}

/// Applies the schedule one stage at a time and checks every boundary with the oracle.
pub fn stagewise_valid<const D: usize, L: Lattice<D>>(packing: &DefectivePacking<D, L>, s: &WidenSchedule<D>) -> bool {
    let region = family_region(packing, &s.family, 2.0 * packing.defect.width() + 3.0).unwrap();
    for upto in 1..=s.stages.len() {
        let mut patch = PackingPatch::from_packing(*packing, region, ToleranceConfig::default());
        let partial = WidenSchedule {
            family: s.family.clone(),
            stages: s.stages[..upto].to_vec(),
            removed: if upto == s.stages.len() { s.removed } else { None },
            delta: s.delta,
        };
        if apply_schedule(&mut patch, &partial, false).is_err() || !oracle_valid(&all_points(&patch)) {
            return false;
        }
    }
    true
}
