//! Nested search for the widening increment of the two block families.

use crate::blocks::{
    cross_gable_apex, cross_gable_family, cross_gable_motion, trapezoid_directions, trapezoid_family, BlockFamily,
    PlaneFrame, RoleGroup3, SpaceFrame, roles2,
};
use crate::error::Result;
use crate::geom::{Fcc, Honeycomb, Lattice, LatticeCoord, ToleranceConfig};
use crate::lattice::DefectivePacking;
use crate::store::PackingPatch;

use super::probe::{RoleMotion, StagedProblem};
use super::{apply_schedule, family_region, MoveStage, RoleMove, WidenSchedule};

/// Factor applied to the optimal last distance before it is written into a schedule.
pub const SHRINK: f64 = 1.0 - 1e-9;

const GRID: usize = 20;

/// Raw optimum of the nested search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchOutcome {
    pub d1: f64,
    pub d2: f64,
    /// Largest feasible last distance at `(d1, d2)`, before shrinking.
    pub d3: f64,
}

/// Golden-section maximization on `[lo, hi]`; returns the best point seen.
fn golden_max(mut lo: f64, mut hi: f64, tol: f64, mut f: impl FnMut(f64) -> f64) -> (f64, f64) {
    const R: f64 = 0.618_033_988_749_894_8;
    let mut best = (lo, f64::NEG_INFINITY);
    let track = |x: f64, v: f64, best: &mut (f64, f64)| {
        if v > best.1 {
            *best = (x, v);
        }
    };
    let mut x1 = hi - R * (hi - lo);
    let mut x2 = lo + R * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    track(x1, f1, &mut best);
    track(x2, f2, &mut best);
    while hi - lo > tol {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - R * (hi - lo);
            f1 = f(x1);
            track(x1, f1, &mut best);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + R * (hi - lo);
            f2 = f(x2);
            track(x2, f2, &mut best);
        }
    }
    best
}

/// Grid seed followed by golden refinement around the best grid point.
fn seeded_max(grid: &[f64], tol: f64, mut f: impl FnMut(f64) -> f64) -> (f64, f64) {
    let values: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    let (i, _) = values
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    let mut best = (grid[i], values[i]);
    let lo = grid[i.saturating_sub(1)];
    let hi = grid[(i + 1).min(grid.len() - 1)];
    if hi > lo {
        let refined = golden_max(lo, hi, tol, f);
        if refined.1 > best.1 {
            best = refined;
        }
    }
    best
}

fn linear_grid(hi: f64) -> Vec<f64> {
    (0..GRID).map(|k| hi * k as f64 / (GRID - 1) as f64).collect()
}

/// Zero followed by geometrically spaced points up to `hi`; small second distances matter.
fn log_grid(hi: f64) -> Vec<f64> {
    if hi <= 0.0 {
        return vec![0.0; GRID];
    }
    let lo = hi * 1e-6;
    let steps = GRID - 2;
    let mut g = vec![0.0];
    g.extend((0..=steps).map(|k| lo * (hi / lo).powf(k as f64 / steps as f64)));
    g
}

/// Maximizes the last-slot distance over the first two; each slot distance is bounded by `caps`.
pub fn search<const D: usize>(problem: &StagedProblem<D>, caps: [f64; 3], eps_opt: f64) -> SearchOutcome {
    let inner = |d1: f64| -> (f64, f64) {
        if !problem.stage_ok(1, &[d1, 0.0, 0.0]) {
            return (0.0, -1.0);
        }
        seeded_max(&log_grid(caps[1]), eps_opt, |d2| problem.evaluate(d1, d2, caps[2]).unwrap_or(-1.0))
    };
    let (d1, _) = seeded_max(&linear_grid(caps[0]), eps_opt, |d1| inner(d1).1);
    let (d2, d3) = inner(d1);
    if d3 < 0.0 {
        return SearchOutcome { d1: 0.0, d2: 0.0, d3: 0.0 };
    }
    SearchOutcome { d1, d2, d3 }
}

/// Optimizes the stage distances of `family`, verifies the schedule against the validity
/// oracle at every stage boundary, and returns it with the raw search result.
pub fn optimize_family<const D: usize, L: Lattice<D>>(
    packing: &DefectivePacking<D, L>,
    family: &BlockFamily<D>,
    motions: &[RoleMotion<D>],
    removed: Option<LatticeCoord<D>>,
    tol: &ToleranceConfig,
) -> Result<(WidenSchedule<D>, SearchOutcome)> {
    tol.validate()?;
    let d = packing.defect.width();
    let caps = [d, 2.0 * d, 2.0 * d];
    let problem = StagedProblem::new(packing, family, motions.to_vec(), removed, caps);
    let found = search(&problem, caps, tol.eps_opt);
    let delta = if found.d3 < tol.eps_opt { 0.0 } else { found.d3 * SHRINK };
    let distances = [found.d1, found.d2, delta];
    let mut stages = Vec::new();
    for slot in 1..=3 {
        let mut moves = Vec::new();
        for ((role, _), m) in family.roles.iter().zip(motions) {
            if m.slot == slot {
                moves.push(RoleMove::new(role.clone(), m.direction, distances[slot - 1])?);
            }
        }
        stages.push(MoveStage { index: slot, moves });
    }
    let schedule = WidenSchedule { family: family.clone(), stages, removed, delta };
    let region = family_region(packing, family, 2.0 * d + 2.5)?;
    let mut patch = PackingPatch::from_packing(*packing, region, *tol);
    apply_schedule(&mut patch, &schedule, true)?;
    Ok((schedule, found))
}

/// Stage slots and directions of the planar family, in role order.
pub fn trapezoid_motions(family: &BlockFamily<2>, frame: &PlaneFrame) -> Vec<RoleMotion<2>> {
    let dirs = trapezoid_directions(frame);
    family
        .roles
        .iter()
        .map(|(role, _)| {
            let direction = dirs.iter().find(|(r, _)| r == role).expect("planar role").1;
            let slot = match role.as_str() {
                roles2::OUTER_LEFT | roles2::OUTER_RIGHT => 1,
                roles2::WEDGE_LEFT | roles2::WEDGE_RIGHT => 2,
                _ => 3,
            };
            RoleMotion { slot, direction }
        })
        .collect()
}

/// Stage slots and directions of the spatial family, in role order.
pub fn cross_gable_motions(family: &BlockFamily<3>, frame: &SpaceFrame) -> Vec<RoleMotion<3>> {
    family
        .roles
        .iter()
        .map(|(role, _)| {
            let (group, direction) = cross_gable_motion(role, frame);
            let slot = match group {
                RoleGroup3::Ring => 1,
                RoleGroup3::Inner => 2,
                RoleGroup3::Middle => 3,
            };
            RoleMotion { slot, direction }
        })
        .collect()
}

/// Best three-stage widening of the planar family of size `n` on `packing`.
pub fn optimize_widening_2d(
    packing: &DefectivePacking<2, Honeycomb>,
    n: usize,
    tol: &ToleranceConfig,
) -> Result<WidenSchedule<2>> {
    let family = trapezoid_family(n, packing.defect)?;
    let frame = PlaneFrame::for_gap(&packing.defect)?;
    let motions = trapezoid_motions(&family, &frame);
    Ok(optimize_family(packing, &family, &motions, None, tol)?.0)
}

/// Best three-stage widening of the spatial family of size `n`; the middle apex is removed.
pub fn optimize_widening_3d(packing: &DefectivePacking<3, Fcc>, n: usize, tol: &ToleranceConfig) -> Result<WidenSchedule<3>> {
    let family = cross_gable_family(n, packing.defect)?;
    let frame = SpaceFrame::for_gap(&packing.defect)?;
    let motions = cross_gable_motions(&family, &frame);
    let apex = cross_gable_apex(&family);
    Ok(optimize_family(packing, &family, &motions, apex, tol)?.0)
}
