//! End-to-end witness construction: plan, apply nested schedules in one patch, insert.

use std::fmt::Write as _;

use crate::blocks::{
    cross_gable_apex, cross_gable_family_at, pyramid_count, simplex_count, trapezoid_family_at, PlaneFrame, SpaceFrame,
};
use crate::error::{CoreError, Result};
use crate::geom::{Fcc, Honeycomb, Lattice, LatticeCoord, Point, ToleranceConfig, SQRT3};
use crate::lattice::{DefectivePacking, Region};
use crate::store::PackingPatch;
use crate::witness::Witness;

use super::plan::{plan_iterations, IterationPlan, FINAL_SIZE};
use super::{apply_schedule, family_region, optimize_widening_2d, optimize_widening_3d, WidenSchedule};

/// Upper bound on the number of centers a chained construction may hold in memory.
pub const MAX_CHAIN_CENTERS: usize = 1_000_000;

/// Family size used when optimizing the planar increment; the increment does not depend on it.
const PLANE_OPT_SIZE: usize = 6;
/// Family size used when optimizing the spatial increment.
const SPACE_OPT_SIZE: usize = 3;
/// Planning stops with a resource error after this many iterations.
const MAX_PLANNED: usize = 1000;

const TARGET: f64 = 2.0;

fn witness_from_patch<const D: usize, L: Lattice<D>>(patch: &PackingPatch<D, L>, provenance: String) -> Witness<D, L> {
    let edits = patch.edits();
    Witness {
        base: *patch.packing(),
        region: *patch.region(),
        removals: edits.removals,
        moves: edits.moves,
        insertions: edits.insertions,
        provenance,
    }
}

fn plan_with<const D: usize>(
    d0: f64,
    max_iterations: usize,
    why: &str,
    mut optimize: impl FnMut(f64) -> Result<WidenSchedule<D>>,
) -> Result<(IterationPlan, Vec<WidenSchedule<D>>)> {
    let mut schedules = Vec::new();
    let plan = plan_iterations(d0, TARGET, |d| {
        if schedules.len() >= max_iterations {
            return Err(CoreError::ResourceLimit(format!(
                "more than {max_iterations} iterations needed from width {d0}{why}"
            )));
        }
        let s = optimize(d)?;
        let delta = s.delta;
        schedules.push(s);
        Ok(delta)
    })?;
    Ok((plan, schedules))
}

fn log_plan(out: &mut String, plan: &IterationPlan) {
    let _ = writeln!(out, "iterations: {}", plan.k);
    let _ = writeln!(out, "widths: {:?}", plan.widths);
    let _ = writeln!(out, "sizes: {:?}", plan.sizes);
}

fn check_resources(needed: usize, plan: &IterationPlan) -> Result<()> {
    if needed > MAX_CHAIN_CENTERS {
        let outer = plan.sizes.first().copied().unwrap_or(0);
        let size = if outer == usize::MAX {
            // Sizes grow by a factor of three per iteration.
            format!("about 10^{:.0}", (FINAL_SIZE as f64).log10() + plan.k as f64 * 3f64.log10())
        } else {
            outer.to_string()
        };
        return Err(CoreError::ResourceLimit(format!(
            "{} iterations from width {} need an outermost family of size {size}; the limit is {} centers",
            plan.k, plan.d0, MAX_CHAIN_CENTERS
        )));
    }
    Ok(())
}

/// Packing patches that can locate their largest empty ball.
pub trait EmptyBall<const D: usize> {
    fn largest_empty(&self, search: &Region<D>) -> Result<(Point<D>, f64)>;
}

impl<L: Lattice<2>> EmptyBall<2> for PackingPatch<2, L> {
    fn largest_empty(&self, search: &Region<2>) -> Result<(Point<2>, f64)> {
        self.largest_empty_ball(search)
    }
}

impl<L: Lattice<3>> EmptyBall<3> for PackingPatch<3, L> {
    fn largest_empty(&self, search: &Region<3>) -> Result<(Point<3>, f64)> {
        self.largest_empty_ball(search)
    }
}

/// Witness with a single insertion and no other edits, for a gap of any direction that already
/// has room for a sphere next to the point of the gap's mid-plane closest to the origin.
pub fn direct_insertion<const D: usize, L: Lattice<D>>(
    packing: &DefectivePacking<D, L>,
    tol: &ToleranceConfig,
) -> Result<Witness<D, L>>
where
    PackingPatch<D, L>: EmptyBall<D>,
{
    tol.validate()?;
    let g = &packing.defect;
    let foot = g.normal() * (g.offset() + 0.5 * g.width());
    let mut patch = PackingPatch::from_packing(*packing, Region::cube(foot, 6.0)?, *tol);
    let (p, r) = patch.largest_empty(&Region::cube(foot, 2.0)?)?;
    let required = 2.0 - tol.eps_valid / 4.0;
    if r < required {
        return Err(CoreError::CannotReachTarget(format!(
            "largest empty ball near the gap has radius {r}; a direct insertion needs 2"
        )));
    }
    patch.insert_center(p)?;
    if !patch.is_valid_packing().valid {
        return Err(CoreError::Infeasible("direct insertion overlaps".into()));
    }
    Ok(witness_from_patch(&patch, format!("direct insertion at {:?}, radius {r}\n", p.0)))
}

/// Witness that a honeycomb packing with a lattice-line gap is not completely saturated:
/// widen the gap to 2 by nested rearrangements, then insert one circle.
pub fn build_witness_2d(packing: &DefectivePacking<2, Honeycomb>, tol: &ToleranceConfig) -> Result<Witness<2, Honeycomb>> {
    tol.validate()?;
    let d0 = packing.defect.width();
    let frame = PlaneFrame::for_gap(&packing.defect)?;
    let (plan, schedules) =
        plan_with(d0, MAX_PLANNED, "", |d| optimize_widening_2d(&packing.with_width(d)?, PLANE_OPT_SIZE, tol))?;
    let mut log = String::new();
    log_plan(&mut log, &plan);

    let outer = plan.sizes.first().copied().unwrap_or(FINAL_SIZE);
    let needed = outer.saturating_mul(outer).saturating_mul(6).saturating_add(outer).saturating_mul(2);
    check_resources(needed, &plan)?;

    let center = frame.default_center(outer);
    let j0 = frame.first_row;
    let region = if plan.k == 0 {
        let mid = frame.to_world(Point([center as f64, SQRT3 * (j0 as f64 - 0.5)])) + packing.defect.shift_vector() * 0.5;
        Region::cube(mid, 4.0)?
    } else {
        family_region(packing, &trapezoid_family_at(outer, packing.defect, center)?, 2.0 * TARGET + 2.5)?
    };
    let mut patch = PackingPatch::from_packing(*packing, region, *tol);
    for (t, (&size, planned)) in plan.sizes.iter().zip(&schedules).enumerate() {
        let family = trapezoid_family_at(size, packing.defect, center)?;
        let schedule = planned.with_family(family, None)?;
        apply_schedule(&mut patch, &schedule, true)?;
        let _ = writeln!(log, "iteration {t}: size {size} delta {}", schedule.delta);
    }

    // The widest point of the final gap sits under the middle of the innermost middle block.
    let w = plan.final_width();
    let mid = frame.to_world(Point([center as f64, SQRT3 * (j0 as f64 - 0.5)])) + packing.defect.normal() * (w * 0.5);
    let search = Region::cube(mid, 1.0)?;
    let (p, r) = patch.largest_empty_ball(&search)?;
    let required = if plan.k == 0 { 2.0 - tol.eps_valid / 4.0 } else { 2.0 + tol.eps_cert };
    if r < required {
        return Err(CoreError::CannotReachTarget(format!("largest empty circle has radius {r}, need {required}")));
    }
    patch.insert_center(p)?;
    let report = patch.is_valid_packing();
    if !report.valid {
        return Err(CoreError::Infeasible(format!("insertion leaves {} overlaps", report.violations.len())));
    }
    let _ = writeln!(log, "insertion: {:?} radius {r}", p.0);
    Ok(witness_from_patch(&patch, log))
}

/// One spatial widening iteration recorded as a witness fragment (moves and one removal).
pub fn build_witness_3d_step(packing: &DefectivePacking<3, Fcc>, n: usize, tol: &ToleranceConfig) -> Result<Witness<3, Fcc>> {
    let schedule = optimize_widening_3d(packing, n, tol)?;
    let d = packing.defect.width();
    let region = family_region(packing, &schedule.family, 2.0 * d + 2.5)?;
    let mut patch = PackingPatch::from_packing(*packing, region, *tol);
    apply_schedule(&mut patch, &schedule, true)?;
    let log = format!("single iteration: size {n} width {d} delta {}\n", schedule.delta);
    Ok(witness_from_patch(&patch, log))
}

fn space_family_centers(n: usize) -> usize {
    if n > 100_000 {
        return usize::MAX;
    }
    let m = n.saturating_sub(1);
    (9 * pyramid_count(n) + 12 * simplex_count(m) + 4 * pyramid_count(m)).saturating_mul(2)
}

/// Side length of the innermost middle block needed to insert `count` spheres with a margin of
/// two sites on each side.
fn space_final_size(count: usize) -> usize {
    let side = (count as f64).sqrt().ceil() as usize;
    (side + 4).max(FINAL_SIZE)
}

/// Nested spatial family sizes for `k` iterations, outermost first.
fn space_sizes(k: usize) -> Vec<usize> {
    let mut sizes = vec![0; k];
    let mut n = space_final_size(k + 1);
    for t in (0..k).rev() {
        sizes[t] = n;
        n = n.saturating_mul(3).saturating_add(6);
    }
    sizes
}

fn space_outer_size(k: usize) -> usize {
    space_sizes(k).first().copied().unwrap_or(0)
}

/// Complete spatial witness: widen the gap to 2 through nested iterations (one removal each),
/// then fill part of the final void with at least `k + 1` spheres.
pub fn build_witness_3d(packing: &DefectivePacking<3, Fcc>, tol: &ToleranceConfig) -> Result<Witness<3, Fcc>> {
    tol.validate()?;
    let d0 = packing.defect.width();
    let frame = SpaceFrame::for_gap(&packing.defect)?;
    // Families grow threefold per iteration, so the center cap bounds the useful iteration count.
    let max_k = (1..MAX_PLANNED)
        .find(|&k| space_family_centers(space_outer_size(k)) > MAX_CHAIN_CENTERS)
        .map_or(MAX_PLANNED, |k| k - 1);
    let why = format!("; {} nested families already exceed {MAX_CHAIN_CENTERS} centers", max_k + 1);
    let (plan, schedules) =
        plan_with(d0, max_k, &why, |d| optimize_widening_3d(&packing.with_width(d)?, SPACE_OPT_SIZE, tol))?;
    let mut log = String::new();
    let inserts = plan.k + 1;
    let sizes = space_sizes(plan.k);
    log_plan(&mut log, &IterationPlan { sizes: sizes.clone(), ..plan.clone() });
    let outer = sizes.first().copied().unwrap_or_else(|| space_final_size(inserts));
    check_resources(space_family_centers(outer), &IterationPlan { sizes: sizes.clone(), ..plan.clone() })?;

    // Corner of the middle cell for each nested family; all share one center.
    let mut corners = vec![(0i64, 0i64); plan.k];
    let mut corner = 0i64;
    for t in 0..plan.k {
        corners[t] = (corner, corner);
        if t + 1 < plan.k {
            corner += 3 + sizes[t + 1] as i64;
        }
    }
    let (ci, base_side) = match plan.k {
        0 => (0, 1usize),
        k => (corners[k - 1].0, sizes[k - 1]),
    };

    let k0 = frame.first_layer;
    let region = if plan.k == 0 {
        let c = frame.to_lattice(LatticeCoord([0, 0, k0]));
        Region::cube(Fcc::center(c), 4.0)?
    } else {
        let family = cross_gable_family_at(outer, packing.defect, 0, 0)?;
        family_region(packing, &family, 2.0 * TARGET + 2.5)?
    };
    let mut patch = PackingPatch::from_packing(*packing, region, *tol);
    for t in 0..plan.k {
        let family = cross_gable_family_at(sizes[t], packing.defect, corners[t].0, corners[t].1)?;
        let apex = cross_gable_apex(&family);
        let schedule = schedules[t].with_family(family, apex)?;
        apply_schedule(&mut patch, &schedule, true)?;
        let _ = writeln!(log, "iteration {t}: size {} delta {}", sizes[t], schedule.delta);
    }

    // New layer under the innermost middle block, lifted halfway into the spare width.
    let w = plan.final_width();
    let lift = packing.defect.normal() * ((w - TARGET) * 0.5);
    let margin = if plan.k == 0 { 0 } else { 2 };
    let span = base_side as i64 - 2 * margin;
    let mut placed = 0;
    'fill: for a in 0..span {
        for b in 0..span {
            if placed == inserts {
                break 'fill;
            }
            let c = frame.to_lattice(LatticeCoord([ci + margin + a, ci + margin + b, k0]));
            patch.insert_center(Fcc::center(c) + lift)?;
            placed += 1;
        }
    }
    if placed < inserts {
        return Err(CoreError::Infeasible(format!("room for {placed} insertions, need {inserts}")));
    }
    let report = patch.is_valid_packing();
    if !report.valid {
        return Err(CoreError::Infeasible(format!(
            "final layer leaves {} overlaps (worst squared distance {})",
            report.violations.len(),
            report.worst()
        )));
    }
    let _ = writeln!(log, "insertions: {placed}");
    Ok(witness_from_patch(&patch, log))
}
