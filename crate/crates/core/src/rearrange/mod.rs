//! Staged rigid-block moves, the widening optimizer, iteration planning, witness builders and
//! the gap reductions.

mod optimize;
mod pipeline;
mod plan;
mod probe;
mod reduce;

pub use optimize::{
    cross_gable_motions, optimize_family, optimize_widening_2d, optimize_widening_3d, search, trapezoid_motions, SearchOutcome,
    SHRINK,
};
pub use pipeline::{
    build_witness_2d, build_witness_3d, build_witness_3d_step, direct_insertion, EmptyBall, MAX_CHAIN_CENTERS,
};
pub use plan::{nested_sizes, plan_iterations, IterationPlan, FINAL_SIZE};
pub use probe::{RoleMotion, StagedProblem};
pub use reduce::{reduce_honeycomb_gap, reduce_honeycomb_gap_by, reduce_line_gap, reduce_plane_gap, Reduction};

use crate::blocks::BlockFamily;
use crate::error::{CoreError, Result};
use crate::geom::{Lattice, LatticeCoord, Point};
use crate::lattice::{DefectivePacking, Region};
use crate::store::{PackingPatch, ValidityReport};

/// One role translated rigidly by `distance` along the unit vector `direction`.
#[derive(Clone, Debug, PartialEq)]
pub struct RoleMove<const D: usize> {
    pub role: String,
    pub direction: Point<D>,
    pub distance: f64,
}

impl<const D: usize> RoleMove<D> {
    pub fn new(role: impl Into<String>, direction: Point<D>, distance: f64) -> Result<Self> {
        if (direction.norm() - 1.0).abs() > 1e-12 {
            return Err(CoreError::InvalidDefect(format!("direction {:?} is not a unit vector", direction.0)));
        }
        if !(distance >= 0.0) || !distance.is_finite() {
            return Err(CoreError::InvalidDefect(format!("distance {distance} must be finite and non-negative")));
        }
        Ok(RoleMove { role: role.into(), direction, distance })
    }
}

/// Moves executed together; validity is only required at stage boundaries.
#[derive(Clone, Debug, PartialEq)]
pub struct MoveStage<const D: usize> {
    pub index: usize,
    pub moves: Vec<RoleMove<D>>,
}

/// A complete widening step: stages applied in order to the blocks of `family`.
#[derive(Clone, Debug, PartialEq)]
pub struct WidenSchedule<const D: usize> {
    pub family: BlockFamily<D>,
    pub stages: Vec<MoveStage<D>>,
    /// Removed just before the last stage.
    pub removed: Option<LatticeCoord<D>>,
    pub delta: f64,
}

impl<const D: usize> WidenSchedule<D> {
    /// Distance of the named role in the first stage that moves it.
    pub fn distance_of(&self, role: &str) -> Option<f64> {
        self.stages.iter().flat_map(|s| &s.moves).find(|m| m.role == role).map(|m| m.distance)
    }

    /// The same stage distances applied to another family with the same role names.
    pub fn with_family(&self, family: BlockFamily<D>, removed: Option<LatticeCoord<D>>) -> Result<Self> {
        for m in self.stages.iter().flat_map(|s| &s.moves) {
            if family.role(&m.role).is_none() {
                return Err(CoreError::Infeasible(format!("family has no role '{}'", m.role)));
            }
        }
        Ok(WidenSchedule { family, stages: self.stages.clone(), removed, delta: self.delta })
    }
}

/// Smallest region containing every member of `family` (at its position in `packing`), grown by `margin`.
pub fn family_region<const D: usize, L: Lattice<D>>(
    packing: &DefectivePacking<D, L>,
    family: &BlockFamily<D>,
    margin: f64,
) -> Result<Region<D>> {
    Region::bounding(family.members().map(|&c| packing.position(c)))
        .map(|r| r.expanded(margin))
        .ok_or_else(|| CoreError::Infeasible("empty family".into()))
}

fn ids_for<const D: usize, L: Lattice<D>>(patch: &PackingPatch<D, L>, coords: &[LatticeCoord<D>]) -> Result<Vec<usize>> {
    coords
        .iter()
        .map(|c| patch.id_of(c).ok_or_else(|| CoreError::MissingMember(c.0.to_vec())))
        .collect()
}

/// Executes the stages of `schedule` on `patch`. With `check_stages`, validity is verified after
/// every stage; on the first failure the patch is rolled back to the previous boundary and a
/// `StageOverlap` error is returned. The final validity report is returned on success.
pub fn apply_schedule<const D: usize, L: Lattice<D>>(
    patch: &mut PackingPatch<D, L>,
    schedule: &WidenSchedule<D>,
    check_stages: bool,
) -> Result<ValidityReport> {
    let mut resolved = Vec::with_capacity(schedule.stages.len());
    for stage in &schedule.stages {
        let mut moves = Vec::with_capacity(stage.moves.len());
        for m in &stage.moves {
            let block = schedule
                .family
                .role(&m.role)
                .ok_or_else(|| CoreError::Infeasible(format!("family has no role '{}'", m.role)))?;
            moves.push((ids_for(patch, block.members())?, m.direction * m.distance));
        }
        resolved.push(moves);
    }
    let removed_id = match &schedule.removed {
        Some(c) => Some(ids_for(patch, std::slice::from_ref(c))?[0]),
        None => None,
    };
    let last = resolved.len().saturating_sub(1);

    for (s, moves) in resolved.iter().enumerate() {
        let snapshot = patch.clone();
        let outcome = (|| -> Result<()> {
            if s == last {
                if let Some(id) = removed_id {
                    patch.remove_center(id)?;
                }
            }
            for (ids, v) in moves {
                if s == last && removed_id.is_some() {
                    let kept: Vec<usize> = ids.iter().copied().filter(|&i| Some(i) != removed_id).collect();
                    patch.translate_by(&kept, *v)?;
                } else {
                    patch.translate_by(ids, *v)?;
                }
            }
            if check_stages {
                let report = patch.is_valid_packing();
                if !report.valid {
                    return Err(CoreError::StageOverlap {
                        stage: s + 1,
                        violations: report.violations.len(),
                        worst: report.worst(),
                    });
                }
            }
            Ok(())
        })();
        if let Err(e) = outcome {
            *patch = snapshot;
            return Err(e);
        }
    }
    if resolved.is_empty() {
        if let Some(id) = removed_id {
            patch.remove_center(id)?;
        }
    }
    Ok(patch.is_valid_packing())
}
