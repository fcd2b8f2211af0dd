//! Fast feasibility queries for a three-stage rigid rearrangement.
//!
//! Every block translates rigidly, so only pairs from different groups can change distance.
//! Those pairs are collected once; a query then costs one pass over the pairs of a stage.

use crate::blocks::BlockFamily;
use crate::geom::{dist2, Lattice, LatticeCoord, Point};
use crate::lattice::{DefectivePacking, Region};

/// Squared-distance floor used by the probe; stricter than the validity tolerance.
pub const PROBE_THRESHOLD: f64 = 4.0 - 1e-12;

/// Stage slot (1, 2 or 3) and unit direction of one role.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RoleMotion<const D: usize> {
    pub slot: usize,
    pub direction: Point<D>,
}

/// Precomputed pair lists for the three stage boundaries of one family.
#[derive(Clone, Debug)]
pub struct StagedProblem<const D: usize> {
    pos: Vec<Point<D>>,
    /// 0 for fixed centers, otherwise role index + 1.
    group: Vec<usize>,
    motions: Vec<RoleMotion<D>>,
    stage_pairs: [Vec<(u32, u32)>; 3],
}

impl<const D: usize> StagedProblem<D> {
    /// `caps[s]` bounds the distance of slot `s + 1`; it only limits which pairs are tracked.
    pub fn new<L: Lattice<D>>(
        packing: &DefectivePacking<D, L>,
        family: &BlockFamily<D>,
        motions: Vec<RoleMotion<D>>,
        removed: Option<LatticeCoord<D>>,
        caps: [f64; 3],
    ) -> Self {
        assert_eq!(motions.len(), family.roles.len(), "one motion per role");
        let mut pos = Vec::new();
        let mut group = Vec::new();
        let mut removed_idx = None;
        let mut members = rustc_hash::FxHashSet::default();
        for (r, (_, block)) in family.roles.iter().enumerate() {
            for &c in block.members() {
                if Some(c) == removed {
                    removed_idx = Some(pos.len());
                }
                members.insert(c);
                pos.push(packing.position(c));
                group.push(r + 1);
            }
        }
        let max_cap = caps.iter().cloned().fold(0.0, f64::max);
        let reach = 2.0 + 2.0 * max_cap + 0.5;
        if let Some(bbox) = Region::bounding(pos.iter().copied()) {
            for (c, p) in packing.enumerate_centers(&bbox.expanded(reach)) {
                if !members.contains(&c) {
                    pos.push(p);
                    group.push(0);
                }
            }
        }
        let cap_of = |g: usize| if g == 0 { 0.0 } else { caps[motions[g - 1].slot - 1] };
        let slot_of = |g: usize| if g == 0 { 0 } else { motions[g - 1].slot };

        let mut stage_pairs: [Vec<(u32, u32)>; 3] = Default::default();
        let mut grid = crate::store::SpatialHash::default();
        for (k, p) in pos.iter().enumerate() {
            grid.insert(p, k);
        }
        let rings = (reach / crate::store::CELL).ceil() as i64;
        for a in 0..pos.len() {
            let ga = group[a];
            grid.for_each_near(&pos[a], rings, |b| {
                let gb = group[b];
                if b <= a || ga == gb || (ga == 0 && gb == 0) {
                    return;
                }
                let limit = 2.0 + cap_of(ga) + cap_of(gb);
                if dist2(&pos[a], &pos[b]) >= limit * limit {
                    return;
                }
                for s in 1..=3 {
                    if slot_of(ga) != s && slot_of(gb) != s {
                        continue;
                    }
                    if s == 3 && (Some(a) == removed_idx || Some(b) == removed_idx) {
                        continue;
                    }
                    stage_pairs[s - 1].push((a as u32, b as u32));
                }
            });
        }
        StagedProblem { pos, group, motions, stage_pairs }
    }

    pub fn pair_count(&self) -> usize {
        self.stage_pairs.iter().map(Vec::len).sum()
    }

    /// Displacement of every group after `stage` with slot distances `params`.
    fn displacements(&self, params: &[f64; 3], stage: usize) -> Vec<Point<D>> {
        let mut out = vec![Point::ORIGIN; self.motions.len() + 1];
        for (r, m) in self.motions.iter().enumerate() {
            if m.slot <= stage {
                out[r + 1] = m.direction * params[m.slot - 1];
            }
        }
        out
    }

    /// Whether the configuration after `stage` (1..=3) keeps every tracked pair apart.
    pub fn stage_ok(&self, stage: usize, params: &[f64; 3]) -> bool {
        let disp = self.displacements(params, stage);
        self.stage_pairs[stage - 1].iter().all(|&(a, b)| {
            let (a, b) = (a as usize, b as usize);
            let (va, vb) = (disp[self.group[a]], disp[self.group[b]]);
            if va == vb {
                return true;
            }
            dist2(&(self.pos[a] + va), &(self.pos[b] + vb)) >= PROBE_THRESHOLD
        })
    }

    /// Largest distance for the third slot such that every pair stays apart along the whole
    /// last move, given the first two slot distances. `None` if the start is already infeasible.
    pub fn last_limit(&self, d1: f64, d2: f64, cap: f64) -> Option<f64> {
        let disp = self.displacements(&[d1, d2, 0.0], 2);
        let mut vel = vec![Point::ORIGIN; self.motions.len() + 1];
        for (r, m) in self.motions.iter().enumerate() {
            if m.slot == 3 {
                vel[r + 1] = m.direction;
            }
        }
        let mut limit = cap;
        for &(a, b) in &self.stage_pairs[2] {
            let (a, b) = (a as usize, b as usize);
            let (ga, gb) = (self.group[a], self.group[b]);
            let u = vel[ga] - vel[gb];
            let r = (self.pos[a] + disp[ga]) - (self.pos[b] + disp[gb]);
            let c = r.norm2() - PROBE_THRESHOLD;
            let uu = u.norm2();
            if uu == 0.0 {
                if c < 0.0 && disp[ga] != disp[gb] {
                    return None;
                }
                continue;
            }
            if c < 0.0 {
                return None;
            }
            let b_ = r.dot(&u);
            if b_ >= 0.0 {
                continue;
            }
            let disc = b_ * b_ - uu * c;
            if disc <= 0.0 {
                continue;
            }
            let t1 = (-b_ - disc.sqrt()) / uu;
            limit = limit.min(t1.max(0.0));
        }
        Some(limit)
    }

    /// Largest feasible third distance for the given first two, or `None` if they are infeasible.
    pub fn evaluate(&self, d1: f64, d2: f64, cap: f64) -> Option<f64> {
        if !self.stage_ok(1, &[d1, d2, 0.0]) || !self.stage_ok(2, &[d1, d2, 0.0]) {
            return None;
        }
        self.last_limit(d1, d2, cap)
    }
}
