mod common;

use gapsat_core::rearrange::*;
use gapsat_core::*;

fn plane(d: f64) -> HoneycombPacking {
    HoneycombPacking::new(GapDefect::new(Point([0.0, 1.0]), 0.0, d).unwrap())
}

fn space(d: f64) -> FccPacking {
    FccPacking::new(GapDefect::new(Point([0.0, 0.0, 1.0]), 0.0, d).unwrap())
}

#[test]
fn planar_widening_is_positive_and_stagewise_valid() {
    let tol = ToleranceConfig::default();
    for d in [0.1, 0.4, 0.8] {
        let p = plane(d);
        let s = optimize_widening_2d(&p, 6, &tol).unwrap();
        assert!(s.delta > 0.0, "d={d}");
        assert!(s.removed.is_none());
        assert!(common::stagewise_valid(&p, &s), "d={d}");
    }
}

#[test]
fn spatial_widening_removes_one_sphere() {
    let tol = ToleranceConfig::default();
    let p = space(0.5);
    let s = optimize_widening_3d(&p, 3, &tol).unwrap();
    assert!(s.delta > 0.0);
    assert!(s.removed.is_some());
    assert!(common::stagewise_valid(&p, &s));
    let region = family_region(&p, &s.family, 4.0).unwrap();
    let mut patch = PackingPatch::from_packing(p, region, tol);
    apply_schedule(&mut patch, &s, true).unwrap();
    assert_eq!(patch.edits().removals.len(), 1);
}

#[test]
fn last_stage_cannot_go_further() {
    let tol = ToleranceConfig::default();
    let p = plane(0.5);
    let mut s = optimize_widening_2d(&p, 6, &tol).unwrap();
    let last = s.stages.len() - 1;
    for m in &mut s.stages[last].moves {
        m.distance = s.delta + 10.0 * tol.eps_opt;
    }
    let region = family_region(&p, &s.family, 4.0).unwrap();
    let mut patch = PackingPatch::from_packing(p, region, tol);
    let before = patch.edits();
    match apply_schedule(&mut patch, &s, true) {
        Err(CoreError::StageOverlap { stage, .. }) => assert_eq!(stage, s.stages.len()),
        other => panic!("expected an overlap, got {other:?}"),
    }
    // Rolled back to the boundary before the failing stage, which had moved spheres.
    assert_ne!(patch.edits(), before);
    assert!(patch.is_valid_packing().valid);
}

#[test]
fn overlong_first_stage_fails_at_stage_one() {
    let tol = ToleranceConfig::default();
    let d = 0.5;
    let p = plane(d);
    let mut s = optimize_widening_2d(&p, 6, &tol).unwrap();
    for m in &mut s.stages[0].moves {
        m.distance = d + 0.1;
    }
    let region = family_region(&p, &s.family, 4.0).unwrap();
    let mut patch = PackingPatch::from_packing(p, region, tol);
    assert!(matches!(apply_schedule(&mut patch, &s, true), Err(CoreError::StageOverlap { stage: 1, .. })));
    assert!(patch.edits().moves.is_empty());
}

#[test]
fn missing_members_are_reported() {
    let tol = ToleranceConfig::default();
    let p = plane(0.5);
    let s = optimize_widening_2d(&p, 6, &tol).unwrap();
    let mut patch = PackingPatch::from_packing(p, Region::cube(Point([1000.0, 1000.0]), 3.0).unwrap(), tol);
    assert!(matches!(apply_schedule(&mut patch, &s, true), Err(CoreError::MissingMember(_))));
}

#[test]
fn delta_is_monotone_and_size_independent() {
    let tol = ToleranceConfig::default();
    let mut prev = 0.0;
    for k in 1..=10 {
        let d = 0.1 * k as f64;
        let deltas: Vec<f64> =
            [4, 6, 8].iter().map(|&n| optimize_widening_2d(&plane(d), n, &tol).unwrap().delta).collect();
        assert!(deltas[0] >= prev - 1e-6, "d={d}");
        for x in &deltas {
            assert!((x - deltas[0]).abs() <= 1e-6, "d={d}: {deltas:?}");
        }
        prev = deltas[0];
    }
}

#[test]
fn zero_gap_gives_no_widening() {
    let tol = ToleranceConfig::default();
    assert_eq!(optimize_widening_2d(&plane(0.0), 6, &tol).unwrap().delta, 0.0);
    assert_eq!(optimize_widening_3d(&space(0.0), 3, &tol).unwrap().delta, 0.0);
}

#[test]
fn retargeted_schedule_stays_valid_on_larger_family() {
    let tol = ToleranceConfig::default();
    let p = plane(0.7);
    let s = optimize_widening_2d(&p, 6, &tol).unwrap();
    let big = optimize_widening_2d(&p, 12, &tol).unwrap();
    let moved = s.with_family(big.family.clone(), None).unwrap();
    assert!(common::stagewise_valid(&p, &moved));
}

#[test]
fn plan_iteration_count_decreases_with_width() {
    let tol = ToleranceConfig::default();
    let mut prev = usize::MAX;
    for d0 in [1.2, 1.5, 1.8, 2.0] {
        let plan = plan_iterations(d0, 2.0, |d| Ok(optimize_widening_2d(&plane(d), 6, &tol)?.delta)).unwrap();
        assert!(plan.k <= prev);
        assert_eq!(plan.sizes.len(), plan.k);
        assert!(plan.final_width() >= 2.0);
        prev = plan.k;
    }
}
