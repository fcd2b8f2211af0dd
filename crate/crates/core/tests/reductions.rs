mod common;

use gapsat_core::blocks::cubic_direction;
use gapsat_core::rearrange::*;
use gapsat_core::*;

/// Applies the reduction in a patch around its region and checks the result with the oracle.
fn oracle_check<const D: usize, L: Lattice<D>>(packing: &DefectivePacking<D, L>, r: &Reduction<D>) -> bool {
    let mut patch = PackingPatch::from_packing(*packing, r.region.expanded(1.0), ToleranceConfig::default());
    r.apply(&mut patch).unwrap();
    let pts: Vec<[f64; D]> =
        patch.positions().map(|p| p.0).chain(patch.background().iter().map(|(_, p)| p.0)).collect();
    patch.is_valid_packing().valid && common::oracle_valid(&pts)
}

fn sloped(offset: f64, d: f64) -> HoneycombPacking {
    HoneycombPacking::new(GapDefect::from_direction(Point([-0.3, 1.0]), offset, d).unwrap())
}

#[test]
fn line_reduction_is_valid_and_size_independent() {
    let tol = ToleranceConfig::default();
    for (off, d) in [(0.1, 0.4), (0.7, 0.25), (-1.3, 1.0)] {
        let p = sloped(off, d);
        let a = reduce_line_gap(&p, 5, &tol).unwrap();
        let b = reduce_line_gap(&p, 8, &tol).unwrap();
        assert!(a.width > 0.0);
        assert!((a.width - b.width).abs() <= 1e-9, "{} vs {}", a.width, b.width);
        assert!(oracle_check(&p, &a));
        assert!(oracle_check(&p, &b));
    }
}

#[test]
fn line_reduction_needs_an_off_lattice_line() {
    let p = HoneycombPacking::new(GapDefect::new(Point([0.0, 1.0]), 0.5, 0.5).unwrap());
    assert!(matches!(reduce_line_gap(&p, 5, &ToleranceConfig::default()), Err(CoreError::UnsupportedGap(_))));
}

#[test]
fn honeycomb_layer_reduction() {
    let tol = ToleranceConfig::default();
    for s in [[1.0, 1.0, 1.0], [1.0, -1.0, 1.0], [-1.0, 1.0, -1.0]] {
        let n = cubic_direction(s).normalized().unwrap();
        let p = FccPacking::new(GapDefect::new(n, 0.3, 0.5).unwrap());
        let r = reduce_honeycomb_gap(&p, 3, &tol).unwrap();
        assert!(r.width > 0.0);
        assert!(oracle_check(&p, &r));
    }
}

#[test]
fn honeycomb_reduction_refuses_overlong_moves() {
    let tol = ToleranceConfig::default();
    let n = cubic_direction([1.0, 1.0, 1.0]).normalized().unwrap();
    let p = FccPacking::new(GapDefect::new(n, 0.3, 0.5).unwrap());
    assert!(reduce_honeycomb_gap_by(&p, 3, 0.25, &tol).is_ok());
    assert!(reduce_honeycomb_gap_by(&p, 3, 0.8, &tol).is_err());
}

#[test]
fn general_plane_reduction() {
    let tol = ToleranceConfig::default();
    for (dir, off, d) in [([0.31, 0.17, 0.93], 0.2, 0.4), ([0.5, -0.4, 0.77], -0.6, 0.3), ([-0.2, 0.9, 0.4], 1.1, 0.6)] {
        let p = FccPacking::new(GapDefect::from_direction(Point(dir), off, d).unwrap());
        let r = reduce_plane_gap(&p, 4, &tol).unwrap();
        assert!(r.width > 0.0);
        assert!(oracle_check(&p, &r), "{dir:?}");
    }
}
