mod common;

use gapsat_core::blocks::{simplex_block, square_pyramid_block, triangular_block, Orientation, SimplexAxis};
use gapsat_core::*;
use proptest::prelude::*;
use rand::{rngs::StdRng, Rng, SeedableRng};

#[test]
fn block_sizes_match_closed_forms() {
    for n in 1..=10usize {
        let (tri, pyr, tet) = (n * (n + 1) / 2, n * (n + 1) * (2 * n + 1) / 6, n * (n + 1) * (n + 2) / 6);
        for o in [Orientation::Up, Orientation::Down] {
            assert_eq!(triangular_block(LatticeCoord([3, -2]), o, n).len(), tri);
            assert_eq!(square_pyramid_block(LatticeCoord([1, 2, -1]), n, o).len(), pyr);
        }
        for a in [SimplexAxis::BottomAlongX, SimplexAxis::BottomAlongY] {
            assert_eq!(simplex_block(LatticeCoord([0, 0, 0]), n, a).len(), tet);
        }
    }
}

#[test]
fn window_counts_match_index_oracle() {
    for d in [0.0, 0.5, 1.3, 2.0] {
        let p = HoneycombPacking::new(GapDefect::new(Point([0.0, 1.0]), 0.0, d).unwrap());
        let r = Region::cube(Point([0.0, 0.0]), 10.0).unwrap();
        assert_eq!(p.enumerate_centers(&r).len(), common::honeycomb_window([0.0, 1.0], 0.0, d, 10.0).len());
        let q = FccPacking::new(GapDefect::new(Point([0.0, 0.0, 1.0]), 0.3, d).unwrap());
        let r3 = Region::cube(Point([0.0; 3]), 5.0).unwrap();
        assert_eq!(q.enumerate_centers(&r3).len(), common::fcc_window([0.0, 0.0, 1.0], 0.3, d, 5.0).len());
    }
}

#[test]
fn random_gaps_stay_packings() {
    let mut rng = StdRng::seed_from_u64(11);
    let tol = ToleranceConfig::default();
    for k in 0..60 {
        let d = rng.gen_range(0.0..3.0);
        let off = rng.gen_range(-2.0..2.0);
        if k % 2 == 0 {
            let n = common::random_unit::<2>(&mut rng);
            let p = HoneycombPacking::new(GapDefect::new(Point(n), off, d).unwrap());
            let patch = PackingPatch::from_packing(p, Region::cube(Point([0.0; 2]), 8.0).unwrap(), tol);
            assert!(patch.is_valid_packing().valid);
            assert!(common::oracle_valid(&common::honeycomb_window(n, off, d, 8.0)));
        } else {
            let n = common::random_unit::<3>(&mut rng);
            let p = FccPacking::new(GapDefect::new(Point(n), off, d).unwrap());
            let patch = PackingPatch::from_packing(p, Region::cube(Point([0.0; 3]), 4.0).unwrap(), tol);
            assert!(patch.is_valid_packing().valid);
            assert!(common::oracle_valid(&common::fcc_window(n, off, d, 4.0)));
        }
    }
}

#[test]
fn deep_hole_and_tangent_gap() {
    let tol = ToleranceConfig::default();
    let p = HoneycombPacking::new(GapDefect::new(Point([0.0, 1.0]), 0.0, 0.0).unwrap());
    let patch = PackingPatch::from_packing(p, Region::cube(Point([0.0, 0.0]), 6.0).unwrap(), tol);
    let (_, r) = patch.largest_empty_ball(&Region::cube(Point([0.0, 0.0]), 2.0).unwrap()).unwrap();
    assert!((r - 2.0 / 3f64.sqrt()).abs() < 1e-6, "{r}");

    let p = HoneycombPacking::new(GapDefect::new(Point([0.0, 1.0]), 0.0, 2.0).unwrap());
    let patch = PackingPatch::from_packing(p, Region::cube(Point([0.0, 0.0]), 6.0).unwrap(), tol);
    let mid = Point([0.0, 0.0]);
    let (_, r) = patch.largest_empty_ball(&Region::cube(mid, 1.0).unwrap()).unwrap();
    assert!(r >= 2.0 - 1e-9, "{r}");
}

#[test]
fn hash_and_naive_agree_on_dense_random_sets() {
    let mut rng = StdRng::seed_from_u64(5);
    let tol = ToleranceConfig::default();
    let p = HoneycombPacking::new(GapDefect::new(Point([0.0, 1.0]), 0.0, 0.4).unwrap());
    for _ in 0..20 {
        let region = Region::cube(Point([0.0, 0.0]), 10.0).unwrap();
        let mut patch = PackingPatch::empty(p, region, tol);
        for _ in 0..rng.gen_range(1..500) {
            patch.insert_center(Point([rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0)])).unwrap();
        }
        assert_eq!(patch.is_valid_packing(), patch.validity_naive());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lattice_distances_at_least_two(a in -1000i64..1000, b in -1000i64..1000, da in -3i64..3, db in -3i64..3) {
        prop_assume!(da != 0 || db != 0);
        let p = honeycomb_point(LatticeCoord([a, b]));
        let q = honeycomb_point(LatticeCoord([a + da, b + db]));
        prop_assert!(dist2(&p, &q) >= 4.0 - 1e-12);
    }

    // Coordinates near 1e4 are only representable to about 1.8e-12, so the squared-distance
    // floor loosens in proportion.
    #[test]
    fn far_lattice_distances_at_least_two(a in -10_000i64..10_000, b in -10_000i64..10_000, da in -3i64..3, db in -3i64..3) {
        prop_assume!(da != 0 || db != 0);
        let p = honeycomb_point(LatticeCoord([a, b]));
        let q = honeycomb_point(LatticeCoord([a + da, b + db]));
        prop_assert!(dist2(&p, &q) >= 4.0 - 1e-11);
    }

    #[test]
    fn fcc_distances_at_least_two(a in -1000i64..1000, b in -1000i64..1000, c in -1000i64..1000, s in prop::array::uniform3(-2i64..2)) {
        prop_assume!(s != [0, 0, 0]);
        let p = fcc_point(LatticeCoord([a, b, c]));
        let q = fcc_point(LatticeCoord([a + s[0], b + s[1], c + s[2]]));
        prop_assert!(dist2(&p, &q) >= 4.0 - 1e-12);
    }

    #[test]
    fn shifted_window_is_valid(angle in 0.0..std::f64::consts::TAU, off in -2.0..2.0f64, d in 0.0..3.0f64) {
        let n = Point([angle.cos(), angle.sin()]);
        let p = HoneycombPacking::new(GapDefect::new(n, off, d).unwrap());
        let patch = PackingPatch::from_packing(p, Region::cube(Point([0.0; 2]), 7.0).unwrap(), ToleranceConfig::default());
        prop_assert!(patch.is_valid_packing().valid);
    }

    #[test]
    fn hash_equals_naive(seed in any::<u64>(), count in 1usize..300, spread in 2.0..12.0f64) {
        let mut rng = StdRng::seed_from_u64(seed);
        let p = FccPacking::new(GapDefect::new(Point([0.0, 0.0, 1.0]), 0.0, 0.7).unwrap());
        let mut patch = PackingPatch::empty(p, Region::cube(Point([0.0; 3]), spread).unwrap(), ToleranceConfig::default());
        for _ in 0..count {
            let x: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-spread..spread));
            patch.insert_center(Point(x)).unwrap();
        }
        prop_assert_eq!(patch.is_valid_packing(), patch.validity_naive());
    }
}
