use criterion::{black_box, criterion_group, criterion_main, Criterion};
use gapsat_core::rearrange::*;
use gapsat_core::*;

fn plane(d: f64) -> HoneycombPacking {
    HoneycombPacking::new(GapDefect::new(Point([0.0, 1.0]), 0.0, d).unwrap())
}

fn widening(c: &mut Criterion) {
    let tol = ToleranceConfig::default();
    let p = plane(0.5);
    c.bench_function("optimize_widening_2d n=6 d=0.5", |b| {
        b.iter(|| optimize_widening_2d(black_box(&p), 6, &tol).unwrap())
    });
}

fn validity(c: &mut Criterion) {
    let region = Region::cube(Point([0.0, 0.0]), 30.0).unwrap();
    let patch = PackingPatch::from_packing(plane(0.5), region, ToleranceConfig::default());
    c.bench_function("hash validity, honeycomb window 30", |b| b.iter(|| black_box(&patch).is_valid_packing()));
    c.bench_function("naive validity, honeycomb window 30", |b| b.iter(|| black_box(&patch).validity_naive()));
}

fn checking(c: &mut Criterion) {
    let w = build_witness_2d(&plane(1.8), &ToleranceConfig::default()).unwrap();
    c.bench_function("check_witness d=1.8", |b| b.iter(|| check_witness(black_box(&w), false)));
    c.bench_function("check_witness d=1.8 strict", |b| b.iter(|| check_witness(black_box(&w), true)));
}

fn empty_ball(c: &mut Criterion) {
    let patch = PackingPatch::from_packing(
        plane(1.0),
        Region::cube(Point([0.0, 0.0]), 8.0).unwrap(),
        ToleranceConfig::default(),
    );
    let search = Region::cube(Point([0.0, 1.0]), 2.0).unwrap();
    c.bench_function("largest_empty_ball 2d", |b| b.iter(|| patch.largest_empty_ball(black_box(&search)).unwrap()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = widening, validity, checking, empty_ball
}
criterion_main!(benches);
