use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn gapsat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gapsat")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("gapsat-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Brute-force count of defect-shifted honeycomb centers (normal +y) in `[-h, h]^2`.
fn honeycomb_count(offset: f64, d: f64, h: f64) -> usize {
    let s3 = 3f64.sqrt();
    let mut count = 0;
    for j in -40i64..=40 {
        for i in -80i64..=80 {
            let (x, mut y) = ((2 * i + j) as f64, s3 * j as f64);
            if y >= offset - 1e-12 {
                y += d;
            }
            if x.abs() <= h && y.abs() <= h {
                count += 1;
            }
        }
    }
    count
}

fn centers(path: &PathBuf) -> Vec<Vec<f64>> {
    let text = std::fs::read_to_string(path).unwrap();
    text.lines()
        .filter_map(|l| l.trim().strip_prefix('{').filter(|l| l.contains("\"at\"")).map(str::to_string))
        .map(|l| {
            let at = &l[l.find("\"at\":[").unwrap() + 6..];
            at[..at.find(']').unwrap()].split(',').map(|x| x.parse().unwrap()).collect()
        })
        .collect()
}

#[test]
fn generate_counts_match_index_oracle() {
    let out = tmp("window.json");
    let o = gapsat(&["generate", "--gap-width", "0.5", "--window", "10", "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(centers(&out).len(), honeycomb_count(0.0, 0.5, 10.0));
}

#[test]
fn zero_width_window_is_the_perfect_lattice() {
    let out = tmp("perfect.json");
    assert_eq!(code(&gapsat(&["generate", "--gap-width", "0", "--window", "6", "--out", s(&out)])), 0);
    let s3 = 3f64.sqrt();
    for c in centers(&out) {
        let j = (c[1] / s3).round();
        let i = (c[0] - j) / 2.0;
        assert!((c[1] - s3 * j).abs() < 1e-12 && (i - i.round()).abs() < 1e-12, "{c:?}");
    }
}

#[test]
fn unwritable_output_fails() {
    let o = gapsat(&["generate", "--out", "/nonexistent-dir/x/window.json"]);
    assert_ne!(code(&o), 0);
}

#[test]
fn witness_then_check() {
    let w = tmp("w18.json");
    let o = gapsat(&["witness", "--gap-width", "1.8", "--strict", "--out", s(&w)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(code(&gapsat(&["check", s(&w)])), 0);
    assert_eq!(code(&gapsat(&["check", "--strict", s(&w)])), 0);

    // Drop the insertion: net gain 0.
    let text = std::fs::read_to_string(&w).unwrap();
    let start = text.find("\"insertions\": [").unwrap();
    let end = start + text[start..].find(']').unwrap() + 1;
    let end = end + text[end..].find(']').unwrap() + 1;
    let corrupted = format!("{}\"insertions\": []{}", &text[..start], &text[end..]);
    let bad = tmp("w18-bad.json");
    std::fs::write(&bad, corrupted).unwrap();
    let o = gapsat(&["check", s(&bad)]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    assert!(stderr(&o).contains("net gain 0"));
}

#[test]
fn malformed_files_are_usage_errors() {
    let bad = tmp("garbage.json");
    std::fs::write(&bad, "{\"format\": \"gapsat-witness\", ").unwrap();
    assert_eq!(code(&gapsat(&["check", s(&bad)])), 2);
    assert_eq!(code(&gapsat(&["check", "/nonexistent-dir/none.json"])), 2);
}

#[test]
fn zero_gap_reports_unreachable_target() {
    let o = gapsat(&["witness", "--gap-width", "0"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("cannot reach target"), "{}", stderr(&o));
}

#[test]
fn sloped_gap_witnesses() {
    let w = tmp("sloped.json");
    let o = gapsat(&["witness", "--gap-normal", "-0.3,1", "--gap-offset", "0.1", "--gap-width", "3.5", "--out", s(&w)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(code(&gapsat(&["check", "--strict", s(&w)])), 0);

    // A narrow sloped gap is reduced, but the widening that would follow is out of reach.
    let o = gapsat(&["witness", "--gap-normal", "-0.3,1", "--gap-offset", "0.1", "--gap-width", "0.5"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("line reduction"), "{}", stderr(&o));
}

#[test]
fn spatial_witness_round_trip() {
    let w = tmp("w3.json");
    let o = gapsat(&["witness", "--lattice", "fcc", "--gap-width", "1.95", "--out", s(&w)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(code(&gapsat(&["check", "--strict", s(&w)])), 0);
}

#[test]
fn witnesses_are_deterministic() {
    let a = stdout(&gapsat(&["witness", "--gap-width", "1.9", "--seed", "7"]));
    let b = stdout(&gapsat(&["witness", "--gap-width", "1.9", "--seed", "7"]));
    assert!(!a.is_empty());
    assert_eq!(a, b);
    assert!(a.contains("seed: 7"));
}

fn rows(csv: &str) -> Vec<Vec<f64>> {
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("d,delta,n,d1,d2,d3"));
    lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect()
}

#[test]
fn delta_curve_planar_sweep() {
    let o = gapsat(&["delta-curve", "--d-min", "0.1", "--d-max", "1.0", "--steps", "10"]);
    assert_eq!(code(&o), 0);
    let r = rows(&stdout(&o));
    assert_eq!(r.len(), 10);
    for w in r.windows(2) {
        assert!(w[1][1] >= w[0][1] - 1e-6);
    }
    let one = rows(&stdout(&gapsat(&["delta-curve", "--d-min", "0.4", "--d-max", "0.4", "--steps", "1"])));
    assert_eq!(one.len(), 1);
}

#[test]
fn delta_curve_spatial_sweep() {
    let out = tmp("curve3.csv");
    let o = gapsat(&["delta-curve", "--lattice", "fcc", "--n", "4", "--d-min", "0.25", "--d-max", "1", "--steps", "4", "--out", s(&out)]);
    assert_eq!(code(&o), 0);
    let r = rows(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(r.len(), 4);
    assert!(r.iter().all(|row| row[1] > 0.0 && row[2] == 4.0));
}

#[test]
fn widen_writes_a_schedule() {
    let out = tmp("sched.json");
    let o = gapsat(&["widen", "--gap-width", "0.5", "--out", s(&out)]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("\"format\": \"gapsat-schedule\""));
    assert_eq!(code(&gapsat(&["widen", "--gap-width", "0"])), 1);
}

#[test]
fn render_empty_patch_and_obj_counts() {
    let p = tmp("empty.json");
    assert_eq!(code(&gapsat(&["generate", "--gap-offset", "-1", "--window", "0.4", "--out", s(&p)])), 0);
    let svg = tmp("empty.svg");
    assert_eq!(code(&gapsat(&["render", s(&p), "--out", s(&svg)])), 0);
    let text = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(text.matches("<circle").count(), 0);
    assert!(text.contains("gap-lower"));

    let p3 = tmp("fcc.json");
    assert_eq!(code(&gapsat(&["generate", "--lattice", "fcc", "--gap-width", "0.5", "--window", "3", "--out", s(&p3)])), 0);
    let n = centers(&p3).len();
    let obj = tmp("fcc.obj");
    assert_eq!(code(&gapsat(&["render", s(&p3), "--out", s(&obj)])), 0);
    let text = std::fs::read_to_string(&obj).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 42 * n);
    assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 80 * n);
    assert!(tmp("fcc.mtl").exists());
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&gapsat(&["witness", "--lattice", "bcc"])), 2);
    assert_eq!(code(&gapsat(&["witness", "--gap-normal", "1,2,3"])), 2);
    assert_eq!(code(&gapsat(&["frobnicate"])), 2);
    assert_eq!(code(&gapsat(&["delta-curve", "--steps", "0"])), 2);
}

#[test]
fn oblique_spatial_gap_is_reduced_then_reported() {
    let o = gapsat(&["witness", "--lattice", "fcc", "--gap-normal", "0.31,0.17,0.93", "--gap-offset", "0.2", "--gap-width", "0.4"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("plane reduction"), "{}", stderr(&o));
    assert!(stderr(&o).contains("resource limit"), "{}", stderr(&o));
}
