use std::fmt::Write as _;
use std::path::Path;

use gapsat_core::blocks::{is_honeycomb_direction, PlaneFrame, SpaceFrame};
use gapsat_core::format::{
    parse_scene, parse_witness, patch_to_string, schedule_to_string, witness_to_string, AnyPatch, AnyScene,
    AnyWitness, PatchFile,
};
use gapsat_core::rearrange::{
    build_witness_2d, build_witness_3d, direct_insertion, optimize_widening_2d, optimize_widening_3d, reduce_honeycomb_gap,
    reduce_line_gap, reduce_plane_gap, Reduction, WidenSchedule,
};
use gapsat_core::render::{render_obj, render_svg, Scene};
use gapsat_core::{
    check_witness, CoreError, FccPacking, GapDefect, HoneycombPacking, Lattice, PackingPatch, Point, Region,
    ToleranceConfig, Witness,
};

use crate::{GapArgs, LatticeArg};

const EXIT_OK: u8 = 0;
const EXIT_REJECTED: u8 = 1;

/// A failed run: usage problems exit with 2, everything else with 1.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Failed(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Failed(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Failed(m) => m,
        }
    }
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Parse(_)
            | CoreError::InvalidDefect(_)
            | CoreError::InvalidRegion(_)
            | CoreError::InvalidTolerance(_)
            | CoreError::DimensionMismatch { .. }
            | CoreError::SizeTooSmall { .. } => Failure::Usage(e.to_string()),
            other => Failure::Failed(other.to_string()),
        }
    }
}

type Run = Result<u8, Failure>;

fn normal<const D: usize>(gap: &GapArgs) -> Result<Point<D>, Failure> {
    let v = match &gap.gap_normal {
        Some(v) => v.clone(),
        None => (0..D).map(|k| if k + 1 == D { 1.0 } else { 0.0 }).collect(),
    };
    if v.len() != D {
        return Err(Failure::Usage(format!("--gap-normal needs {D} components for this lattice, got {}", v.len())));
    }
    Ok(Point::from_slice(&v)?)
}

fn defect<const D: usize>(gap: &GapArgs, width: f64) -> Result<GapDefect<D>, Failure> {
    Ok(GapDefect::from_direction(normal(gap)?, gap.gap_offset, width)?)
}

fn plane_packing(gap: &GapArgs, width: f64) -> Result<HoneycombPacking, Failure> {
    Ok(HoneycombPacking::new(defect(gap, width)?))
}

fn space_packing(gap: &GapArgs, width: f64) -> Result<FccPacking, Failure> {
    Ok(FccPacking::new(defect(gap, width)?))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Failed(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

pub fn generate(gap: &GapArgs, window: f64, out: &Path) -> Run {
    if window.is_nan() || window <= 0.0 {
        return Err(Failure::Usage("--window must be positive".into()));
    }
    let text = match gap.lattice {
        LatticeArg::Honeycomb => window_text(plane_packing(gap, gap.gap_width)?, window)?,
        LatticeArg::Fcc => window_text(space_packing(gap, gap.gap_width)?, window)?,
    };
    emit(Some(out), &text)?;
    Ok(EXIT_OK)
}

fn window_text<const D: usize, L: Lattice<D>>(
    packing: gapsat_core::DefectivePacking<D, L>,
    window: f64,
) -> Result<String, Failure> {
    let region = Region::cube(Point([0.0; D]), window)?;
    let patch = PackingPatch::from_packing(packing, region, ToleranceConfig::default());
    eprintln!("{} centers", patch.len());
    Ok(patch_to_string(&PatchFile::from_patch(&patch)))
}

fn schedule_summary<const D: usize>(s: &WidenSchedule<D>) -> String {
    let mut out = format!("delta {}\n", s.delta);
    for st in &s.stages {
        let _ = writeln!(out, "stage {}: distance {}", st.index, st.moves.first().map_or(0.0, |m| m.distance));
    }
    if let Some(c) = s.removed {
        let _ = writeln!(out, "removed {:?}", c.0);
    }
    out
}

pub fn widen(gap: &GapArgs, n: Option<usize>, out: Option<&Path>) -> Run {
    let tol = ToleranceConfig::default();
    let (text, summary, delta) = match gap.lattice {
        LatticeArg::Honeycomb => {
            let s = optimize_widening_2d(&plane_packing(gap, gap.gap_width)?, n.unwrap_or(6), &tol)?;
            (schedule_to_string::<2, gapsat_core::Honeycomb>(&s), schedule_summary(&s), s.delta)
        }
        LatticeArg::Fcc => {
            let s = optimize_widening_3d(&space_packing(gap, gap.gap_width)?, n.unwrap_or(4), &tol)?;
            (schedule_to_string::<3, gapsat_core::Fcc>(&s), schedule_summary(&s), s.delta)
        }
    };
    eprint!("{summary}");
    emit(out, &text)?;
    Ok(if delta > 0.0 { EXIT_OK } else { EXIT_REJECTED })
}

fn describe<const D: usize>(what: &str, r: &Reduction<D>) -> String {
    format!(
        "{what} reduction: moved {} centers by {} along {:?}; new lattice-direction gap of width {}",
        r.moved.len(),
        r.distance,
        r.direction.0,
        r.width
    )
}

/// The reduced gap is a lattice-direction gap of width `w`; widening it is the same problem as
/// widening a straight lattice gap of that width. Reports why that cannot be completed.
fn downstream<T>(w: f64, widen: impl FnOnce(f64) -> Result<T, CoreError>) -> Failure {
    match widen(w) {
        Err(e) => Failure::Failed(format!("widening the reduced gap of width {w}: {e}")),
        Ok(_) => Failure::Failed(format!(
            "the reduced gap of width {w} can be closed, but composing a reduction with the widening chain is not supported"
        )),
    }
}

fn plane_witness(gap: &GapArgs, n: Option<usize>, tol: &ToleranceConfig) -> Result<Witness<2, gapsat_core::Honeycomb>, Failure> {
    let p = plane_packing(gap, gap.gap_width)?;
    if PlaneFrame::for_gap(&p.defect).is_ok() {
        return Ok(build_witness_2d(&p, tol)?);
    }
    if let Ok(w) = direct_insertion(&p, tol) {
        return Ok(w);
    }
    let r = reduce_line_gap(&p, n.unwrap_or(5), tol)?;
    eprintln!("{}", describe("line", &r));
    Err(downstream(r.width, |w| build_witness_2d(&HoneycombPacking::new(GapDefect::new(Point([0.0, 1.0]), 0.0, w)?), tol)))
}

fn space_witness(gap: &GapArgs, n: Option<usize>, tol: &ToleranceConfig) -> Result<Witness<3, gapsat_core::Fcc>, Failure> {
    let p = space_packing(gap, gap.gap_width)?;
    if SpaceFrame::for_gap(&p.defect).is_ok() {
        return Ok(build_witness_3d(&p, tol)?);
    }
    if let Ok(w) = direct_insertion(&p, tol) {
        return Ok(w);
    }
    let r = if is_honeycomb_direction(&p.defect.normal(), 1e-9) {
        let r = reduce_honeycomb_gap(&p, n.unwrap_or(3), tol)?;
        eprintln!("{}", describe("honeycomb-layer", &r));
        r
    } else {
        let r = reduce_plane_gap(&p, n.unwrap_or(4), tol)?;
        eprintln!("{}", describe("plane", &r));
        r
    };
    Err(downstream(r.width, |w| build_witness_3d(&FccPacking::new(GapDefect::new(Point([0.0, 0.0, 1.0]), 0.0, w)?), tol)))
}

fn with_seed<const D: usize, L: Lattice<D>>(mut w: Witness<D, L>, seed: u64) -> Witness<D, L> {
    let _ = writeln!(w.provenance, "seed: {seed}");
    w
}

pub fn witness(gap: &GapArgs, n: Option<usize>, strict: bool, out: Option<&Path>) -> Run {
    let tol = ToleranceConfig::default();
    let text = match gap.lattice {
        LatticeArg::Honeycomb => witness_to_string(&with_seed(plane_witness(gap, n, &tol)?, gap.seed)),
        LatticeArg::Fcc => witness_to_string(&with_seed(space_witness(gap, n, &tol)?, gap.seed)),
    };
    emit(out, &text)?;
    // Verify what was written, not the in-memory value.
    check_text(&text, strict)
}

fn report<const D: usize>(r: &gapsat_core::CheckReport<D>) -> u8 {
    let mode = if r.strict_mode { "strict" } else { "normal" };
    if r.accepted {
        eprintln!("accepted ({mode} mode), net gain {}", r.net_gain);
        EXIT_OK
    } else {
        eprintln!("rejected ({mode} mode), net gain {}, {} violation(s)", r.net_gain, r.violations.len());
        for v in r.violations.iter().take(20) {
            eprintln!("  {v}");
        }
        EXIT_REJECTED
    }
}

fn check_text(text: &str, strict: bool) -> Run {
    Ok(match parse_witness(text)? {
        AnyWitness::Plane(w) => report(&check_witness(&w, strict)),
        AnyWitness::Space(w) => report(&check_witness(&w, strict)),
    })
}

pub fn check(path: &Path, strict: bool) -> Run {
    check_text(&read(path)?, strict)
}

pub fn delta_curve(gap: &GapArgs, n: Option<usize>, d_min: f64, d_max: f64, steps: usize, out: Option<&Path>) -> Run {
    if steps == 0 {
        return Err(Failure::Usage("--steps must be at least 1".into()));
    }
    if !(d_min >= 0.0 && d_max >= d_min) {
        return Err(Failure::Usage("need 0 <= --d-min <= --d-max".into()));
    }
    let grid: Vec<f64> = (0..steps)
        .map(|i| if steps == 1 { d_min } else { d_min + (d_max - d_min) * i as f64 / (steps - 1) as f64 })
        // Drop representation noise such as 0.30000000000000004 from the printed grid.
        .map(|d| (d * 1e12).round() / 1e12)
        .collect();
    let n = n.unwrap_or(match gap.lattice {
        LatticeArg::Honeycomb => 6,
        LatticeArg::Fcc => 4,
    });
    // Validate the gap once so a bad normal is a usage error, not a per-row failure.
    match gap.lattice {
        LatticeArg::Honeycomb => drop(plane_packing(gap, d_min)?),
        LatticeArg::Fcc => drop(space_packing(gap, d_min)?),
    }
    let row = |d: f64| -> Result<[f64; 3], CoreError> {
        let tol = ToleranceConfig::default();
        let dist = |s: &[gapsat_core::rearrange::MoveStage<3>]| s.iter().map(|st| st.moves[0].distance).collect::<Vec<_>>();
        let dist2 = |s: &[gapsat_core::rearrange::MoveStage<2>]| s.iter().map(|st| st.moves[0].distance).collect::<Vec<_>>();
        let v = match gap.lattice {
            LatticeArg::Honeycomb => {
                let p = HoneycombPacking::new(GapDefect::from_direction(normal::<2>(gap).unwrap(), gap.gap_offset, d)?);
                dist2(&optimize_widening_2d(&p, n, &tol)?.stages)
            }
            LatticeArg::Fcc => {
                let p = FccPacking::new(GapDefect::from_direction(normal::<3>(gap).unwrap(), gap.gap_offset, d)?);
                dist(&optimize_widening_3d(&p, n, &tol)?.stages)
            }
        };
        Ok([v[0], v[1], v[2]])
    };

    let workers = std::thread::available_parallelism().map_or(1, |k| k.get()).min(grid.len());
    let chunk = grid.len().div_ceil(workers);
    let rows: Vec<Result<[f64; 3], CoreError>> = std::thread::scope(|s| {
        let handles: Vec<_> = grid.chunks(chunk).map(|c| s.spawn(|| c.iter().map(|&d| row(d)).collect::<Vec<_>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    });

    let mut csv = String::from("d,delta,n,d1,d2,d3\n");
    for (d, r) in grid.iter().zip(rows) {
        let [d1, d2, d3] = r?;
        let _ = writeln!(csv, "{d},{d3},{n},{d1},{d2},{d3}");
    }
    emit(out, &csv)?;
    Ok(EXIT_OK)
}

pub fn render(input: &Path, out: &Path) -> Run {
    let scene = parse_scene(&read(input)?)?;
    match scene {
        AnyScene::Witness(AnyWitness::Plane(w)) => write_svg(&Scene::from_witness(&w, 2.0), out),
        AnyScene::Patch(AnyPatch::Plane(p)) => write_svg(&Scene::from_patch(&p), out),
        AnyScene::Witness(AnyWitness::Space(w)) => write_obj(&Scene::from_witness(&w, 2.0), out),
        AnyScene::Patch(AnyPatch::Space(p)) => write_obj(&Scene::from_patch(&p), out),
    }
}

fn write_svg(scene: &Scene<2>, out: &Path) -> Run {
    emit(Some(out), &render_svg(scene))?;
    Ok(EXIT_OK)
}

fn write_obj(scene: &Scene<3>, out: &Path) -> Run {
    let mtl_path = out.with_extension("mtl");
    let mtl_name = mtl_path.file_name().and_then(|s| s.to_str()).unwrap_or("scene.mtl").to_string();
    let (obj, mtl) = render_obj(scene, &mtl_name);
    emit(Some(out), &obj)?;
    emit(Some(&mtl_path), &mtl)?;
    Ok(EXIT_OK)
}
