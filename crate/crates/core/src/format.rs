//! Versioned JSON files: witnesses, packing windows and widening schedules.
//!
//! Every file starts with `format`, `version`, `dim` and `lattice`. Reals are written as
//! shortest round-trip decimals, lattice coordinates as integer arrays.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::blocks::{Block, BlockFamily};
use crate::error::{CoreError, Result};
use crate::geom::{Fcc, Honeycomb, Lattice, LatticeCoord, LatticeKind, Point};
use crate::lattice::{DefectivePacking, GapDefect, Region};
use crate::rearrange::{MoveStage, RoleMove, WidenSchedule};
use crate::store::PackingPatch;
use crate::witness::Witness;

pub const FORMAT_VERSION: u32 = 1;
pub const WITNESS_FORMAT: &str = "gapsat-witness";
pub const PATCH_FORMAT: &str = "gapsat-patch";
pub const SCHEDULE_FORMAT: &str = "gapsat-schedule";

#[derive(Deserialize)]
struct Header {
    format: String,
    version: u32,
    dim: usize,
    lattice: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GapDto {
    normal: Vec<f64>,
    offset: f64,
    width: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RegionDto {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MoveDto {
    coord: Vec<i64>,
    to: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WitnessDto {
    format: String,
    version: u32,
    dim: usize,
    lattice: String,
    gap: GapDto,
    region: RegionDto,
    removals: Vec<Vec<i64>>,
    moves: Vec<MoveDto>,
    insertions: Vec<Vec<f64>>,
    #[serde(default)]
    provenance: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CenterDto {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coord: Option<Vec<i64>>,
    at: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PatchDto {
    format: String,
    version: u32,
    dim: usize,
    lattice: String,
    gap: GapDto,
    region: RegionDto,
    centers: Vec<CenterDto>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RoleMoveDto {
    role: String,
    direction: Vec<f64>,
    distance: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StageDto {
    index: usize,
    moves: Vec<RoleMoveDto>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BlockDto {
    role: String,
    members: Vec<Vec<i64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScheduleDto {
    format: String,
    version: u32,
    dim: usize,
    lattice: String,
    gap: GapDto,
    delta: f64,
    removed: Option<Vec<i64>>,
    stages: Vec<StageDto>,
    family: Vec<BlockDto>,
}

fn field_err(field: &str, msg: impl std::fmt::Display) -> CoreError {
    CoreError::Parse(format!("field `{field}`: {msg}"))
}

fn json_err(e: serde_json::Error) -> CoreError {
    // serde_json messages already end with "at line L column C".
    CoreError::Parse(e.to_string())
}

fn point<const D: usize>(v: &[f64], field: &str) -> Result<Point<D>> {
    if v.len() != D {
        return Err(field_err(field, format!("expected {D} coordinates, found {}", v.len())));
    }
    Point::from_slice(v).map_err(|e| field_err(field, e))
}

fn coord<const D: usize>(v: &[i64], field: &str) -> Result<LatticeCoord<D>> {
    let arr: [i64; D] = v
        .try_into()
        .map_err(|_| field_err(field, format!("expected {D} indices, found {}", v.len())))?;
    Ok(LatticeCoord(arr))
}

fn gap_from<const D: usize>(g: &GapDto) -> Result<GapDefect<D>> {
    GapDefect::new(point(&g.normal, "gap.normal")?, g.offset, g.width).map_err(|e| field_err("gap", e))
}

fn gap_to<const D: usize>(g: &GapDefect<D>) -> GapDto {
    GapDto { normal: g.normal().0.to_vec(), offset: g.offset(), width: g.width() }
}

fn region_from<const D: usize>(r: &RegionDto) -> Result<Region<D>> {
    Region::new(point(&r.lo, "region.lo")?, point(&r.hi, "region.hi")?).map_err(|e| field_err("region", e))
}

fn region_to<const D: usize>(r: &Region<D>) -> RegionDto {
    RegionDto { lo: r.lo.0.to_vec(), hi: r.hi.0.to_vec() }
}

/// Reads and validates the common header; returns the lattice.
fn header(text: &str, expected_format: &str) -> Result<LatticeKind> {
    let h: Header = serde_json::from_str(text).map_err(json_err)?;
    if h.format != expected_format {
        return Err(field_err("format", format!("expected \"{expected_format}\", found \"{}\"", h.format)));
    }
    if h.version != FORMAT_VERSION {
        return Err(field_err("version", format!("unsupported version {}, expected {FORMAT_VERSION}", h.version)));
    }
    let kind: LatticeKind = h.lattice.parse().map_err(|e| field_err("lattice", e))?;
    if kind.dim() != h.dim {
        return Err(field_err("dim", format!("{} is {}-dimensional, found dim {}", kind.name(), kind.dim(), h.dim)));
    }
    Ok(kind)
}

/// Pretty JSON with one array element per line, so large files stay diffable.
fn render_object(fields: Vec<(&str, String)>) -> String {
    let mut out = String::from("{\n");
    let n = fields.len();
    for (i, (k, v)) in fields.into_iter().enumerate() {
        out.push_str(&format!("  \"{k}\": {v}"));
        out.push_str(if i + 1 < n { ",\n" } else { "\n" });
    }
    out.push_str("}\n");
    out
}

fn render_list<T: Serialize>(items: &[T]) -> String {
    if items.is_empty() {
        return "[]".into();
    }
    let body: Vec<String> = items.iter().map(|x| format!("    {}", compact(x))).collect();
    format!("[\n{}\n  ]", body.join(",\n"))
}

fn compact<T: Serialize + ?Sized>(x: &T) -> String {
    serde_json::to_string(x).expect("plain data serializes")
}

/// A witness of either dimension, as read from a file.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyWitness {
    Plane(Witness<2, Honeycomb>),
    Space(Witness<3, Fcc>),
}

impl From<Witness<2, Honeycomb>> for AnyWitness {
    fn from(w: Witness<2, Honeycomb>) -> Self {
        AnyWitness::Plane(w)
    }
}

impl From<Witness<3, Fcc>> for AnyWitness {
    fn from(w: Witness<3, Fcc>) -> Self {
        AnyWitness::Space(w)
    }
}

pub fn witness_to_string<const D: usize, L: Lattice<D>>(w: &Witness<D, L>) -> String {
    let moves: Vec<MoveDto> = w.moves.iter().map(|(c, p)| MoveDto { coord: c.0.to_vec(), to: p.0.to_vec() }).collect();
    let removals: Vec<Vec<i64>> = w.removals.iter().map(|c| c.0.to_vec()).collect();
    let insertions: Vec<Vec<f64>> = w.insertions.iter().map(|p| p.0.to_vec()).collect();
    render_object(vec![
        ("format", compact(WITNESS_FORMAT)),
        ("version", FORMAT_VERSION.to_string()),
        ("dim", D.to_string()),
        ("lattice", compact(L::KIND.name())),
        ("gap", compact(&gap_to(&w.base.defect))),
        ("region", compact(&region_to(&w.region))),
        ("removals", render_list(&removals)),
        ("moves", render_list(&moves)),
        ("insertions", render_list(&insertions)),
        ("provenance", compact(&w.provenance)),
    ])
}

fn witness_from_dto<const D: usize, L: Lattice<D>>(dto: &WitnessDto) -> Result<Witness<D, L>> {
    let removals = dto
        .removals
        .iter()
        .enumerate()
        .map(|(k, c)| coord(c, &format!("removals[{k}]")))
        .collect::<Result<_>>()?;
    let moves = dto
        .moves
        .iter()
        .enumerate()
        .map(|(k, m)| Ok((coord(&m.coord, &format!("moves[{k}].coord"))?, point(&m.to, &format!("moves[{k}].to"))?)))
        .collect::<Result<_>>()?;
    let insertions = dto
        .insertions
        .iter()
        .enumerate()
        .map(|(k, p)| point(p, &format!("insertions[{k}]")))
        .collect::<Result<_>>()?;
    Ok(Witness {
        base: DefectivePacking::new(gap_from(&dto.gap)?),
        region: region_from(&dto.region)?,
        removals,
        moves,
        insertions,
        provenance: dto.provenance.clone(),
    })
}

pub fn parse_witness(text: &str) -> Result<AnyWitness> {
    let kind = header(text, WITNESS_FORMAT)?;
    let dto: WitnessDto = serde_json::from_str(text).map_err(json_err)?;
    Ok(match kind {
        LatticeKind::Honeycomb => AnyWitness::Plane(witness_from_dto(&dto)?),
        LatticeKind::Fcc => AnyWitness::Space(witness_from_dto(&dto)?),
    })
}

pub fn write_witness<const D: usize, L: Lattice<D>>(path: impl AsRef<Path>, w: &Witness<D, L>) -> Result<()> {
    std::fs::write(path, witness_to_string(w))?;
    Ok(())
}

pub fn read_witness(path: impl AsRef<Path>) -> Result<AnyWitness> {
    parse_witness(&std::fs::read_to_string(path)?)
}

/// A finite window of centers, with lattice identity where known.
#[derive(Clone, Debug, PartialEq)]
pub struct PatchFile<const D: usize, L: Lattice<D>> {
    pub packing: DefectivePacking<D, L>,
    pub region: Region<D>,
    pub centers: Vec<(Option<LatticeCoord<D>>, Point<D>)>,
}

impl<const D: usize, L: Lattice<D>> PatchFile<D, L> {
    pub fn from_patch(patch: &PackingPatch<D, L>) -> Self {
        let centers = patch.iter().map(|(_, e)| (e.coord, e.pos)).collect();
        PatchFile { packing: *patch.packing(), region: *patch.region(), centers }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum AnyPatch {
    Plane(PatchFile<2, Honeycomb>),
    Space(PatchFile<3, Fcc>),
}

pub fn patch_to_string<const D: usize, L: Lattice<D>>(p: &PatchFile<D, L>) -> String {
    let centers: Vec<CenterDto> =
        p.centers.iter().map(|(c, x)| CenterDto { coord: c.map(|c| c.0.to_vec()), at: x.0.to_vec() }).collect();
    render_object(vec![
        ("format", compact(PATCH_FORMAT)),
        ("version", FORMAT_VERSION.to_string()),
        ("dim", D.to_string()),
        ("lattice", compact(L::KIND.name())),
        ("gap", compact(&gap_to(&p.packing.defect))),
        ("region", compact(&region_to(&p.region))),
        ("centers", render_list(&centers)),
    ])
}

fn patch_from_dto<const D: usize, L: Lattice<D>>(dto: &PatchDto) -> Result<PatchFile<D, L>> {
    let centers = dto
        .centers
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let id = match &c.coord {
                Some(v) => Some(coord(v, &format!("centers[{k}].coord"))?),
                None => None,
            };
            Ok((id, point(&c.at, &format!("centers[{k}].at"))?))
        })
        .collect::<Result<_>>()?;
    Ok(PatchFile { packing: DefectivePacking::new(gap_from(&dto.gap)?), region: region_from(&dto.region)?, centers })
}

pub fn parse_patch(text: &str) -> Result<AnyPatch> {
    let kind = header(text, PATCH_FORMAT)?;
    let dto: PatchDto = serde_json::from_str(text).map_err(json_err)?;
    Ok(match kind {
        LatticeKind::Honeycomb => AnyPatch::Plane(patch_from_dto(&dto)?),
        LatticeKind::Fcc => AnyPatch::Space(patch_from_dto(&dto)?),
    })
}

/// Either file kind that can be rendered.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyScene {
    Witness(AnyWitness),
    Patch(AnyPatch),
}

/// Reads a witness or a patch file, dispatching on its `format` field.
pub fn parse_scene(text: &str) -> Result<AnyScene> {
    #[derive(Deserialize)]
    struct Tag {
        format: String,
    }
    let tag: Tag = serde_json::from_str(text).map_err(json_err)?;
    match tag.format.as_str() {
        WITNESS_FORMAT => parse_witness(text).map(AnyScene::Witness),
        PATCH_FORMAT => parse_patch(text).map(AnyScene::Patch),
        other => Err(field_err("format", format!("cannot render \"{other}\" files"))),
    }
}

pub fn schedule_to_string<const D: usize, L: Lattice<D>>(s: &WidenSchedule<D>) -> String {
    let stages: Vec<StageDto> = s
        .stages
        .iter()
        .map(|st| StageDto {
            index: st.index,
            moves: st
                .moves
                .iter()
                .map(|m| RoleMoveDto { role: m.role.clone(), direction: m.direction.0.to_vec(), distance: m.distance })
                .collect(),
        })
        .collect();
    let family: Vec<BlockDto> = s
        .family
        .roles
        .iter()
        .map(|(r, b)| BlockDto { role: r.clone(), members: b.members().iter().map(|c| c.0.to_vec()).collect() })
        .collect();
    render_object(vec![
        ("format", compact(SCHEDULE_FORMAT)),
        ("version", FORMAT_VERSION.to_string()),
        ("dim", D.to_string()),
        ("lattice", compact(L::KIND.name())),
        ("gap", compact(&gap_to(&s.family.gap))),
        ("delta", compact(&s.delta)),
        ("removed", compact(&s.removed.map(|c| c.0.to_vec()))),
        ("stages", render_list(&stages)),
        ("family", render_list(&family)),
    ])
}

/// Reads a schedule for lattice `L`; the file's lattice must match.
pub fn parse_schedule<const D: usize, L: Lattice<D>>(text: &str) -> Result<WidenSchedule<D>> {
    let kind = header(text, SCHEDULE_FORMAT)?;
    if kind != L::KIND {
        return Err(field_err("lattice", format!("expected {}, found {}", L::KIND.name(), kind.name())));
    }
    let dto: ScheduleDto = serde_json::from_str(text).map_err(json_err)?;
    let mut roles = Vec::new();
    for (k, b) in dto.family.iter().enumerate() {
        let members = b
            .members
            .iter()
            .enumerate()
            .map(|(m, c)| coord(c, &format!("family[{k}].members[{m}]")))
            .collect::<Result<Vec<_>>>()?;
        roles.push((b.role.clone(), Block::generic(members)));
    }
    let mut stages = Vec::new();
    for (k, st) in dto.stages.iter().enumerate() {
        let moves = st
            .moves
            .iter()
            .enumerate()
            .map(|(m, mv)| {
                let f = format!("stages[{k}].moves[{m}]");
                RoleMove::new(mv.role.clone(), point(&mv.direction, &f)?, mv.distance).map_err(|e| field_err(&f, e))
            })
            .collect::<Result<_>>()?;
        stages.push(MoveStage { index: st.index, moves });
    }
    let removed = match &dto.removed {
        Some(v) => Some(coord(v, "removed")?),
        None => None,
    };
    if !(dto.delta >= 0.0) {
        return Err(field_err("delta", "must be non-negative"));
    }
    Ok(WidenSchedule { family: BlockFamily { roles, gap: gap_from(&dto.gap)? }, stages, removed, delta: dto.delta })
}
