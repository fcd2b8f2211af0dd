#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` deliberately rejects NaN.
//! Lattice sphere packings with a hyperplane gap defect: block rearrangements that widen the
//! gap, finite witnesses showing the packing is not completely saturated, and a checker.

pub mod error;
pub mod geom;
pub mod lattice;
pub mod store;
pub mod blocks;
pub mod witness;
pub mod format;
pub mod render;
pub mod rearrange;

pub use error::{CoreError, Result};
pub use geom::{dist2, fcc_point, honeycomb_point, Fcc, Honeycomb, Lattice, LatticeCoord, LatticeKind, Point, ToleranceConfig};
pub use lattice::{defect_shift, DefectivePacking, FccPacking, GapDefect, HoneycombPacking, Region};
pub use store::{PackingPatch, ValidityReport};
pub use witness::{check_witness, CheckReport, CheckSite, CheckViolation, Witness};
pub use format::{parse_scene, parse_witness, read_witness, write_witness, witness_to_string, AnyPatch, AnyScene, AnyWitness, PatchFile};
