//! Certificates of non-complete-saturation and their verifier.
//!
//! The checker rebuilds the final configuration from the witness alone and scans every pair
//! closer than one diameter along the first axis. It shares no code with the search side
//! beyond the lattice closed forms.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use crate::geom::{Lattice, LatticeCoord, Point};
use crate::lattice::{DefectivePacking, Region};

/// Reach around the region within which the background is rebuilt.
pub const RECONSTRUCTION_REACH: f64 = 2.0 + 1e-6;

/// A finite replacement inside `region`: remove some spheres, move some, insert new ones.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness<const D: usize, L: Lattice<D>> {
    pub base: DefectivePacking<D, L>,
    pub region: Region<D>,
    pub removals: Vec<LatticeCoord<D>>,
    pub moves: Vec<(LatticeCoord<D>, Point<D>)>,
    pub insertions: Vec<Point<D>>,
    pub provenance: String,
}

impl<const D: usize, L: Lattice<D>> Witness<D, L> {
    pub fn net_gain(&self) -> i64 {
        self.insertions.len() as i64 - self.removals.len() as i64
    }
}

/// Identity of a sphere in the reconstructed configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum CheckSite<const D: usize> {
    Background(LatticeCoord<D>),
    Moved(LatticeCoord<D>),
    Inserted(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub enum CheckViolation<const D: usize> {
    Overlap { a: CheckSite<D>, b: CheckSite<D>, dist2: f64 },
    RemovalOutsideRegion(LatticeCoord<D>),
    MoveOriginOutsideRegion(LatticeCoord<D>),
    MoveTargetOutsideRegion(LatticeCoord<D>),
    InsertionOutsideRegion(usize),
    DuplicateRemoval(LatticeCoord<D>),
    DuplicateMove(LatticeCoord<D>),
    RemovedAndMoved(LatticeCoord<D>),
    NonFinite(CheckSite<D>),
    InsufficientGain(i64),
}

impl<const D: usize> std::fmt::Display for CheckSite<D> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CheckSite::Background(c) => write!(f, "background {:?}", c.0),
            CheckSite::Moved(c) => write!(f, "moved {:?}", c.0),
            CheckSite::Inserted(k) => write!(f, "insertion #{k}"),
        }
    }
}

impl<const D: usize> std::fmt::Display for CheckViolation<D> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        use CheckViolation::*;
        match self {
            Overlap { a, b, dist2 } => write!(f, "overlap: {a} and {b} at distance {}", dist2.sqrt()),
            RemovalOutsideRegion(c) => write!(f, "removal {:?} lies outside the region", c.0),
            MoveOriginOutsideRegion(c) => write!(f, "moved center {:?} starts outside the region", c.0),
            MoveTargetOutsideRegion(c) => write!(f, "moved center {:?} ends outside the region", c.0),
            InsertionOutsideRegion(k) => write!(f, "insertion #{k} lies outside the region"),
            DuplicateRemoval(c) => write!(f, "{:?} removed twice", c.0),
            DuplicateMove(c) => write!(f, "{:?} moved twice", c.0),
            RemovedAndMoved(c) => write!(f, "{:?} both removed and moved", c.0),
            NonFinite(s) => write!(f, "{s} has a non-finite coordinate"),
            InsufficientGain(g) => write!(f, "net gain {g} is not positive"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport<const D: usize> {
    pub accepted: bool,
    pub net_gain: i64,
    pub violations: Vec<CheckViolation<D>>,
    pub strict_mode: bool,
}

/// Per-coordinate absolute error bound on a stored value.
#[derive(Clone, Copy, Debug)]
struct Bounded<const D: usize> {
    site: CheckSite<D>,
    p: Point<D>,
    err: [f64; D],
}

/// Bound for a lattice center evaluated from its closed form and shifted by the defect.
fn lattice_error<const D: usize>(p: &Point<D>) -> [f64; D] {
    p.0.map(|c| 6.0 * f64::EPSILON * c.abs() + f64::MIN_POSITIVE)
}

/// Bound for a real read back from a shortest round-trip decimal.
fn file_error<const D: usize>(p: &Point<D>) -> [f64; D] {
    p.0.map(|c| f64::EPSILON * c.abs() + f64::MIN_POSITIVE)
}

/// A lower bound on the exact squared distance between the two represented points.
fn dist2_lower<const D: usize>(a: &Bounded<D>, b: &Bounded<D>) -> f64 {
    let mut s = 0.0;
    for k in 0..D {
        let d = a.p.0[k] - b.p.0[k];
        let slack = a.err[k] + b.err[k] + f64::EPSILON * d.abs();
        let lo = (d.abs() - slack).max(0.0);
        s += lo * lo;
    }
    s * (1.0 - 4.0 * f64::EPSILON)
}

pub fn check_witness<const D: usize, L: Lattice<D>>(w: &Witness<D, L>, strict: bool) -> CheckReport<D> {
    const THRESHOLD_SLACK: f64 = 1e-9;
    let threshold = 4.0 - THRESHOLD_SLACK;
    let mut violations = Vec::new();

    let mut removed = BTreeSet::new();
    for &c in &w.removals {
        if !removed.insert(c) {
            violations.push(CheckViolation::DuplicateRemoval(c));
        }
        if !w.region.contains(&w.base.position(c)) {
            violations.push(CheckViolation::RemovalOutsideRegion(c));
        }
    }
    let mut moved = BTreeSet::new();
    for &(c, to) in &w.moves {
        if !moved.insert(c) {
            violations.push(CheckViolation::DuplicateMove(c));
        }
        if removed.contains(&c) {
            violations.push(CheckViolation::RemovedAndMoved(c));
        }
        if !w.region.contains(&w.base.position(c)) {
            violations.push(CheckViolation::MoveOriginOutsideRegion(c));
        }
        if !to.is_finite() {
            violations.push(CheckViolation::NonFinite(CheckSite::Moved(c)));
        } else if !w.region.contains(&to) {
            violations.push(CheckViolation::MoveTargetOutsideRegion(c));
        }
    }
    for (k, p) in w.insertions.iter().enumerate() {
        if !p.is_finite() {
            violations.push(CheckViolation::NonFinite(CheckSite::Inserted(k)));
        } else if !w.region.contains(p) {
            violations.push(CheckViolation::InsertionOutsideRegion(k));
        }
    }

    let outer = w.region.expanded(RECONSTRUCTION_REACH);
    let mut sites: Vec<Bounded<D>> = w
        .base
        .enumerate_centers(&outer)
        .into_iter()
        .filter(|(c, _)| !removed.contains(c) && !moved.contains(c))
        .map(|(c, p)| Bounded { site: CheckSite::Background(c), p, err: lattice_error(&p) })
        .collect();
    sites.extend(
        w.moves
            .iter()
            .filter(|(_, p)| p.is_finite())
            .map(|&(c, p)| Bounded { site: CheckSite::Moved(c), p, err: file_error(&p) }),
    );
    sites.extend(
        w.insertions
            .iter()
            .enumerate()
            .filter(|(_, p)| p.is_finite())
            .map(|(k, &p)| Bounded { site: CheckSite::Inserted(k), p, err: file_error(&p) }),
    );

    // Sweep along the first axis: only pairs closer than one diameter there can overlap.
    sites.sort_by(|a, b| a.p.0[0].partial_cmp(&b.p.0[0]).unwrap_or(Ordering::Equal));
    let mut overlaps = Vec::new();
    for (x, a) in sites.iter().enumerate() {
        for b in &sites[x + 1..] {
            if b.p.0[0] - a.p.0[0] >= 2.0 + 1e-6 {
                break;
            }
            let d2 = crate::geom::dist2(&a.p, &b.p);
            let bad = if strict {
                dist2_lower(a, b) < threshold
            } else {
                d2 < threshold
            };
            if bad {
                let (s, t) = if a.site <= b.site { (a.site, b.site) } else { (b.site, a.site) };
                overlaps.push(CheckViolation::Overlap { a: s, b: t, dist2: d2 });
            }
        }
    }
    violations.extend(overlaps);

    let net_gain = w.net_gain();
    if net_gain < 1 {
        violations.push(CheckViolation::InsufficientGain(net_gain));
    }
    CheckReport { accepted: violations.is_empty(), net_gain, violations, strict_mode: strict }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Honeycomb;
    use crate::lattice::{GapDefect, HoneycombPacking};

    fn single_insertion(d: f64) -> Witness<2, Honeycomb> {
        Witness {
            base: HoneycombPacking::new(GapDefect::new(Point([0.0, 1.0]), 0.0, d).unwrap()),
            region: Region::cube(Point([0.0, 0.0]), 0.5).unwrap(),
            removals: vec![],
            moves: vec![],
            insertions: vec![Point([0.0, 0.0])],
            provenance: String::new(),
        }
    }

    #[test]
    fn tangent_insertion_accepted() {
        let w = single_insertion(2.0);
        for strict in [false, true] {
            let r = check_witness(&w, strict);
            assert!(r.accepted, "{r:?}");
            assert_eq!(r.net_gain, 1);
        }
    }

    #[test]
    fn narrow_gap_rejected() {
        let r = check_witness(&single_insertion(1.9), false);
        assert!(!r.accepted);
        assert!(r.violations.iter().any(|v| matches!(
            v,
            CheckViolation::Overlap { b: CheckSite::Inserted(0), a: CheckSite::Background(c), .. } if c.0 == [0, 0]
        )));
    }

    #[test]
    fn empty_witness_rejected() {
        let mut w = single_insertion(2.0);
        w.insertions.clear();
        let r = check_witness(&w, false);
        assert!(!r.accepted);
        assert_eq!(r.net_gain, 0);
    }

    #[test]
    fn bookkeeping_violations() {
        let mut w = single_insertion(2.0);
        w.region = Region::cube(Point([0.0, 0.0]), 3.0).unwrap();
        w.removals = vec![LatticeCoord([0, -1]), LatticeCoord([0, -1])];
        w.moves = vec![(LatticeCoord([0, -1]), Point([0.0, -2.5]))];
        let r = check_witness(&w, false);
        assert!(r.violations.contains(&CheckViolation::DuplicateRemoval(LatticeCoord([0, -1]))));
        assert!(r.violations.contains(&CheckViolation::RemovedAndMoved(LatticeCoord([0, -1]))));
    }
}
