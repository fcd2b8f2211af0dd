//! How many widening iterations are needed, and how large each nested family must be.

use crate::error::{CoreError, Result};

/// Size of the innermost family; its middle block leaves room for the insertion.
pub const FINAL_SIZE: usize = 6;

/// Iterations beyond which planning gives up.
pub const MAX_ITERATIONS: usize = 10_000;

#[derive(Clone, Debug, PartialEq)]
pub struct IterationPlan {
    pub d0: f64,
    pub target: f64,
    /// Gap width before each iteration, followed by the final width (`k + 1` entries).
    pub widths: Vec<f64>,
    /// Family size per iteration, outermost first.
    pub sizes: Vec<usize>,
    pub k: usize,
}

impl IterationPlan {
    pub fn final_width(&self) -> f64 {
        *self.widths.last().expect("widths start with d0")
    }
}

/// Family sizes for `k` nested iterations: the last is `FINAL_SIZE` and each earlier family is
/// large enough that the next one, with two spheres of margin on either side, fits on the
/// base of its middle block (`n_t = 3 n_{t+1} + 6`). Saturates instead of overflowing.
pub fn nested_sizes(k: usize) -> Vec<usize> {
    let mut sizes = vec![0; k];
    let mut n = FINAL_SIZE;
    for t in (0..k).rev() {
        sizes[t] = n;
        n = n.saturating_mul(3).saturating_add(6);
    }
    sizes
}

/// Iterates `d <- d + delta_fn(d)` from `d0` until the width reaches `target`.
pub fn plan_iterations(d0: f64, target: f64, mut delta_fn: impl FnMut(f64) -> Result<f64>) -> Result<IterationPlan> {
    if !(d0 > 0.0) || !d0.is_finite() {
        return Err(CoreError::CannotReachTarget(format!("initial width {d0} must be positive")));
    }
    let mut widths = vec![d0];
    let mut d = d0;
    while d < target {
        if widths.len() > MAX_ITERATIONS {
            return Err(CoreError::ResourceLimit(format!(
                "more than {MAX_ITERATIONS} iterations needed from width {d0}"
            )));
        }
        let delta = delta_fn(d)?;
        if !(delta > 0.0) {
            return Err(CoreError::CannotReachTarget(format!("no widening possible at width {d}")));
        }
        d += delta;
        widths.push(d);
    }
    let k = widths.len() - 1;
    Ok(IterationPlan { d0, target, widths, sizes: nested_sizes(k), k })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn already_wide() {
        let p = plan_iterations(2.0, 2.0, |_| Ok(0.1)).unwrap();
        assert_eq!(p.k, 0);
        assert!(p.sizes.is_empty());
    }

    #[test]
    fn constant_increment() {
        let p = plan_iterations(0.5, 2.0, |_| Ok(0.5)).unwrap();
        assert_eq!(p.k, 3);
        assert_eq!(p.widths, vec![0.5, 1.0, 1.5, 2.0]);
        assert_eq!(p.sizes, vec![78, 24, 6]);
    }

    #[test]
    fn stalls_are_errors() {
        assert!(matches!(plan_iterations(0.5, 2.0, |_| Ok(0.0)), Err(CoreError::CannotReachTarget(_))));
        assert!(plan_iterations(0.0, 2.0, |_| Ok(1.0)).is_err());
    }

    #[test]
    fn nesting_fits() {
        let s = nested_sizes(4);
        assert_eq!(s, vec![240, 78, 24, 6]);
        for w in s.windows(2) {
            assert_eq!(w[0], 3 * w[1] + 6);
            assert_eq!((w[0] - w[1]) % 2, 0);
        }
        assert_eq!(*nested_sizes(200).first().unwrap(), usize::MAX);
    }
}
