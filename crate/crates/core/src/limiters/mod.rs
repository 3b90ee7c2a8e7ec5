//! Limiters for the embedded scheme.
//!
//! - [`slope`]: vertex-based slope limiting of `DG1xDG2` fields, applied
//!   inside the SSPRK3 propagator.
//! - [`fct`]: element-based flux-corrected remap from `DG1xDG2` to
//!   `DG1xCG2`, replacing the L² projection.
//!
//! Both compute per-element correction factors with the same three-branch
//! ratio, see [`correction_factor`].

pub mod fct;
pub mod report;
pub mod slope;

pub use fct::{fct_remap, low_order_remap, FctOutcome, FluxCorrectedRemap};
pub use report::LimiterReport;
pub use slope::{
    limit_dg1xdg2, slope_limit_linear, vertex_bounds_from_means, vertical_quadratic_limit,
    SlopeFactors, SlopeLimiter,
};

/// Where vertex bounds were gathered from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundsSource {
    /// Element means over the elements sharing a mesh vertex.
    ElementMeans,
    /// Nodal values over the elements sharing a `DG1xCG2` dof.
    NodalValues,
}

/// Per-vertex (or per-dof) lower and upper bounds.
#[derive(Clone, Debug)]
pub struct VertexBounds {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
    pub source: BoundsSource,
}

impl VertexBounds {
    pub(crate) fn empty(n: usize, source: BoundsSource) -> Self {
        VertexBounds {
            min: vec![f64::INFINITY; n],
            max: vec![f64::NEG_INFINITY; n],
            source,
        }
    }

    #[inline]
    pub(crate) fn include(&mut self, i: usize, value: f64) {
        self.min[i] = self.min[i].min(value);
        self.max[i] = self.max[i].max(value);
    }

    pub fn len(&self) -> usize {
        self.min.len()
    }

    pub fn is_empty(&self) -> bool {
        self.min.is_empty()
    }

    /// True when `values[i]` lies in `[min_i − tol, max_i + tol]` for all `i`.
    pub fn contains_all(&self, values: &[f64], tol: f64) -> bool {
        values
            .iter()
            .zip(self.min.iter().zip(&self.max))
            .all(|(v, (lo, hi))| *v >= lo - tol && *v <= hi + tol)
    }
}

/// Largest `α ∈ [0, 1]` with `center + α·delta` inside `[lower, upper]`,
/// given as the three-branch ratio on the sign of `delta`.
///
/// `delta` values with `|delta| <= zero_tol` take the neutral branch, and a
/// `delta` overshooting its gap by at most `zero_tol` is accepted whole, so
/// data that touches a bound is not limited by rounding.
#[inline]
pub fn correction_factor(delta: f64, lower_gap: f64, upper_gap: f64, zero_tol: f64) -> f64 {
    let alpha = if delta > zero_tol {
        if delta <= upper_gap + zero_tol {
            1.0
        } else {
            upper_gap / delta
        }
    } else if delta < -zero_tol {
        if delta >= lower_gap - zero_tol {
            1.0
        } else {
            lower_gap / delta
        }
    } else {
        1.0
    };
    alpha.max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_branches() {
        // above: limited by the upper gap
        assert_eq!(correction_factor(2.0, -1.0, 1.0, 0.0), 0.5);
        // flat
        assert_eq!(correction_factor(0.0, -1.0, 1.0, 0.0), 1.0);
        // below: limited by the lower gap
        assert_eq!(correction_factor(-4.0, -1.0, 1.0, 0.0), 0.25);
        // slack
        assert_eq!(correction_factor(0.5, -1.0, 1.0, 0.0), 1.0);
        // an infeasible center is clamped to 0
        assert_eq!(correction_factor(1.0, -1.0, -0.5, 0.0), 0.0);
        // tiny deltas are treated as zero
        assert_eq!(correction_factor(1e-20, 0.0, 0.0, 1e-16), 1.0);
        // an overshoot within the tolerance is rounding
        assert_eq!(correction_factor(1.0 + 1e-17, -1.0, 1.0, 1e-16), 1.0);
        assert_eq!(correction_factor(-1.0 - 1e-17, -1.0, 1.0, 1e-16), 1.0);
    }
}
