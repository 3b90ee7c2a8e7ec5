//! Vertical Taylor split of a `DG1xDG2` element.
//!
//! Along each x node `a` the quadratic in `η` is rewritten in the Taylor
//! basis about the element midline,
//!
//! ```text
//! θ(a, η) = c0[a] + c1[a] (η − ½) + c2[a] ((η − ½)² − 1/12)
//! ```
//!
//! which separates the element mean, the `DG1xDG1` part `θ₁` (same mean and
//! same midline y-derivative as `θ`) and a purely quadratic remainder with
//! zero mean and zero midline derivative. All slopes are with respect to the
//! reference coordinate `η`; divide by `dy` for physical derivatives.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::space::SpaceKind;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TaylorSplit {
    /// Element mean `θ̄`.
    pub mean: f64,
    /// Mean of `θ` along each vertical node line.
    pub line_mean: [f64; 2],
    /// Midline `∂θ/∂η` at each x node.
    pub slope: [f64; 2],
    /// Coefficient of the zero-mean quadratic at each x node.
    pub curvature: [f64; 2],
}

impl TaylorSplit {
    /// Split the six nodal values of a `DG1xDG2` element (`l = 3a + b`).
    pub fn from_nodal(local: &[f64]) -> Self {
        let mut line_mean = [0.0; 2];
        let mut slope = [0.0; 2];
        let mut curvature = [0.0; 2];
        for a in 0..2 {
            let (v0, vm, v1) = (local[3 * a], local[3 * a + 1], local[3 * a + 2]);
            line_mean[a] = (v0 + 4.0 * vm + v1) / 6.0;
            slope[a] = v1 - v0;
            curvature[a] = 2.0 * (v0 - 2.0 * vm + v1);
        }
        TaylorSplit {
            mean: 0.5 * (line_mean[0] + line_mean[1]),
            line_mean,
            slope,
            curvature,
        }
    }

    /// Nodal values of `θ₁` in `DG1xDG1` local order (`l = 2a + b`).
    pub fn linear_part(&self) -> [f64; 4] {
        let mut out = [0.0; 4];
        for a in 0..2 {
            out[2 * a] = self.line_mean[a] - 0.5 * self.slope[a];
            out[2 * a + 1] = self.line_mean[a] + 0.5 * self.slope[a];
        }
        out
    }

    /// Nodal values of `θ − θ₁` in `DG1xDG2` local order.
    pub fn remainder(&self) -> [f64; 6] {
        self.reconstruct(0.0, 0.0, 1.0, 0.0)
    }

    /// Nodal values of
    /// `mean_weight·θ̄ + horizontal·(θ̄(x) − θ̄) + vertical·c1 (η−½) + quadratic·c2 (...)`
    /// where `θ̄(x)` is the line mean interpolated in x.
    fn reconstruct(
        &self,
        horizontal: f64,
        vertical: f64,
        quadratic: f64,
        mean_weight: f64,
    ) -> [f64; 6] {
        let mut out = [0.0; 6];
        for a in 0..2 {
            let base = mean_weight * self.mean + horizontal * (self.line_mean[a] - self.mean);
            for (b, eta) in [0.0, 0.5, 1.0].into_iter().enumerate() {
                let s = eta - 0.5;
                out[3 * a + b] = base
                    + vertical * self.slope[a] * s
                    + quadratic * self.curvature[a] * (s * s - 1.0 / 12.0);
            }
        }
        out
    }

    /// Nodal values of `θ̄ + αh (θ₁ − θ̄)|horiz + αv (θ₁ − θ̄)|vert + αq (θ − θ₁)`.
    pub fn scaled(&self, horizontal: f64, vertical: f64, quadratic: f64) -> [f64; 6] {
        self.reconstruct(horizontal, vertical, quadratic, 1.0)
    }

    /// The original nodal values.
    pub fn nodal(&self) -> [f64; 6] {
        self.scaled(1.0, 1.0, 1.0)
    }

    /// `∂θ/∂η` at the element vertices, `DG1xDG1` order.
    pub fn vertex_slopes(&self) -> [f64; 4] {
        let mut out = [0.0; 4];
        for a in 0..2 {
            // d/dη of c2 ((η−½)² − 1/12) is 2 c2 (η − ½) = ∓ c2 at η = 0, 1
            out[2 * a] = self.slope[a] - self.curvature[a];
            out[2 * a + 1] = self.slope[a] + self.curvature[a];
        }
        out
    }
}

/// Taylor split of element `e` of a `DG1xDG2` field.
pub fn taylor_decompose(theta_hat: &Field, e: usize) -> Result<TaylorSplit> {
    theta_hat.space().expect_kind(SpaceKind::Dg1Dg2)?;
    let count = theta_hat.space().mesh().num_elements();
    if e >= count {
        return Err(Error::InvalidElement { id: e, count });
    }
    Ok(TaylorSplit::from_nodal(&theta_hat.local(e)[..6]))
}
