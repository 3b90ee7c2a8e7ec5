//! Localized element-based flux-corrected remap `DG1xDG2 → DG1xCG2`.
//!
//! With `θ̂` the discontinuous field, `θ̃` its quadratic-free part,
//! `M_i` the lumped and `M_ij` the consistent `DG1xCG2` mass:
//!
//! - low order: `M_i θᴸ_i = Σ_k Q_ik θ̃_k` (positive weights, bounded);
//! - high order: `Σ_j M_ij θᴴ_j = ∫ φ_i θ̂` (the L² projection);
//! - element contributions
//!   `f_i^e = M_i^e θᴴ_i − Σ_j M_ij^e θᴴ_j + ∫_e φ_i (θ̂ − θ̃)`,
//!   which sum to zero over the dofs of each element;
//! - `θᶜ_i = θᴸ_i + (1/M_i) Σ_e α_e f_i^e` with the largest `α_e ∈ [0, 1]`
//!   keeping every `M_i^e θᴸ_i + α_e f_i^e` inside `M_i^e [θmin_i, θmax_i]`.
//!
//! Bounds are gathered per element from the vertex values of `θ̃`, then
//! reduced over the elements sharing each `DG1xCG2` dof. `θᴸ_i` is a convex
//! combination of exactly those values, so it lies inside its own bounds and
//! `α_e = 0` is always admissible. The slope limiter keeps the vertex values
//! of `θ̃` within the range of the element means, so the remap adds no new
//! extrema to the output of the limited propagator.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::limiters::{correction_factor, BoundsSource, VertexBounds};
use crate::operators::{element_lumped_mass, element_mass, element_mixed_mass, lumped_mass};
use crate::projection::Projector;
use crate::space::{FieldSpace, SpaceKind};
use crate::taylor::TaylorSplit;

/// Relative size of an element contribution below which it counts as zero.
const FLUX_ZERO_TOL: f64 = 1e-14;

/// Everything the remap computes, for diagnostics and tests.
#[derive(Clone, Debug)]
pub struct FctOutcome {
    /// The corrected solution `θᶜ`.
    pub corrected: Field,
    /// The consistent-mass projection `θᴴ`.
    pub high: Field,
    /// The lumped-mass projection of the quadratic-free field, `θᴸ`.
    pub low: Field,
    /// `f_i^e` in local dof order, per element.
    pub fluxes: Vec<[f64; 6]>,
    /// Per-dof bounds.
    pub bounds: VertexBounds,
    /// Per-element correction factors.
    pub alpha: Vec<f64>,
}

/// Precomputed operators for repeated remaps on one mesh.
#[derive(Debug)]
pub struct FluxCorrectedRemap {
    target: Arc<FieldSpace>,
    projector: Projector,
    lumped: Vec<f64>,
    element_lumped: [f64; 6],
    element_mass: DMatrix<f64>,
    /// `∫_e φ_i ψ_k`, `ψ` the `DG1xDG1` basis.
    element_q: DMatrix<f64>,
}

impl FluxCorrectedRemap {
    pub fn new(target: Arc<FieldSpace>) -> Result<Self> {
        target.expect_kind(SpaceKind::Dg1Cg2)?;
        let area = target.mesh().element_area();
        let mut element_lumped = [0.0; 6];
        element_lumped.copy_from_slice(&element_lumped_mass(SpaceKind::Dg1Cg2, area));
        Ok(FluxCorrectedRemap {
            projector: Projector::new(target.clone())?,
            lumped: lumped_mass(&target),
            element_lumped,
            element_mass: element_mass(SpaceKind::Dg1Cg2, area),
            element_q: element_mixed_mass(SpaceKind::Dg1Cg2, SpaceKind::Dg1Dg1, area),
            target,
        })
    }

    pub fn target(&self) -> &Arc<FieldSpace> {
        &self.target
    }

    pub fn projector(&self) -> &Projector {
        &self.projector
    }

    fn splits(&self, theta_hat: &Field) -> Result<Vec<TaylorSplit>> {
        theta_hat.space().expect_kind(SpaceKind::Dg1Dg2)?;
        if !theta_hat.space().shares_mesh(&self.target) {
            return Err(Error::MeshMismatch);
        }
        let ne = self.target.mesh().num_elements();
        Ok((0..ne)
            .map(|e| TaylorSplit::from_nodal(&theta_hat.coeffs()[6 * e..6 * e + 6]))
            .collect())
    }

    fn low_from_splits(&self, splits: &[TaylorSplit]) -> Vec<f64> {
        let mut low = vec![0.0; self.target.num_dofs()];
        for (e, s) in splits.iter().enumerate() {
            let linear = s.linear_part();
            for (i, &g) in self.target.element_dofs(e).iter().enumerate() {
                low[g] += (0..4)
                    .map(|k| self.element_q[(i, k)] * linear[k])
                    .sum::<f64>();
            }
        }
        for (l, m) in low.iter_mut().zip(&self.lumped) {
            *l /= m;
        }
        low
    }

    /// `θᴸ`: lumped projection of the quadratic-free part of `θ̂`.
    pub fn low_order(&self, theta_hat: &Field) -> Result<Field> {
        let s = self.splits(theta_hat)?;
        Ok(Field::from_parts(
            self.target.clone(),
            self.low_from_splits(&s),
        ))
    }

    /// Corrected remap of `θ̂` with all intermediate quantities.
    pub fn remap(&self, theta_hat: &Field) -> Result<FctOutcome> {
        let splits = self.splits(theta_hat)?;
        let high = self.projector.project(theta_hat)?;
        let low = self.low_from_splits(&splits);
        let mesh = self.target.mesh();
        let ne = mesh.num_elements();
        let area = mesh.element_area();

        let scale = theta_hat
            .coeffs()
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        let zero_tol = FLUX_ZERO_TOL * scale * area;

        let mut fluxes = Vec::with_capacity(ne);
        let mut bounds = VertexBounds::empty(self.target.num_dofs(), BoundsSource::NodalValues);
        for (e, s) in splits.iter().enumerate() {
            let dofs = self.target.element_dofs(e);
            let quadratic = s.remainder();
            let mut f = [0.0; 6];
            for (i, fi) in f.iter_mut().enumerate() {
                let mut v = self.element_lumped[i] * high.coeffs()[dofs[i]];
                for (j, &gj) in dofs.iter().enumerate() {
                    v -= self.element_mass[(i, j)] * high.coeffs()[gj];
                    v += self.element_mass[(i, j)] * quadratic[j];
                }
                *fi = v;
            }
            if f.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite {
                    context: "flux-corrected remap contributions",
                    element: Some(e),
                });
            }
            fluxes.push(f);

            let linear = s.linear_part();
            let (lo, hi) = linear
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                    (lo.min(v), hi.max(v))
                });
            for &g in dofs {
                bounds.include(g, lo);
                bounds.include(g, hi);
            }
        }

        let mut alpha = Vec::with_capacity(ne);
        let mut corrected = low.clone();
        for (e, f) in fluxes.iter().enumerate() {
            let dofs = self.target.element_dofs(e);
            let a = dofs
                .iter()
                .zip(f)
                .zip(&self.element_lumped)
                .map(|((&g, &fi), &mi)| {
                    correction_factor(
                        fi,
                        mi * (bounds.min[g] - low[g]),
                        mi * (bounds.max[g] - low[g]),
                        zero_tol,
                    )
                })
                .fold(1.0, f64::min);
            for (&g, &fi) in dofs.iter().zip(f) {
                corrected[g] += a * fi / self.lumped[g];
            }
            alpha.push(a);
        }

        Ok(FctOutcome {
            corrected: Field::from_parts(self.target.clone(), corrected),
            high,
            low: Field::from_parts(self.target.clone(), low),
            fluxes,
            bounds,
            alpha,
        })
    }
}

/// One-shot lumped low-order remap of a `DG1xDG2` field.
pub fn low_order_remap(theta_hat: &Field) -> Result<Field> {
    let target = FieldSpace::new(SpaceKind::Dg1Cg2, theta_hat.space().mesh().clone());
    FluxCorrectedRemap::new(target)?.low_order(theta_hat)
}

/// One-shot flux-corrected remap; returns `θᶜ` and the element factors.
pub fn fct_remap(theta_hat: &Field) -> Result<(Field, Vec<f64>)> {
    let target = FieldSpace::new(SpaceKind::Dg1Cg2, theta_hat.space().mesh().clone());
    let out = FluxCorrectedRemap::new(target)?.remap(theta_hat)?;
    Ok((out.corrected, out.alpha))
}
