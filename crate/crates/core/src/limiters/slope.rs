//! Vertex-based slope limiter for `DG1xDG2`.
//!
//! Each element is split into mean, `DG1xDG1` part and vertical quadratic
//! (see [`crate::taylor`]). Two factors are computed per element:
//!
//! - `α1`, from the y-derivative: vertex values of `∂θ/∂y` are kept within
//!   the range of the midline derivatives of the elements of the same column
//!   that share the vertex;
//! - `α0`, from `θ₁`: vertex values of `θ̄ + α0 (θ₁ − θ̄)` are kept within
//!   the range of the element means around the vertex.
//!
//! The limited field is `θ̄ + α0·(horizontal part of θ₁ − θ̄)
//! + αv·(vertical part of θ₁ − θ̄) + α1·(θ − θ₁)`. The vertical factor `αv`
//! is `max(α0, α1)`, so smooth vertical profiles (`α1 = 1`) keep their
//! gradient, but it is lowered towards `α0` where that gradient would carry
//! a vertex value of `θ₁` outside the mean bounds.

use crate::error::Result;
use crate::field::Field;
use crate::limiters::{correction_factor, BoundsSource, VertexBounds};
use crate::mesh::Mesh;
use crate::space::SpaceKind;
use crate::taylor::TaylorSplit;
use crate::transport::StageLimiter;

/// Differences below this fraction of the field's scale take the neutral
/// branch of the correction factor.
const ZERO_TOL: f64 = 1e-12;

fn splits(theta_hat: &Field) -> Result<Vec<TaylorSplit>> {
    theta_hat.space().expect_kind(SpaceKind::Dg1Dg2)?;
    let ne = theta_hat.space().mesh().num_elements();
    Ok((0..ne)
        .map(|e| TaylorSplit::from_nodal(&theta_hat.coeffs()[6 * e..6 * e + 6]))
        .collect())
}

fn bounds_from_split_means(splits: &[TaylorSplit], mesh: &Mesh) -> VertexBounds {
    let mut bounds = VertexBounds::empty(mesh.num_vertices(), BoundsSource::ElementMeans);
    for (e, s) in splits.iter().enumerate() {
        for v in mesh.element_vertices(e) {
            bounds.include(v, s.mean);
        }
    }
    bounds
}

/// Max/min of element means over the elements around each mesh vertex.
pub fn vertex_bounds_from_means(theta_hat: &Field) -> Result<VertexBounds> {
    let s = splits(theta_hat)?;
    Ok(bounds_from_split_means(&s, theta_hat.space().mesh()))
}

/// Correction factor `α0` for the linear part of one element.
///
/// `linear` holds the unconstrained vertex values of `θ₁` in the order of
/// [`Mesh::element_vertices`], `vertices` the matching vertex ids.
pub fn slope_limit_linear(
    linear: &[f64; 4],
    mean: f64,
    vertices: &[usize; 4],
    bounds: &VertexBounds,
) -> f64 {
    let scale = linear.iter().fold(mean.abs(), |m, v| m.max(v.abs()));
    linear_factor(linear, mean, vertices, bounds, ZERO_TOL * scale)
}

fn linear_factor(
    linear: &[f64; 4],
    mean: f64,
    vertices: &[usize; 4],
    bounds: &VertexBounds,
    zero_tol: f64,
) -> f64 {
    linear
        .iter()
        .zip(vertices)
        .map(|(&value, &v)| {
            correction_factor(
                value - mean,
                bounds.min[v] - mean,
                bounds.max[v] - mean,
                zero_tol,
            )
        })
        .fold(1.0, f64::min)
}

fn vertical_factors(splits: &[TaylorSplit], mesh: &Mesh) -> Vec<f64> {
    let (nx, ny) = (mesh.nx(), mesh.ny());
    let levels = ny + 1;
    // column-local vertex slots: (column, x node, level)
    let slot = |i: usize, a: usize, level: usize| (i * 2 + a) * levels + level;
    let mut lo = vec![f64::INFINITY; nx * 2 * levels];
    let mut hi = vec![f64::NEG_INFINITY; nx * 2 * levels];
    let scale = splits
        .iter()
        .flat_map(|s| s.slope.iter().chain(&s.curvature))
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let zero_tol = ZERO_TOL * scale;
    for (e, s) in splits.iter().enumerate() {
        let (i, j) = mesh.element_ij(e);
        for a in 0..2 {
            for level in [j, j + 1] {
                let k = slot(i, a, level);
                lo[k] = lo[k].min(s.slope[a]);
                hi[k] = hi[k].max(s.slope[a]);
            }
        }
    }

    splits
        .iter()
        .enumerate()
        .map(|(e, s)| {
            let (i, j) = mesh.element_ij(e);
            let vertex_slopes = s.vertex_slopes();
            let mut alpha: f64 = 1.0;
            for a in 0..2 {
                let center = s.slope[a];
                for b in 0..2 {
                    let k = slot(i, a, j + b);
                    alpha = alpha.min(correction_factor(
                        vertex_slopes[2 * a + b] - center,
                        lo[k] - center,
                        hi[k] - center,
                        zero_tol,
                    ));
                }
            }
            alpha
        })
        .collect()
}

/// Factor of the vertical gradient of `θ₁`: `max(α0, α1)`, reduced where
/// needed so that the vertex values of the limited `θ₁` stay within the
/// mean bounds (`α0` itself always satisfies them).
fn vertical_gradient_factor(
    split: &TaylorSplit,
    a0: f64,
    a1: f64,
    vertices: &[usize; 4],
    bounds: &VertexBounds,
) -> f64 {
    let target = a0.max(a1);
    if target <= a0 {
        return a0;
    }
    let mut av = target;
    for a in 0..2 {
        let horizontal = split.line_mean[a] - split.mean;
        for b in 0..2 {
            let vertical = (b as f64 - 0.5) * split.slope[a];
            let v = vertices[2 * a + b];
            let base = a0 * horizontal;
            if vertical > 0.0 {
                av = av.min((bounds.max[v] - split.mean - base) / vertical);
            } else if vertical < 0.0 {
                av = av.min((bounds.min[v] - split.mean - base) / vertical);
            }
        }
    }
    av.clamp(a0, target)
}

/// Vertical quadratic factors `α1` for every element.
pub fn vertical_quadratic_limit(theta_hat: &Field) -> Result<Vec<f64>> {
    let s = splits(theta_hat)?;
    Ok(vertical_factors(&s, theta_hat.space().mesh()))
}

/// Per-element factors of one slope-limiter application.
#[derive(Clone, Debug, Default)]
pub struct SlopeFactors {
    pub alpha0: Vec<f64>,
    pub alpha1: Vec<f64>,
}

fn limit_in_place(theta_hat: &mut Field) -> Result<SlopeFactors> {
    let s = splits(theta_hat)?;
    let mesh = theta_hat.space().mesh().clone();
    let bounds = bounds_from_split_means(&s, &mesh);
    let alpha1 = vertical_factors(&s, &mesh);
    let mut alpha0 = Vec::with_capacity(s.len());
    let zero_tol = ZERO_TOL
        * theta_hat
            .coeffs()
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
    let coeffs = theta_hat.coeffs_mut();
    for (e, split) in s.iter().enumerate() {
        let a0 = linear_factor(
            &split.linear_part(),
            split.mean,
            &mesh.element_vertices(e),
            &bounds,
            zero_tol,
        );
        let a1 = alpha1[e];
        if a0 < 1.0 || a1 < 1.0 {
            let av = vertical_gradient_factor(split, a0, a1, &mesh.element_vertices(e), &bounds);
            let limited = split.scaled(a0, av, a1);
            coeffs[6 * e..6 * e + 6].copy_from_slice(&limited);
        }
        alpha0.push(a0);
    }
    Ok(SlopeFactors { alpha0, alpha1 })
}

/// Apply the `DG1xDG2` slope limiter, returning the limited field and factors.
pub fn limit_dg1xdg2(theta_hat: &Field) -> Result<(Field, SlopeFactors)> {
    let mut out = theta_hat.clone();
    let factors = limit_in_place(&mut out)?;
    Ok((out, factors))
}

/// Stage hook for the propagator; keeps the factors of its last call.
#[derive(Debug, Default)]
pub struct SlopeLimiter {
    last: SlopeFactors,
}

impl SlopeLimiter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn last_factors(&self) -> &SlopeFactors {
        &self.last
    }
}

impl StageLimiter for SlopeLimiter {
    fn limit(&mut self, field: &mut Field) -> Result<()> {
        self.last = limit_in_place(field)?;
        Ok(())
    }
}
