//! Coefficient vectors bound to a [`FieldSpace`].

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature::CellRule;
use crate::space::{eval_basis_unchecked, FieldSpace, MAX_LOCAL_DOFS};

#[derive(Clone, Debug)]
pub struct Field {
    space: Arc<FieldSpace>,
    coeffs: Vec<f64>,
}

impl Field {
    /// Wrap a coefficient vector; it must match the space and be finite.
    pub fn new(space: Arc<FieldSpace>, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != space.num_dofs() {
            return Err(Error::LengthMismatch {
                expected: space.num_dofs(),
                found: coeffs.len(),
            });
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite {
                context: "field coefficients",
                element: None,
            });
        }
        Ok(Field { space, coeffs })
    }

    pub fn zeros(space: Arc<FieldSpace>) -> Self {
        let n = space.num_dofs();
        Field {
            space,
            coeffs: vec![0.0; n],
        }
    }

    pub fn constant(space: Arc<FieldSpace>, value: f64) -> Self {
        let n = space.num_dofs();
        Field {
            space,
            coeffs: vec![value; n],
        }
    }

    /// Nodal interpolant of `f(x, y)`.
    pub fn interpolate(space: Arc<FieldSpace>, f: impl Fn(f64, f64) -> f64) -> Self {
        let coeffs = space
            .dof_positions()
            .iter()
            .map(|p| f(p[0], p[1]))
            .collect();
        Field { space, coeffs }
    }

    pub(crate) fn from_parts(space: Arc<FieldSpace>, coeffs: Vec<f64>) -> Self {
        debug_assert_eq!(coeffs.len(), space.num_dofs());
        Field { space, coeffs }
    }

    pub fn space(&self) -> &Arc<FieldSpace> {
        &self.space
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// Coefficients of element `e` in local order.
    pub fn local(&self, e: usize) -> [f64; MAX_LOCAL_DOFS] {
        let mut out = [0.0; MAX_LOCAL_DOFS];
        for (o, &g) in out.iter_mut().zip(self.space.element_dofs(e)) {
            *o = self.coeffs[g];
        }
        out
    }

    /// Value at reference point `(xi, eta)` of element `e`.
    pub fn evaluate(&self, e: usize, xi: f64, eta: f64) -> f64 {
        let basis = eval_basis_unchecked(self.space.kind(), xi, eta);
        let local = self.local(e);
        basis.values().iter().zip(&local).map(|(p, c)| p * c).sum()
    }

    /// Element average computed with the cell quadrature rule.
    pub fn element_mean(&self, e: usize) -> f64 {
        let rule = CellRule::gauss3();
        rule.points
            .iter()
            .zip(&rule.weights)
            .map(|(&(xi, eta), w)| w * self.evaluate(e, xi, eta))
            .sum()
    }

    /// `∫ θ dx` over the domain.
    pub fn integral(&self) -> f64 {
        let area = self.space.mesh().element_area();
        (0..self.space.mesh().num_elements())
            .map(|e| self.element_mean(e) * area)
            .sum()
    }

    /// `‖θ‖_{L²}` via the cell quadrature rule (exact for every supported space).
    pub fn l2_norm(&self) -> f64 {
        self.l2_distance_to(|_, _| 0.0)
    }

    /// `‖θ − f‖_{L²}` with `f` sampled at cell quadrature points.
    pub fn l2_distance_to(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        let mesh = self.space.mesh();
        let rule = CellRule::gauss3();
        let area = mesh.element_area();
        let mut sum = 0.0;
        for e in 0..mesh.num_elements() {
            for (&(xi, eta), w) in rule.points.iter().zip(&rule.weights) {
                let [x, y] = mesh.map_point(e, xi, eta);
                let d = self.evaluate(e, xi, eta) - f(x, y);
                sum += w * area * d * d;
            }
        }
        sum.sqrt()
    }

    pub fn min_coeff(&self) -> f64 {
        self.coeffs.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_coeff(&self) -> f64 {
        self.coeffs
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    /// `self = alpha * self + beta * other`.
    pub fn scale_add(&mut self, alpha: f64, beta: f64, other: &Field) -> Result<()> {
        self.check_same_space(other)?;
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a = alpha * *a + beta * b;
        }
        Ok(())
    }

    pub fn max_abs_diff(&self, other: &Field) -> Result<f64> {
        self.check_same_space(other)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    pub(crate) fn check_same_space(&self, other: &Field) -> Result<()> {
        if self.space.kind() != other.space.kind() {
            return Err(Error::SpaceMismatch {
                expected: self.space.kind(),
                found: other.space.kind(),
            });
        }
        if !self.space.shares_mesh(&other.space) {
            return Err(Error::MeshMismatch);
        }
        Ok(())
    }
}
