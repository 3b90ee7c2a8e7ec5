//! Upwind discontinuous Galerkin propagator with SSPRK3 time stepping.
//!
//! `L` maps a discontinuous field to the increment of one forward Euler
//! step of `θ_t = −∇·(uθ)`:
//!
//! ```text
//! ∫_e γ Lθ = Δt ∫_e ∇γ·u θ − Δt ∫_∂e γ (u·n_e) θ̃
//! ```
//!
//! with `θ̃` the upwind trace. By default the facet sum runs over interior
//! facets only, which presumes `u·n = 0` on the domain boundary and keeps
//! the total mass fixed for any velocity; [`ExteriorFlux::Upwind`] adds an
//! upwind flux on exterior facets instead. The element mass matrix is
//! inverted once; the mesh is uniform.

use std::borrow::Cow;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::mesh::Side;
use crate::operators::element_mass;
use crate::quadrature::{CellRule, LineRule};
use crate::space::{eval_basis_unchecked, BasisEval, FieldSpace, MAX_LOCAL_DOFS};
use crate::velocity::VelocityField;

/// Facet trace selection.
///
/// Returns `theta_plus` if `un_plus < 0` and `theta_minus` otherwise, a tie
/// included. `un_plus` is the normal velocity measured along the normal
/// pointing into the `+` element, so a negative value means the flow leaves
/// `+` and `theta_plus` is the upstream value.
#[inline]
pub fn upwind_value(theta_plus: f64, theta_minus: f64, un_plus: f64) -> f64 {
    if un_plus < 0.0 {
        theta_plus
    } else {
        theta_minus
    }
}

/// Treatment of facets on the non-periodic domain boundary.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExteriorFlux {
    /// No flux through exterior facets: the domain is closed.
    #[default]
    Closed,
    /// Upwind flux with exterior value 0 on inflow and the interior trace on
    /// outflow; mass leaves wherever the field is non-zero on outflow.
    Upwind,
}

impl ExteriorFlux {
    pub fn name(self) -> &'static str {
        match self {
            ExteriorFlux::Closed => "closed",
            ExteriorFlux::Upwind => "upwind",
        }
    }
}

impl fmt::Display for ExteriorFlux {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExteriorFlux {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed" => Ok(ExteriorFlux::Closed),
            "upwind" => Ok(ExteriorFlux::Upwind),
            _ => Err(Error::Config(format!("unknown exterior flux `{s}`"))),
        }
    }
}

/// Per-stage hook applied by [`Transport::ssprk3_step`].
pub trait StageLimiter {
    fn limit(&mut self, field: &mut Field) -> Result<()>;
}

impl<F: FnMut(&mut Field) -> Result<()>> StageLimiter for F {
    fn limit(&mut self, field: &mut Field) -> Result<()> {
        self(field)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct StepParams {
    pub dt: f64,
    pub limiter_enabled: bool,
}

/// The DG spatial operator `L` on a discontinuous space.
pub struct Transport {
    space: Arc<FieldSpace>,
    velocity: VelocityField,
    exterior: ExteriorFlux,
    inv_mass: DMatrix<f64>,
    cell_rule: CellRule,
    cell_basis: Vec<BasisEval>,
    line_rule: LineRule,
    /// Basis traces at the facet quadrature points, indexed by side.
    traces: [Vec<BasisEval>; 4],
}

fn side_slot(side: Side) -> usize {
    match side {
        Side::Left => 0,
        Side::Right => 1,
        Side::Bottom => 2,
        Side::Top => 3,
    }
}

impl Transport {
    pub fn new(space: Arc<FieldSpace>, velocity: VelocityField) -> Result<Self> {
        let kind = space.kind();
        if !kind.is_discontinuous() {
            return Err(Error::SpaceMismatch {
                expected: kind.discontinuous_envelope(),
                found: kind,
            });
        }
        let inv_mass = element_mass(kind, space.mesh().element_area())
            .try_inverse()
            .ok_or(Error::SingularBlock {
                pivot: 0,
                value: 0.0,
            })?;
        let cell_rule = CellRule::gauss3();
        let cell_basis = cell_rule
            .points
            .iter()
            .map(|&(xi, eta)| eval_basis_unchecked(kind, xi, eta))
            .collect();
        let line_rule = LineRule::gauss3();
        let trace = |side: Side| -> Vec<BasisEval> {
            line_rule
                .points
                .iter()
                .map(|&s| {
                    let (xi, eta) = side.reference_point(s);
                    eval_basis_unchecked(kind, xi, eta)
                })
                .collect()
        };
        let traces = [
            trace(Side::Left),
            trace(Side::Right),
            trace(Side::Bottom),
            trace(Side::Top),
        ];
        Ok(Transport {
            space,
            velocity,
            exterior: ExteriorFlux::default(),
            inv_mass,
            cell_rule,
            cell_basis,
            line_rule,
            traces,
        })
    }

    /// Use `exterior` on the non-periodic boundary.
    pub fn with_exterior_flux(mut self, exterior: ExteriorFlux) -> Self {
        self.exterior = exterior;
        self
    }

    pub fn exterior_flux(&self) -> ExteriorFlux {
        self.exterior
    }

    pub fn space(&self) -> &Arc<FieldSpace> {
        &self.space
    }

    pub fn velocity(&self) -> VelocityField {
        self.velocity
    }

    /// `Lθ` for velocity at time `t` and step `dt`.
    pub fn apply_l(&self, theta: &Field, t: f64, dt: f64) -> Result<Field> {
        self.check_space(theta)?;
        let mut out = vec![0.0; self.space.num_dofs()];
        self.apply_l_into(theta.coeffs(), t, dt, &mut out);
        Ok(Field::from_parts(self.space.clone(), out))
    }

    fn check_space(&self, theta: &Field) -> Result<()> {
        if !theta.space().same_as(&self.space) {
            return Err(Error::SpaceMismatch {
                expected: self.space.kind(),
                found: theta.space().kind(),
            });
        }
        Ok(())
    }

    fn trace_value(basis: &BasisEval, coeffs: &[f64], e: usize) -> f64 {
        let n = basis.len();
        basis
            .values()
            .iter()
            .zip(&coeffs[e * n..(e + 1) * n])
            .map(|(p, c)| p * c)
            .sum()
    }

    /// Breakpoints splitting a facet of element `e` where `u·n` changes sign.
    ///
    /// The upwind trace jumps there, so each piece is integrated separately.
    /// A sign change is detected from the facet end points; for affine
    /// velocities this finds it exactly.
    fn facet_breaks(&self, e: usize, side: Side, normal: [f64; 2], t: f64) -> ([f64; 3], usize) {
        let mesh = self.space.mesh();
        let un = |s: f64| {
            let (xi, eta) = side.reference_point(s);
            let [x, y] = mesh.map_point(e, xi, eta);
            let [u, v] = self.velocity.eval(x, y, t);
            u * normal[0] + v * normal[1]
        };
        let (u0, u1) = (un(0.0), un(1.0));
        if u0 * u1 >= 0.0 {
            return ([0.0, 1.0, 1.0], 1);
        }
        let (mut lo, mut hi) = (0.0, 1.0);
        // secant start, then bisection to round-off
        let mut mid = u0 / (u0 - u1);
        for _ in 0..64 {
            let um = un(mid);
            if um == 0.0 {
                break;
            }
            if (um < 0.0) == (u0 < 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= f64::EPSILON {
                break;
            }
            mid = 0.5 * (lo + hi);
        }
        ([0.0, mid, 1.0], 2)
    }

    /// Quadrature points `(s, weight, rule index)` on the facet pieces; the
    /// rule index is given only on an unsplit facet, where traces are cached.
    fn facet_points<'a>(
        &'a self,
        breaks: &'a [f64],
    ) -> impl Iterator<Item = (f64, f64, Option<usize>)> + 'a {
        let whole = breaks.len() == 2;
        breaks.windows(2).flat_map(move |piece| {
            let (a, b) = (piece[0], piece[1]);
            self.line_rule
                .iter()
                .enumerate()
                .map(move |(q, (sq, w))| (a + (b - a) * sq, w * (b - a), whole.then_some(q)))
        })
    }

    fn trace_basis(&self, side: Side, s: f64, q: Option<usize>) -> Cow<'_, BasisEval> {
        match q {
            Some(q) => Cow::Borrowed(&self.traces[side_slot(side)][q]),
            None => {
                let (xi, eta) = side.reference_point(s);
                Cow::Owned(eval_basis_unchecked(self.space.kind(), xi, eta))
            }
        }
    }

    fn facet_length(&self, side: Side) -> f64 {
        let mesh = self.space.mesh();
        if side.is_vertical() {
            mesh.dy()
        } else {
            mesh.dx()
        }
    }

    /// Residual `Δt(∫∇γ·uθ − ∫_∂ γ u·n θ̃)` for every test function, before
    /// the mass solve. Discontinuous dofs are element-contiguous.
    fn assemble_rhs(&self, coeffs: &[f64], t: f64, dt: f64, rhs: &mut [f64]) {
        let mesh = self.space.mesh();
        let n = self.space.local_dofs();
        let (dx, dy) = (mesh.dx(), mesh.dy());
        let area = mesh.element_area();
        rhs.iter_mut().for_each(|r| *r = 0.0);

        for e in 0..mesh.num_elements() {
            let local = &coeffs[e * n..(e + 1) * n];
            let r = &mut rhs[e * n..(e + 1) * n];
            for ((&(xi, eta), w), basis) in self
                .cell_rule
                .points
                .iter()
                .zip(&self.cell_rule.weights)
                .zip(&self.cell_basis)
            {
                let [x, y] = mesh.map_point(e, xi, eta);
                let [u, v] = self.velocity.eval(x, y, t);
                let theta_q: f64 = basis.values().iter().zip(local).map(|(p, c)| p * c).sum();
                let scale = dt * w * area * theta_q;
                for (rl, g) in r.iter_mut().zip(basis.grads()) {
                    *rl += scale * (g[0] / dx * u + g[1] / dy * v);
                }
            }
        }

        for facet in mesh.interior_facets() {
            let (plus, minus) = (facet.plus, facet.minus);
            let len = self.facet_length(plus.side);
            let [nx, ny] = facet.normal_plus();
            let (breaks, pieces) = self.facet_breaks(plus.element, plus.side, [nx, ny], t);
            for (s, w, q) in self.facet_points(&breaks[..=pieces]) {
                let (xi, eta) = plus.side.reference_point(s);
                let [x, y] = mesh.map_point(plus.element, xi, eta);
                let [u, v] = self.velocity.eval(x, y, t);
                let un = u * nx + v * ny;
                // both sides share the facet parameter
                let bp = self.trace_basis(plus.side, s, q);
                let bm = self.trace_basis(minus.side, s, q);
                let tp = Self::trace_value(&bp, coeffs, plus.element);
                let tm = Self::trace_value(&bm, coeffs, minus.element);
                let flux = dt * w * len * un * upwind_value(tp, tm, -un);
                for (rl, p) in rhs[plus.element * n..(plus.element + 1) * n]
                    .iter_mut()
                    .zip(bp.values())
                {
                    *rl -= flux * p;
                }
                for (rl, p) in rhs[minus.element * n..(minus.element + 1) * n]
                    .iter_mut()
                    .zip(bm.values())
                {
                    *rl += flux * p;
                }
            }
        }

        if self.exterior == ExteriorFlux::Closed {
            return;
        }
        for bf in mesh.boundary_facets() {
            let inner = bf.inner;
            let len = self.facet_length(inner.side);
            let [nx, ny] = bf.normal;
            let (breaks, pieces) = self.facet_breaks(inner.element, inner.side, bf.normal, t);
            for (s, w, q) in self.facet_points(&breaks[..=pieces]) {
                let (xi, eta) = inner.side.reference_point(s);
                let [x, y] = mesh.map_point(inner.element, xi, eta);
                let [u, v] = self.velocity.eval(x, y, t);
                let un = u * nx + v * ny;
                if un <= 0.0 {
                    // inflow carries the exterior value 0
                    continue;
                }
                let b = self.trace_basis(inner.side, s, q);
                let flux = dt * w * len * un * Self::trace_value(&b, coeffs, inner.element);
                for (rl, p) in rhs[inner.element * n..(inner.element + 1) * n]
                    .iter_mut()
                    .zip(b.values())
                {
                    *rl -= flux * p;
                }
            }
        }
    }

    fn apply_l_into(&self, coeffs: &[f64], t: f64, dt: f64, out: &mut [f64]) {
        let n = self.space.local_dofs();
        let mut rhs = vec![0.0; coeffs.len()];
        self.assemble_rhs(coeffs, t, dt, &mut rhs);
        let mut tmp = [0.0; MAX_LOCAL_DOFS];
        for (r, o) in rhs.chunks_exact(n).zip(out.chunks_exact_mut(n)) {
            for (i, ti) in tmp.iter_mut().enumerate().take(n) {
                *ti = (0..n).map(|k| self.inv_mass[(i, k)] * r[k]).sum();
            }
            o.copy_from_slice(&tmp[..n]);
        }
    }

    /// Right-hand side `∫ γ_i Lθ` before the mass solve (exposed for checks).
    pub fn residual(&self, theta: &Field, t: f64, dt: f64) -> Result<Vec<f64>> {
        self.check_space(theta)?;
        let mut rhs = vec![0.0; self.space.num_dofs()];
        self.assemble_rhs(theta.coeffs(), t, dt, &mut rhs);
        Ok(rhs)
    }

    /// One SSPRK3 step from time `t`.
    ///
    /// When a limiter is given it is applied to the input and after each of
    /// the three stages. Stage velocities are taken at `t`, `t + Δt` and
    /// `t + Δt/2`.
    pub fn ssprk3_step(
        &self,
        theta: &Field,
        t: f64,
        dt: f64,
        mut limiter: Option<&mut dyn StageLimiter>,
    ) -> Result<Field> {
        self.check_space(theta)?;
        let mut limit = |f: &mut Field| -> Result<()> {
            if let Some(l) = limiter.as_mut() {
                l.limit(f)?;
            }
            Ok(())
        };
        let n = theta.coeffs().len();
        let mut lbuf = vec![0.0; n];

        let mut base = theta.clone();
        limit(&mut base)?;

        self.apply_l_into(base.coeffs(), t, dt, &mut lbuf);
        let mut phi1 = base.clone();
        for (p, l) in phi1.coeffs_mut().iter_mut().zip(&lbuf) {
            *p += l;
        }
        limit(&mut phi1)?;

        self.apply_l_into(phi1.coeffs(), t + dt, dt, &mut lbuf);
        let mut phi2 = base.clone();
        for ((p, a), l) in phi2.coeffs_mut().iter_mut().zip(phi1.coeffs()).zip(&lbuf) {
            *p = 0.75 * *p + 0.25 * (a + l);
        }
        limit(&mut phi2)?;

        self.apply_l_into(phi2.coeffs(), t + 0.5 * dt, dt, &mut lbuf);
        let mut next = base;
        for ((p, a), l) in next.coeffs_mut().iter_mut().zip(phi2.coeffs()).zip(&lbuf) {
            *p = *p / 3.0 + 2.0 / 3.0 * (a + l);
        }
        limit(&mut next)?;

        if let Some(pos) = next.coeffs().iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: "SSPRK3 step",
                element: Some(pos / self.space.local_dofs()),
            });
        }
        Ok(next)
    }
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::mesh::Mesh;
    use crate::space::SpaceKind;

    fn dg2(nx: usize, ny: usize, periodic: bool) -> Arc<FieldSpace> {
        FieldSpace::new(
            SpaceKind::Dg1Dg2,
            Arc::new(Mesh::unit_square(nx, ny, periodic).unwrap()),
        )
    }

    fn random(space: &Arc<FieldSpace>, seed: u64) -> Field {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = (0..space.num_dofs())
            .map(|_| rng.gen_range(-1.0..1.0))
            .collect();
        Field::new(space.clone(), v).unwrap()
    }

    #[test]
    fn upwind_selection_rule() {
        assert_eq!(upwind_value(2.0, 3.0, -1.0), 2.0);
        assert_eq!(upwind_value(2.0, 3.0, 1.0), 3.0);
        assert_eq!(upwind_value(2.0, 3.0, 0.0), 3.0);
    }

    #[test]
    fn constants_are_conserved() {
        for (vel, periodic) in [
            (VelocityField::Deformational, true),
            (VelocityField::Translation, true),
        ] {
            let s = dg2(5, 4, periodic);
            let tr = Transport::new(s.clone(), vel).unwrap();
            let c = Field::constant(s, 1.3);
            let l = tr.apply_l(&c, 0.1, 0.01).unwrap();
            assert!(l.integral().abs() < 1e-12);
        }
    }

    #[test]
    fn translation_leaves_periodic_constants_fixed() {
        let s = dg2(4, 3, true);
        let tr = Transport::new(s.clone(), VelocityField::Translation).unwrap();
        let c = Field::constant(s, 0.7);
        let next = tr.ssprk3_step(&c, 0.0, 0.05, None).unwrap();
        assert!(next.max_abs_diff(&c).unwrap() < 1e-14);
    }

    #[test]
    fn zero_velocity_is_identity() {
        let s = dg2(3, 3, false);
        let tr = Transport::new(s.clone(), VelocityField::Zero).unwrap();
        let th = random(&s, 5);
        let next = tr.ssprk3_step(&th, 0.0, 0.1, None).unwrap();
        assert_eq!(next.coeffs(), th.coeffs());
    }

    #[test]
    fn operator_is_linear() {
        let s = dg2(4, 4, false);
        let tr = Transport::new(s.clone(), VelocityField::SolidBody).unwrap();
        let a = random(&s, 1);
        let b = random(&s, 2);
        let mut comb = a.clone();
        comb.scale_add(2.0, -3.0, &b).unwrap();
        let la = tr.apply_l(&a, 0.0, 0.01).unwrap();
        let lb = tr.apply_l(&b, 0.0, 0.01).unwrap();
        let mut expect = la;
        expect.scale_add(2.0, -3.0, &lb).unwrap();
        let lc = tr.apply_l(&comb, 0.0, 0.01).unwrap();
        assert!(lc.max_abs_diff(&expect).unwrap() < 1e-12);
    }

    #[test]
    fn conservation_over_a_step_periodic() {
        let s = dg2(6, 5, true);
        let tr = Transport::new(s.clone(), VelocityField::Deformational).unwrap();
        let th = random(&s, 9);
        let next = tr.ssprk3_step(&th, 0.2, 0.002, None).unwrap();
        let m0 = th.integral();
        assert!((next.integral() - m0).abs() <= 1e-12 * th.l2_norm());
    }

    #[test]
    fn two_element_upwind_flux() {
        // u = (1, 0): the interface receives the left value 2.
        let mesh = Arc::new(Mesh::new(2, 1, 2.0, 1.0, false).unwrap());
        let s = FieldSpace::new(SpaceKind::Dg1Dg2, mesh);
        let mut v = vec![2.0; 6];
        v.extend([3.0; 6]);
        let th = Field::new(s.clone(), v).unwrap();
        let tr = Transport::new(s.clone(), VelocityField::Translation)
            .unwrap()
            .with_exterior_flux(ExteriorFlux::Upwind);
        let dt = 0.1;
        let r = tr.residual(&th, 0.0, dt).unwrap();
        // right element, summing its test functions: inflow 2 through x = 1,
        // outflow 3 through x = 2, each across a facet of length 1
        let right: f64 = r[6..].iter().sum();
        assert!((right - dt * (2.0 - 3.0)).abs() < 1e-14);
        // left element: inflow boundary value 0, outflow 2
        let left: f64 = r[..6].iter().sum();
        assert!((left - dt * (0.0 - 2.0)).abs() < 1e-14);

        // closed: only the interface flux remains
        let closed = Transport::new(s, VelocityField::Translation).unwrap();
        let r = closed.residual(&th, 0.0, dt).unwrap();
        assert!((r[6..].iter().sum::<f64>() - dt * 2.0).abs() < 1e-14);
        assert!((r[..6].iter().sum::<f64>() + dt * 2.0).abs() < 1e-14);
    }

    #[test]
    fn closed_boundary_conserves_mass_for_any_velocity() {
        let s = dg2(5, 5, false);
        let th = random(&s, 4);
        let closed = Transport::new(s.clone(), VelocityField::SolidBody).unwrap();
        let next = closed.ssprk3_step(&th, 0.0, 0.02, None).unwrap();
        assert!((next.integral() - th.integral()).abs() <= 1e-14);
        let open = closed.with_exterior_flux(ExteriorFlux::Upwind);
        let leaked = open.ssprk3_step(&th, 0.0, 0.02, None).unwrap();
        assert!((leaked.integral() - th.integral()).abs() > 1e-6);
        assert_eq!(
            "upwind".parse::<ExteriorFlux>().unwrap(),
            ExteriorFlux::Upwind
        );
    }

    #[test]
    fn rejects_continuous_space() {
        let mesh = Arc::new(Mesh::unit_square(2, 2, false).unwrap());
        let s = FieldSpace::new(SpaceKind::Dg1Cg2, mesh);
        assert!(Transport::new(s, VelocityField::SolidBody).is_err());
    }

    #[test]
    fn limiter_hook_runs_four_times() {
        let s = dg2(3, 3, false);
        let tr = Transport::new(s.clone(), VelocityField::SolidBody).unwrap();
        let mut calls = 0;
        let mut hook = |_: &mut Field| -> Result<()> {
            calls += 1;
            Ok(())
        };
        tr.ssprk3_step(&Field::zeros(s), 0.0, 0.01, Some(&mut hook))
            .unwrap();
        assert_eq!(calls, 4);
    }
}
