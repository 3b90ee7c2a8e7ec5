//! Analytic velocity fields of the transport test cases.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::mesh::Mesh;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VelocityField {
    /// Anticlockwise rotation about `(0.5, 0.5)`: `u = (0.5 − y, x − 0.5)`.
    SolidBody,
    /// Uniform translation `u = (1, 0)`.
    Translation,
    /// Time-reversing deformation superposed on a unit translation in x.
    ///
    /// The field is used exactly as defined; it is not divergence free
    /// (`∇·u = −5π(0.5 − t) cos(2π(x − t)) cos(πy)`), so the conservative
    /// and advective forms of the transport equation differ slightly.
    Deformational,
    /// No motion; handy for identity checks.
    Zero,
}

impl VelocityField {
    #[inline]
    pub fn eval(self, x: f64, y: f64, t: f64) -> [f64; 2] {
        match self {
            VelocityField::SolidBody => [0.5 - y, x - 0.5],
            VelocityField::Translation => [1.0, 0.0],
            VelocityField::Deformational => {
                let amp = 5.0 * (0.5 - t);
                let phase = 2.0 * PI * (x - t);
                [
                    1.0 - amp * phase.sin() * (PI * y).cos(),
                    amp * phase.cos() * (PI * y).sin(),
                ]
            }
            VelocityField::Zero => [0.0, 0.0],
        }
    }

    /// Largest speed over the mesh vertices at time `t`.
    ///
    /// Exact for the affine fields, whose speed peaks at the domain corners.
    pub fn max_speed(self, mesh: &Mesh, t: f64) -> f64 {
        (0..mesh.num_vertices())
            .map(|v| {
                let [x, y] = mesh.vertex_position(v);
                let [u, w] = self.eval(x, y, t);
                u.hypot(w)
            })
            .chain(std::iter::once(if mesh.periodic_x() {
                // the seam column at x = lx is not a separate vertex
                (0..=mesh.ny())
                    .map(|j| {
                        let [u, w] = self.eval(mesh.lx(), j as f64 * mesh.dy(), t);
                        u.hypot(w)
                    })
                    .fold(0.0, f64::max)
            } else {
                0.0
            }))
            .fold(0.0, f64::max)
    }

    /// Time step for a Courant number `c = Δt·max|u| / min(dx, dy)`.
    pub fn courant_dt(self, mesh: &Mesh, courant: f64) -> Option<f64> {
        let speed = self.max_speed(mesh, 0.0);
        (speed > 0.0).then(|| courant * mesh.dx().min(mesh.dy()) / speed)
    }

    pub fn name(self) -> &'static str {
        match self {
            VelocityField::SolidBody => "solid_body",
            VelocityField::Translation => "translation",
            VelocityField::Deformational => "deformational",
            VelocityField::Zero => "zero",
        }
    }
}

impl fmt::Display for VelocityField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for VelocityField {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "solid_body" => Ok(VelocityField::SolidBody),
            "translation" => Ok(VelocityField::Translation),
            "deformational" => Ok(VelocityField::Deformational),
            "zero" => Ok(VelocityField::Zero),
            other => Err(format!("unknown velocity field `{other}`")),
        }
    }
}
