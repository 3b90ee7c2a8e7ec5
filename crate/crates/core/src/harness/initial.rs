//! Initial conditions of the three test cases, as analytic functions and as
//! nodal interpolants in `DG1xCG2`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::mesh::Mesh;
use crate::space::{FieldSpace, SpaceKind};

/// Radius of each of the three solid-body shapes.
pub const SOLID_BODY_RADIUS: f64 = 0.15;

/// Slotted cylinder, cone and cosine hump on the unit square.
///
/// Each shape has radius 0.15. The cylinder is centred at `(0.5, 0.75)`
/// with a slot of width 0.05 reaching up to `y = 0.85`; the cone is centred
/// at `(0.5, 0.25)`, the hump at `(0.25, 0.5)`.
pub fn solid_body_value(x: f64, y: f64) -> f64 {
    let r = |cx: f64, cy: f64| ((x - cx).powi(2) + (y - cy).powi(2)).sqrt() / SOLID_BODY_RADIUS;

    let cylinder = r(0.5, 0.75);
    if cylinder <= 1.0 {
        return if (x - 0.5).abs() >= 0.025 || y >= 0.85 {
            1.0
        } else {
            0.0
        };
    }
    let cone = r(0.5, 0.25);
    if cone <= 1.0 {
        return 1.0 - cone;
    }
    let hump = r(0.25, 0.5);
    if hump <= 1.0 {
        return 0.25 * (1.0 + (PI * hump).cos());
    }
    0.0
}

/// `4y(1 − y)`, plus one on the strip `0.2 < x < 0.4`.
pub fn curvy_bump_value(x: f64, y: f64) -> f64 {
    let base = 4.0 * y * (1.0 - y);
    if x > 0.2 && x < 0.4 {
        base + 1.0
    } else {
        base
    }
}

/// Reading of the deformational-flow initial condition.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IcVariant {
    /// `0.25 (1 + cos r)`, `r = min(0.2, d / 0.2)`: a plateau of
    /// `0.25 (1 + cos 0.2)` with a small bump of radius 0.04.
    #[default]
    Verbatim,
    /// The standard cosine bell `0.25 (1 + cos(π r))`, `r = min(1, d / 0.2)`.
    Cospi,
}

impl IcVariant {
    pub fn name(self) -> &'static str {
        match self {
            IcVariant::Verbatim => "verbatim",
            IcVariant::Cospi => "cospi",
        }
    }
}

impl fmt::Display for IcVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IcVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "verbatim" => Ok(IcVariant::Verbatim),
            "cospi" => Ok(IcVariant::Cospi),
            _ => Err(Error::Config(format!(
                "unknown initial-condition variant `{s}`"
            ))),
        }
    }
}

/// Bell centred at `(0.3, 0.5)`; `x` is taken periodically on `[0, 1)`.
pub fn deformational_value(x: f64, y: f64, variant: IcVariant) -> f64 {
    // nearest periodic image of the centre
    let dx = (x - 0.3) - (x - 0.3).round();
    let d = (dx * dx + (y - 0.5).powi(2)).sqrt();
    match variant {
        IcVariant::Verbatim => 0.25 * (1.0 + (d / 0.2).min(0.2).cos()),
        IcVariant::Cospi => 0.25 * (1.0 + (PI * (d / 0.2).min(1.0)).cos()),
    }
}

fn cg_space(mesh: &Arc<Mesh>) -> Arc<FieldSpace> {
    FieldSpace::new(SpaceKind::Dg1Cg2, mesh.clone())
}

pub fn init_solid_body(mesh: &Arc<Mesh>) -> Field {
    Field::interpolate(cg_space(mesh), solid_body_value)
}

pub fn init_curvy_bump(mesh: &Arc<Mesh>) -> Field {
    Field::interpolate(cg_space(mesh), curvy_bump_value)
}

pub fn init_deformational(mesh: &Arc<Mesh>, variant: IcVariant) -> Field {
    Field::interpolate(cg_space(mesh), |x, y| deformational_value(x, y, variant))
}

/// `‖θ − exact‖_{L²}` with the cell quadrature rule.
pub fn l2_error(theta: &Field, exact: impl Fn(f64, f64) -> f64) -> f64 {
    theta.l2_distance_to(exact)
}
