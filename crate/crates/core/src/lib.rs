//! Embedded discontinuous Galerkin transport for the partially continuous
//! `DG1xCG2` space, with localized limiters.
//!
//! One step of the scheme injects a `DG1xCG2` field into `DG1xDG2`, advances
//! it with an upwind DG discretisation and SSPRK3, and maps it back to
//! `DG1xCG2`. The unlimited scheme uses the L² projection for the last stage;
//! the limited scheme applies a vertex-based slope limiter during the DG step
//! and replaces the projection by an element-based flux-corrected remap, so
//! the step is conservative and locally bounded.

pub mod banded;
pub mod error;
pub mod field;
pub mod harness;
pub mod limiters;
pub mod mesh;
pub mod operators;
pub mod projection;
pub mod quadrature;
pub mod scheme;
pub mod space;
pub mod taylor;
pub mod transport;
pub mod velocity;

pub use error::{Error, Result};
pub use field::Field;
pub use mesh::Mesh;
pub use space::{FieldSpace, SpaceKind};
pub use velocity::VelocityField;
