//! Error type shared by every module of the crate.

use thiserror::Error;

use crate::space::SpaceKind;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("vertex id {id} out of range (mesh has {count} vertices)")]
    InvalidVertex { id: usize, count: usize },

    #[error("element id {id} out of range (mesh has {count} elements)")]
    InvalidElement { id: usize, count: usize },

    #[error("reference coordinates ({xi}, {eta}) lie outside the unit cell")]
    OutsideReferenceCell { xi: f64, eta: f64 },

    #[error("space mismatch: expected {expected:?}, got {found:?}")]
    SpaceMismatch {
        expected: SpaceKind,
        found: SpaceKind,
    },

    #[error("fields live on different meshes")]
    MeshMismatch,

    #[error("coefficient vector has length {found}, space needs {expected}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("non-finite value in {context} (element {element:?})")]
    NonFinite {
        context: &'static str,
        element: Option<usize>,
    },

    #[error("matrix block is not positive definite (pivot {pivot} = {value:e})")]
    SingularBlock { pivot: usize, value: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("numerical abort at step {step} (t = {time}): {source}")]
    Aborted {
        step: usize,
        time: f64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for failures caused by the numerics rather than by bad input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::NonFinite { .. } | Error::SingularBlock { .. } => true,
            Error::Aborted { .. } => true,
            _ => false,
        }
    }
}
