use thiserror::Error;

use crate::lie::NonHomological;

/// Errors raised by the algebra, geometry and cohomology layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("operands live on different charts")]
    ChartMismatch,

    #[error("unknown coordinate `{0}`")]
    UnknownCoordinate(String),

    #[error("coordinate index {index} out of range for a chart of dimension {dim}")]
    CoordinateOutOfRange { index: usize, dim: usize },

    #[error("duplicate coordinate name `{0}`")]
    DuplicateCoordinate(String),

    #[error("coordinate name `{0}` uses the reserved prefix `_`")]
    ReservedName(String),

    #[error("charts support at most {max} coordinates, got {got}")]
    ChartTooLarge { max: usize, got: usize },

    #[error("{context}: value has mixed parity")]
    MixedParity { context: String },

    #[error("{context}: expected {expected} parity")]
    WrongParity { context: String, expected: crate::Parity },

    #[error("signature mismatch: expected ({0}, {1}), found ({2}, {3})")]
    SignatureMismatch(usize, usize, usize, usize),

    #[error("slot out of range: {0}")]
    SlotOutOfRange(String),

    #[error("component {index:?} has parity inconsistent with the tensor parity")]
    ComponentParity { index: Vec<usize> },

    #[error("Christoffel symbol ({k}, {i}, {j}): {reason}")]
    InvalidChristoffel {
        k: String,
        i: String,
        j: String,
        reason: String,
    },

    #[error(transparent)]
    NotHomological(#[from] NonHomological),

    #[error("connection is not flat: {0}")]
    NotFlat(String),

    #[error("structure constants are not antisymmetric at ({k}, {i}, {j})")]
    NotAntisymmetric { k: usize, i: usize, j: usize },

    #[error("Jacobi identity fails for (e{}, e{}, e{}); {report}", .triple.0 + 1, .triple.1 + 1, .triple.2 + 1)]
    Jacobi {
        triple: (usize, usize, usize),
        report: NonHomological,
    },

    #[error("invalid order {order}: {reason}")]
    InvalidOrder { order: usize, reason: String },

    #[error("requires a chart without even coordinates")]
    EvenCoordinatesPresent,

    #[error("differential is not homogeneous in odd degree")]
    NotGraded,

    #[error("linear system too large: {unknowns} unknowns exceeds the cap of {cap}")]
    ResourceCap { unknowns: usize, cap: usize },

    #[error("internal inconsistency: {0}")]
    Internal(String),

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
