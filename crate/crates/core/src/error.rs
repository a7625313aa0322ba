use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("group element does not belong to {expected}: {detail}")]
    ElementShape { expected: String, detail: String },

    #[error("group ring elements live over different groups ({left} vs {right})")]
    SpecMismatch { left: String, right: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("graph failed validation: {0}")]
    Validation(String),

    /// A closed identity-voltage walk is a proper power of a walk whose
    /// voltage has finite order, so the corresponding cycle in the cover
    /// has a non-trivial stabilizer.
    #[error(
        "cycle stabilizer is non-trivial: walk {walk:?} of length {length} is a {power}-fold power \
         of a sub-walk with voltage {voltage} of order {power}"
    )]
    StabilizerViolation {
        walk: Vec<usize>,
        length: usize,
        power: usize,
        voltage: String,
    },

    #[error("integrality violated at order {order}: {detail}")]
    Integrality { order: usize, detail: String },

    #[error("u = {u} is outside the supported domain: {detail}")]
    Domain { u: String, detail: String },

    #[error("quadrature did not converge after {nodes} nodes per axis (last change {last_delta:e})")]
    Convergence { nodes: usize, last_delta: f64 },

    #[error("q mismatch: {left} vs {right}")]
    QMismatch { left: u64, right: u64 },

    #[error("internal invariant broken: {0}")]
    Internal(String),
}
