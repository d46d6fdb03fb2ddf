use thiserror::Error;

/// Errors raised while validating inputs or running the pipelines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown vertex {0}")]
    UnknownVertex(usize),
    #[error("unknown edge {0}")]
    UnknownEdge(usize),
    #[error("unknown face {0}")]
    UnknownFace(usize),
    #[error("face {face}: attaching word is empty")]
    EmptyWord { face: usize },
    #[error("face {face}: attaching word not closed at position {position}")]
    NotClosed { face: usize, position: usize },
    #[error("face {face}: angle count mismatch ({angles} angles for a word of length {length})")]
    AngleCount {
        face: usize,
        angles: usize,
        length: usize,
    },
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("invalid action: {0}")]
    InvalidAction(String),
    #[error("action has an inversion: {0}")]
    Inversion(String),
    #[error("group closure exceeded the cap of {cap} elements")]
    GroupCap { cap: usize },
    #[error("invalid weight: {0}")]
    InvalidWeight(String),
    #[error("edge {0} of the graph carries no angle")]
    UnangledEdge(usize),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("not an immersion: {0}")]
    NotImmersion(String),
    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("pushout: {0}")]
    Pushout(String),
}

pub type Result<T> = std::result::Result<T, Error>;
