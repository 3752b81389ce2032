use thiserror::Error;

/// Problems with an instance as given, before any folding question is asked.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LoadError {
    #[error("malformed input at {context}: {message}")]
    Malformed { context: String, message: String },
    #[error(
        "rotation system is not planar: component of `{vertex}` has V={vertices}, E={edges}, F={faces} (V - E + F must be 2)"
    )]
    NonPlanarEmbedding {
        vertex: String,
        vertices: usize,
        edges: usize,
        faces: usize,
    },
    #[error("edge `{edge}` has non-positive length `{length}`")]
    NonPositiveLength { edge: String, length: String },
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
}

impl LoadError {
    pub fn malformed(context: impl Into<String>, message: impl Into<String>) -> Self {
        LoadError::Malformed {
            context: context.into(),
            message: message.into(),
        }
    }
}

/// Failures that are not a property of the instance.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecideError {
    #[error("instance has {angles} angles; the exhaustive search is capped at {limit}")]
    TooLarge { angles: usize, limit: usize },
    /// A self-check failed. This is a bug, never an answer.
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}
