use thiserror::Error;

/// Errors produced while building meshes, operators and solves.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("index {index} out of range (expected < {bound}) in {context}")]
    Index {
        index: usize,
        bound: usize,
        context: String,
    },

    #[error("degenerate geometry: {0}")]
    Degenerate(String),

    #[error("non-manifold mesh: face {face:?} has {count} incident tetrahedra")]
    NonManifold { face: [usize; 3], count: usize },

    #[error("mass matrix entry {index} is not positive ({value:e})")]
    Positivity { index: usize, value: f64 },

    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotSpd { pivot: usize, value: f64 },

    #[error("eigensolver failed to converge: {0}")]
    Convergence(String),

    #[error("quadratic program failed: {0}")]
    Solver(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
