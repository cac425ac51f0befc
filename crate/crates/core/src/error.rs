use thiserror::Error;

pub type Result<T> = std::result::Result<T, FractureError>;

#[derive(Debug, Error)]
pub enum FractureError {
    #[error("crack is not representable on the lattice: {0}")]
    CrackOffLattice(String),

    #[error("snap error {error:.3e} exceeds tolerance {tolerance:.3e} ({what})")]
    SnapTolerance {
        what: String,
        error: f64,
        tolerance: f64,
    },

    #[error("mesh construction failed: {0}")]
    MeshFailure(String),

    #[error(
        "linear solve stalled after {iterations} iterations (relative residual {residual:.3e})"
    )]
    SolveFailure { iterations: usize, residual: f64 },

    #[error("segment is not resolvable as a chain of mesh edges: {0}")]
    SegmentNotOnMesh(String),

    #[error("edge pool of size {size} exceeds the enumeration limit {limit}")]
    PoolTooLarge { size: usize, limit: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("evolution step {step} failed: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<FractureError>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl FractureError {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}
