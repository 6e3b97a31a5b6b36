use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("scene validation failed: {0}")]
    Validation(String),

    #[error("query on a simplex inside obstacle {0}")]
    InsideObstacle(u32),

    #[error("point {0:?} lies inside obstacle {1}")]
    Containment(Vec<f64>, u32),

    #[error("point {0:?} lies outside the triangulated workspace")]
    OutsideWorkspace(Vec<f64>),

    #[error("unknown obstacle id {0}")]
    UnknownObstacle(u32),

    #[error("invalid label request: {0}")]
    Label(String),

    #[error("robot spec error: {0}")]
    Robot(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(
        "path step {step} skips a region (key point {key_point}); sample the path more densely"
    )]
    Resolution { step: usize, key_point: usize },

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("representations were built over different covers or robots")]
    Provenance,

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit status for the command-line tool: 2 for unreadable or
    /// malformed input, 4 for under-sampled paths, 3 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input(_) | Error::Json(_) | Error::Io(_) => 2,
            Error::Resolution { .. } => 4,
            _ => 3,
        }
    }
}
