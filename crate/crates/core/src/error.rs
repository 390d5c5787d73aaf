use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex id {vertex} out of range for a complex with {n_vertices} vertices")]
    VertexOutOfRange { vertex: usize, n_vertices: usize },

    #[error("degenerate simplex {0:?}: repeated vertex")]
    DegenerateSimplex(Vec<usize>),

    #[error("triangle id {id} out of range ({n_triangles} triangles)")]
    TriangleOutOfRange { id: usize, n_triangles: usize },

    #[error("{what} too large for dense computation: {size} (limit {limit})")]
    SizeLimit { what: &'static str, size: usize, limit: usize },

    #[error("trajectory {index}: vertices {from} and {to} are not joined by an edge")]
    InvalidTrajectory { index: usize, from: usize, to: usize },

    #[error("trajectory {index} traverses no edge")]
    EmptyTrajectory { index: usize },

    #[error("diffusion time must be non-negative, got {0}")]
    NegativeTau(f64),

    #[error("matrix exponential action did not converge (achieved relative term size {residual:e})")]
    ExpmNotConverged { residual: f64 },

    #[error("least-squares solver stopped after {iterations} iterations with relative normal residual {residual:e}")]
    LsqNotConverged { iterations: usize, residual: f64 },

    #[error("removing triangle {0} creates no new harmonic direction")]
    DegenerateHole(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("every sampled triangle was degenerate while choosing hole {hole}")]
    InitializationFailed { hole: usize },

    #[error("all points are collinear")]
    Collinear,

    #[error("no path between vertices {from} and {to}")]
    Disconnected { from: usize, to: usize },

    #[error("malformed input: {0}")]
    Format(String),

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Wraps the error with the name of the pipeline stage that produced it.
    pub fn in_stage(self, stage: &'static str) -> Self {
        match self {
            Error::Stage { .. } => self,
            other => Error::Stage { stage, source: Box::new(other) },
        }
    }

    /// The innermost error, skipping stage tags.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }

    pub fn stage_name(&self) -> Option<&'static str> {
        match self {
            Error::Stage { stage, .. } => Some(stage),
            _ => None,
        }
    }

    /// Process exit code: 2 configuration, 3 data, 4 search failure.
    pub fn exit_code(&self) -> i32 {
        match (self.stage_name(), self.root()) {
            (Some("config"), _) => 2,
            (Some("search"), _) => 4,
            (_, Error::InitializationFailed { .. } | Error::LsqNotConverged { .. } | Error::ExpmNotConverged { .. }) => 4,
            (None, Error::InvalidArgument(_)) => 2,
            _ => 3,
        }
    }
}

pub(crate) trait StageExt<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T> StageExt<T> for Result<T> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|e| e.in_stage(stage))
    }
}
