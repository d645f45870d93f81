use thiserror::Error;

/// Errors produced anywhere in the certification pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("site {site} out of range for {n_sites} site(s)")]
    SiteOutOfRange { site: usize, n_sites: usize },

    #[error("site {site} appears more than once in a single term")]
    DuplicateSite { site: usize },

    #[error("non-finite entries in {0}")]
    NonFinite(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("invalid model: {0}")]
    Validation(String),

    #[error("unknown builtin model `{name}`; available: {}", available.join(", "))]
    UnknownBuiltin { name: String, available: Vec<&'static str> },

    #[error("missing required parameter `{0}`")]
    MissingParameter(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("operator dimension {required} exceeds the size budget of {limit}")]
    SizeBudget { required: usize, limit: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("operator is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("{label} does not commute with the symmetry (commutator norm {norm:.3e})")]
    NotCommuting { label: String, norm: f64 },

    #[error("symmetry eigenvalues cannot be clustered unambiguously: {0}")]
    AmbiguousClustering(String),

    #[error("operator is not stationary (residual {residual:.3e})")]
    NotStationary { residual: f64 },

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Wraps an error with the name of the pipeline stage that produced it.
    pub fn at_stage(self, stage: &'static str) -> Self {
        Error::Stage { stage, source: Box::new(self) }
    }

    /// The innermost error, with stage labels stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }

    pub fn is_numerical(&self) -> bool {
        matches!(self.root(), Error::Numerical(_) | Error::NonFinite(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Extension for attaching a stage label to any result.
pub(crate) trait StageExt<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T> StageExt<T> for Result<T> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|e| e.at_stage(stage))
    }
}
