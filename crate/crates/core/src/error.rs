use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("site {site} out of range for {n} qubits")]
    SiteOutOfRange { site: usize, n: usize },

    #[error("qubit count mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("basis index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: u64, dim: u64 },

    #[error("cannot parse Pauli text {text:?}: {reason}")]
    Parse { text: String, reason: String },

    #[error("duplicate site {site} in Pauli text")]
    DuplicateSite { site: usize },

    #[error("invalid lattice parameters: {0}")]
    InvalidLattice(String),

    #[error("face {face} has an odd number ({len}) of distinct vertices")]
    OddFace { face: usize, len: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("operators {first} and {second} do not commute")]
    NonCommuting { first: usize, second: usize },

    #[error("stabilizer group contains -I (relation over generators {relation:?})")]
    MinusIdentity { relation: Vec<usize> },

    #[error("{n} qubits exceeds the limit of {max}")]
    TooManyQubits { n: usize, max: usize },

    #[error(
        "eigensolver did not converge after {iterations} restarts: \
         {converged}/{requested} pairs converged, max residual {max_residual:e}"
    )]
    NotConverged {
        iterations: usize,
        converged: usize,
        requested: usize,
        max_residual: f64,
    },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NotConverged { .. } => 3,
            Error::Invariant(_) | Error::MinusIdentity { .. } => 4,
            Error::Io(_) => 1,
            _ => 2,
        }
    }

    /// Short machine-readable tag for error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::SiteOutOfRange { .. } => "site_out_of_range",
            Error::SizeMismatch { .. } => "size_mismatch",
            Error::IndexOutOfRange { .. } => "index_out_of_range",
            Error::Parse { .. } => "parse",
            Error::DuplicateSite { .. } => "duplicate_site",
            Error::InvalidLattice(_) => "invalid_lattice",
            Error::OddFace { .. } => "odd_face",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::NonCommuting { .. } => "non_commuting",
            Error::MinusIdentity { .. } => "minus_identity",
            Error::TooManyQubits { .. } => "too_many_qubits",
            Error::NotConverged { .. } => "not_converged",
            Error::Invariant(_) => "invariant",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}
