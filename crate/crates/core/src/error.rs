use std::path::PathBuf;

/// Errors raised anywhere in the sampling lab.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("qubit count mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("bitstring has length {got}, instance has {expected} qubits")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{what}: {n} qubits exceeds the cap of {cap}")]
    OverCap { what: &'static str, n: usize, cap: usize },

    #[error("instance is not a 1D chain: {0}")]
    NotAChain(String),

    #[error("degenerate instance: {0}")]
    Degenerate(String),

    #[error("empty sample pool")]
    EmptyPool,

    #[error("not enough shots: need {needed}, pool holds {available}")]
    InsufficientShots { needed: u64, available: u64 },

    #[error("ln Z~ = {ln_z_tilde} exceeds exact ln Z = {ln_z}; oracle and pool energies disagree")]
    OracleMismatch { ln_z: f64, ln_z_tilde: f64 },

    #[error("empirical mean energy {empirical} is outside the achievable range [{low}, {high}]")]
    Bracket { empirical: f64, low: f64, high: f64 },

    #[error("ladder did not reach acceptance {target} after {iterations} refinements ({} replicas)", .partial.len())]
    LadderNotConverged { target: f64, iterations: usize, partial: Vec<f64> },

    #[error("parse error in {source_name} at line {line}, column {column}: {message}")]
    Parse { source_name: String, line: usize, column: usize, message: String },

    #[error("{block}: {source}")]
    Block {
        block: String,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// True for errors caused by bad user input rather than a failing computation.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::SizeMismatch { .. }
            | Error::LengthMismatch { .. }
            | Error::InvalidParameter(_)
            | Error::OverCap { .. }
            | Error::NotAChain(_)
            | Error::Parse { .. }
            | Error::Json(_) => true,
            Error::Block { source, .. } => source.is_validation(),
            _ => false,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
