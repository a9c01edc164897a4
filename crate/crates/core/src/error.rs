use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right} qubits")]
    DimensionMismatch { left: usize, right: usize },

    #[error("{qubits} qubits exceeds the dense limit of {limit}")]
    SizeLimit { qubits: usize, limit: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("time {t} outside the evolution window [{start}, {end}]")]
    OutsideWindow { t: f64, start: f64, end: f64 },

    /// All canonical strengths vanish at the requested time; draw a new time.
    #[error("total strength vanishes at t = {0}")]
    ZeroStrength(f64),

    #[error("numerical contract violated: {0}")]
    Numerical(String),

    #[error("operator is not Hermitian: {0}")]
    NotHermitian(String),

    #[error("qubit index {index} out of range for width {width}")]
    QubitOutOfRange { index: usize, width: usize },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for violations of internal numerical contracts (norm drift,
    /// non-convergent oracles), as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Numerical(_))
    }
}
