//! Error type shared across the crate.

/// Errors produced by Hamiltonian construction, wavefunction evaluation,
/// estimation, and optimization.
#[derive(Debug, thiserror::Error)]
pub enum CoreError {
    /// A text Hamiltonian file failed to parse. `line` is 1-based.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// An argument violated a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The requested system size exceeds what the dense representation supports.
    #[error("{what}: {got} qubits exceeds the supported maximum of {max}")]
    TooManyQubits {
        what: &'static str,
        got: usize,
        max: usize,
    },

    /// An operator expected to be Hermitian is not.
    #[error("operator is not Hermitian: {0}")]
    NonHermitian(String),

    /// A configuration lies outside the particle-number mask's support.
    #[error("configuration {0} violates the particle-number constraints")]
    MaskedConfiguration(String),

    /// A linear solve did not reach the required residual.
    #[error("linear solve failed: {0}")]
    SolveFailed(String),

    /// A non-finite number appeared where a finite one is required.
    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    /// A checkpoint file is malformed or inconsistent with the model.
    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, CoreError>;
