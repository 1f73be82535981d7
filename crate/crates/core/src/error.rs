use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:.3e})")]
    NotPositive { eigenvalue: f64 },

    #[error("invalid subsystem label {0}, expected 1, 2 or 3")]
    InvalidSubsystem(usize),

    #[error("invalid subsystem set {0:?}")]
    InvalidSubsystemSet(Vec<usize>),

    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("not a density matrix: {0}")]
    NotAState(String),

    #[error("invalid canonical parameters: {0}")]
    InvalidParams(String),

    #[error("vanishing pattern matches no SLOCC class: {0}")]
    PatternInconsistent(String),

    #[error("malformed state file: {0}")]
    StateFile(String),
}

pub type Result<T> = std::result::Result<T, Error>;
