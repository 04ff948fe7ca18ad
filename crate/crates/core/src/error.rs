use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("invalid cut: {0}")]
    InvalidCut(String),

    #[error("unknown party label `{0}`")]
    UnknownParty(String),

    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("unknown state family `{0}`")]
    UnknownFamily(String),

    #[error("invalid form: {0}")]
    InvalidForm(String),

    #[error("no locus point found after {attempts} attempts (the locus may be empty)")]
    EmptyOrNotFound { attempts: usize },

    #[error("too many minors ({count}, limit {limit})")]
    TooManyMinors { count: usize, limit: usize },

    #[error("problem size exceeds the desk-scale limit: {0}")]
    ScaleLimit(String),
}

pub type Result<T> = std::result::Result<T, Error>;
