use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid configuration profile: {0}")]
    InvalidProfile(String),

    #[error("invalid interaction family: {0}")]
    InvalidFamily(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("shape mismatch: {0}")]
    Shape(String),
}

impl Error {
    /// Validation problems are caller mistakes; everything else is a
    /// numeric or capacity failure of an otherwise well-formed request.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidDistribution(_)
                | Error::InvalidProfile(_)
                | Error::InvalidFamily(_)
                | Error::InvalidParams(_)
                | Error::Shape(_)
        )
    }
}
