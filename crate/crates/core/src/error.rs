use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("quadrature order {order} exceeds the maximum {max}")]
    QuadratureOrder { order: usize, max: usize },

    #[error("unsupported finite element space: {0}")]
    UnsupportedSpace(String),

    #[error("incompatible spaces: {0}")]
    SpaceMismatch(String),

    #[error("mesh is missing a required tag: {0}")]
    MissingTag(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("matrix is not symmetric positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures raised by the numerics rather than by bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Singular(_) | Error::NotPositiveDefinite(_) | Error::Numerical(_)
        )
    }
}
