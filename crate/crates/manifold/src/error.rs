use thiserror::Error;

/// Errors shared by every crate of the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("out of injectivity radius: norm {norm} >= radius {radius}")]
    OutOfInjectivity { norm: f64, radius: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("domain error: distance {distance} from base point is not below radius {radius}")]
    OutsideBall { distance: f64, radius: f64 },
    #[error("range error: {0}")]
    Range(String),
    #[error("numeric error: {0}")]
    Numeric(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("infeasible degree: no admissible degree up to cap {cap}")]
    InfeasibleDegree { cap: u64 },
    #[error("bad theta0: {0}")]
    BadTheta0(String),
    #[error("singular estimate: {0}")]
    Singular(String),
    #[error("branch {index}: {source}")]
    Branch { index: usize, source: Box<Error> },
}

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    pub fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }

    /// True for errors caused by bad caller input rather than by the computation.
    pub fn is_usage(&self) -> bool {
        match self {
            Error::Parse(_) | Error::Validation(_) => true,
            Error::Branch { source, .. } => source.is_usage(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
