use thiserror::Error;

/// Errors produced across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("the zero vector (0,0) does not define a lattice direction")]
    ZeroVector,
    #[error("direction set contains duplicate directions")]
    DuplicateDirection,
    #[error("no role assignment satisfies u4 = u1 + u2 ± u3")]
    NoStructure,
    #[error("grid side must be odd and at least 5, got {0}")]
    BadN(i64),
    #[error("not a set of binary uniqueness: {0}")]
    NotUniquenessSet(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite value encountered during iteration {0}")]
    NonFinite(usize),
    #[error("negative radicand {0}: minimum-norm solution not converged or data inconsistent")]
    NegativeRadicand(f64),
    #[error("translation {0:?} lies outside the enlarging region")]
    OutOfRegion((i64, i64)),
    #[error("pixel {0:?} of the ghost region has no coverage entry")]
    InconsistentIndex((i64, i64)),
    #[error("dense factorization is ill-conditioned (estimate {0:.3e})")]
    IllConditioned(f64),
    #[error("projection data is not integer-valued at bin {0}")]
    NonIntegralProjection(usize),
    #[error("unknown fixture name {0:?}")]
    UnknownFixture(String),
    #[error("parse error at line {line}: {msg}")]
    ParseError { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Shorthand for a [`Error::ParseError`] at the given 1-based line
    /// (0 when no line applies).
    pub fn parse(line: usize, msg: impl Into<String>) -> Error {
        Error::ParseError {
            line,
            msg: msg.into(),
        }
    }
}
