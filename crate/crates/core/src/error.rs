use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("operation requires a bipartite state but no bipartition is set")]
    MissingBipartition,
    #[error("matrix is not Hermitian (asymmetry {0:.3e})")]
    NotHermitian(f64),
    #[error("invalid density operator: {0}")]
    InvalidState(String),
    #[error("invalid POVM: {0}")]
    InvalidPovm(String),
    #[error("POVM is not informationally complete (operator-space rank {rank} < {required})")]
    NotInformationallyComplete { rank: usize, required: usize },
    #[error("could not draw an informationally complete POVM after {0} attempts")]
    CompletenessFailure(usize),
    #[error("unsupported dimension: {0}")]
    BadDimension(String),
    #[error("Fock truncation tail {tail:.3e} exceeds {limit:.1e}")]
    TruncationTail { tail: f64, limit: f64 },
    #[error("grid geometries differ")]
    GeometryMismatch,
    #[error("covariance matrix is unphysical (min eigenvalue of sigma + i/4 Omega = {0:.3e})")]
    Unphysical(f64),
    #[error("heterodyne conditioning is singular (ab - z^2 = {0:.3e})")]
    SingularConditioning(f64),
    #[error("heterodyne outcomes share a quadrature value; the peak test would be blind to one of c, d")]
    DegenerateOutcomes,
    #[error("need at least two present conditional states, found {0}")]
    InsufficientOutcomes(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
