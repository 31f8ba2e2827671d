use thiserror::Error;

/// Errors raised by lattice, zeta, bound and simulation routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("generator is rank deficient (rank {rank} < {columns} columns)")]
    RankDeficient { rank: usize, columns: usize },

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("enumeration budget of {budget} nodes exceeded")]
    BudgetExceeded { budget: u64 },

    #[error("coarse lattice is not a sublattice of the fine lattice: {0}")]
    NotSublattice(String),

    #[error("message index {index} out of range (number of cosets {cosets})")]
    MessageOutOfRange { index: usize, cosets: usize },

    #[error("randomizer is not a point of the coarse lattice")]
    RandomizerNotInLattice,

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("shifted zeta series diverges: shift a = {a} must be below the shell cut q = {q}")]
    SeriesDivergent { a: f64, q: f64 },

    #[error("series did not reach tolerance {rel_tol:e} within {max_terms} terms")]
    SeriesNotConverged { max_terms: usize, rel_tol: f64 },

    #[error("gamma_e = {gamma} is outside the regime {regime}")]
    OutOfRegime { gamma: f64, regime: String },

    #[error("codeword {index} violates the rank criterion (det(XX*) = {det:e})")]
    RankViolation { index: usize, det: f64 },

    #[error("codeword {index} has a zero component (product distance is zero)")]
    ProductDistanceViolation { index: usize },

    #[error("empty codeword set")]
    EmptyCodewordSet,

    #[error("cannot compare criterion reports: {0}")]
    IncomparableReports(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
