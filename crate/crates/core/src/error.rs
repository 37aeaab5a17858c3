use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),

    #[error("matrix has no entries")]
    EmptyMatrix,

    #[error("matrix has a non-finite entry")]
    NonFinite,

    #[error("not Hermitian (||A - A*||_F = {0:e})")]
    NotHermitian(f64),

    #[error("not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("negative power of a singular matrix (min eigenvalue {0:e})")]
    SingularForNegativePower(f64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("rank {rank} out of range for dimension {dim}")]
    RankOutOfRange { rank: usize, dim: usize },

    #[error("k = {k} out of range 1..={max}")]
    KOutOfRange { k: usize, max: usize },

    #[error("map does not preserve Hermiticity (Choi defect {0:e})")]
    NotHermiticityPreserving(f64),

    #[error("state is not faithful (min eigenvalue {0:e})")]
    NotFaithful(f64),

    #[error("not a state: {0}")]
    NotAState(String),

    #[error("state too ill-conditioned for modular powers (condition number {0:e})")]
    IllConditioned(f64),

    #[error("beta = {0} outside [0, 1/2]")]
    BetaOutOfRange(f64),

    #[error("component is not {k}-positive (violation value {value:e})")]
    ComponentNotKPositive { k: usize, value: f64 },

    #[error("component is not {k}-copositive (violation value {value:e})")]
    ComponentNotKCopositive { k: usize, value: f64 },

    #[error("detailed-balance system inconsistent (defect {0:e})")]
    InconsistentSystem(f64),

    #[error("vector is not in the natural cone (min eigenvalue {0:e})")]
    NotInNaturalCone(f64),

    #[error("vector is not in P ∩ P^τ")]
    NotInIntersection,

    #[error("vector is not in P (min eigenvalue {0:e})")]
    NotInP(f64),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid document: {0}")]
    InvalidDocument(String),

    #[error("witness of record `{0}` does not re-check")]
    StaleWitness(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
