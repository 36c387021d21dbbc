use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("state vector norm underflowed")]
    ZeroVector,
    #[error("matrix is not a valid density matrix: {0}")]
    NotDensityMatrix(&'static str),
    #[error("invalid system parameters: {0}")]
    InvalidParams(&'static str),
    #[error("undriven atom: tracking trivial")]
    OmegaZero,
    #[error("fixed states coincide: f(mu) vanishes")]
    DegenerateEigenstates,
    #[error("jump rate underflowed")]
    ZeroRate,
    #[error("integration step {dt} exceeds limit {limit}")]
    StepTooLarge { dt: f64, limit: f64 },
    #[error("record spans {span}, shorter than required {required}")]
    RecordTooShort { span: f64, required: f64 },
    #[error("invalid simulation config: {0}")]
    InvalidConfig(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
