use thiserror::Error;

#[derive(Debug, Error)]
pub enum QracError {
    #[error("site count mismatch: {0} vs {1}")]
    SiteMismatch(usize, usize),
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("dense backend limit exceeded: {sites} sites > limit {limit}")]
    DenseLimit { sites: usize, limit: usize },
    #[error("matrix is not Hermitian (max deviation {0})")]
    NotHermitian(f64),
    #[error("eigensolver failed to converge within {0} sweeps")]
    NoConvergence(usize),
    #[error("expectation value has non-negligible imaginary part {0}")]
    ComplexExpectation(f64),
    #[error("non-real residual phase in Pauli rotation (phase exponent {0})")]
    NonRealPhase(u8),
    #[error("bitstring has length {0}, expected {1}")]
    BadBitstring(usize, usize),
    #[error("input must have odd parity")]
    EvenParity,
    #[error("n must be at least 2, got {0}")]
    BadInstance(usize),
    #[error("bit index {k} out of range 1..={n}")]
    BadIndex { k: usize, n: usize },
    #[error("spectral check failed: {0}")]
    SpectralCheck(String),
    #[error("observable cross-check failed: max deviation {0}")]
    ObservableMismatch(f64),
    #[error("contraction residual {0} above tolerance")]
    ContractionResidual(f64),
    #[error("generator weight {0} exceeds 2")]
    GeneratorWeight(usize),
    #[error("depolarizing rate {0} outside [0, 1)")]
    BadNoiseRate(f64),
    #[error("shots must be at least 1")]
    NoShots,
    #[error("k = l is not a valid commutator pair")]
    EqualIndices,
    #[error("usage: {0}")]
    Usage(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, QracError>;
