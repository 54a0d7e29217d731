use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid basis: {0}")]
    InvalidBasis(String),

    #[error("mode {mode} out of range 1..={modes}")]
    ModeOutOfRange { mode: usize, modes: usize },

    #[error("occupation {occupation:?} not representable with cutoff {cutoff}")]
    OccupationOutOfRange {
        occupation: Vec<usize>,
        cutoff: usize,
    },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("basis mismatch between operands")]
    BasisMismatch,

    #[error("states are not orthonormal: Gram entry ({row}, {col}) deviates by {deviation:.3e}")]
    NotOrthonormal {
        row: usize,
        col: usize,
        deviation: f64,
    },

    #[error("{name} = {value} outside allowed range {range}")]
    ParameterOutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("operator is not a projector: |H^2 - H| = {0:.3e}")]
    NotIdempotent(f64),

    #[error("not a valid density matrix: {0}")]
    InvalidState(String),

    #[error("Knill-Laflamme condition fails with residual {0:.3e}")]
    KnillLaflamme(f64),

    #[error("code is not an eigenspace of the total photon number")]
    NotNumberEigenspace,

    #[error("unknown code '{0}'")]
    UnknownCode(String),

    #[error("invalid code definition: {0}")]
    InvalidCode(String),

    #[error("wrong repeater architecture: expected {expected}")]
    WrongArchitecture { expected: &'static str },

    #[error("integration step too large: halving the step changed the result by {0:.3e}")]
    StepTooLarge(f64),

    #[error("environment cutoff {env} below system cutoff {system}")]
    EnvironmentTooSmall { env: usize, system: usize },

    #[error("empty grid: {0}")]
    EmptyGrid(String),

    #[error("worker pool: {0}")]
    Pool(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
