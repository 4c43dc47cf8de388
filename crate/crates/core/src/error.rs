use thiserror::Error;

/// Errors produced by state construction, measurement evaluation and the
/// closed-form spin-1/2 formulas.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),

    #[error("dimension must be positive")]
    EmptyDimension,

    #[error("operation requires a two-level system, got dimension {0}")]
    NotQubit(usize),

    #[error("not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("vector is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("eigenvectors are not orthonormal (max deviation {0:e})")]
    NotOrthonormal(f64),

    #[error("basis is incomplete: {found} of {expected} vectors")]
    IncompleteBasis { expected: usize, found: usize },

    #[error("Bloch vector length {0} exceeds 1")]
    BlochOutsideBall(f64),

    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("impossible post-selection: probability {0:e}")]
    ImpossiblePostSelection(f64),

    #[error("post-selection impossible after projective measurement of A")]
    AblUndefined,

    #[error("weak value diverges: <f|rho_i|f> = {0:e}")]
    WeakValueDiverges(f64),

    #[error("joint state is already post-selected")]
    AlreadyPostSelected,

    #[error("joint state is not post-selected")]
    NotPostSelected,

    #[error("conditional pointer shift has imaginary part {0:e}")]
    NonRealShift(f64),

    #[error("closed form is singular (denominator {0:e})")]
    Singular(f64),

    #[error("success probability {0} carries no information about the coupling")]
    NoInformation(f64),

    #[error("pointer fidelity bound {0} needs no interaction")]
    NoInteractionNeeded(f64),

    #[error("closed form only defined for beta = 0 (got {0})")]
    RequiresBetaZero(f64),

    #[error("grid [{q_min}, {q_max}] does not cover shift {shift} with 8 spreads of margin")]
    GridTooNarrow { q_min: f64, q_max: f64, shift: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
