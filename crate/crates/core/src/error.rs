use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("Heisenberg dimension n must be at least 1")]
    ZeroDimension,

    #[error("scale must be positive and finite, got {0}")]
    NonPositiveScale(f64),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("gauge {gauge} is not available for n = {n}")]
    UnsupportedGauge { gauge: &'static str, n: usize },

    #[error("root finder did not converge: bracket [{lo}, {hi}], residual {residual:e} after {iterations} iterations")]
    NoConvergence {
        lo: f64,
        hi: f64,
        residual: f64,
        iterations: usize,
    },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("unknown gallery map `{0}`")]
    UnknownMap(String),

    #[error("{0}")]
    Incompatible(String),

    #[error("ball of radius {radius} around {center:?} leaves the domain")]
    BallOutsideDomain { center: Vec<f64>, radius: f64 },

    #[error("slice base point outside the complementary lattice")]
    SliceOutOfRange,

    #[error("circle needs at least {min} nodes, got {got}")]
    TooFewNodes { min: usize, got: usize },

    #[error("singular value decomposition failed")]
    SvdFailure,

    #[error("point cloud is empty")]
    EmptyCloud,

    #[error(
        "cloud under-resolved: spacing {spacing:e} exceeds {required:e} \
         (smallest scale {delta_min:e} / {factor})"
    )]
    UnderResolved {
        spacing: f64,
        required: f64,
        delta_min: f64,
        factor: f64,
    },

    #[error("box index overflow at scale {0:e}")]
    BoxIndexOverflow(f64),

    #[error("scale schedule needs at least {min_scales} scales spanning {min_decades} decades; got {scales} spanning {decades:.3}")]
    BadSchedule {
        min_scales: usize,
        min_decades: f64,
        scales: usize,
        decades: f64,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
