use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vector is numerically zero")]
    ZeroVector,

    #[error("point is not on the Lie quadric (|<k,k>| = {residual:e})")]
    OffQuadric { residual: f64 },

    #[error("invalid {what}: {detail}")]
    Invalid { what: &'static str, detail: String },

    #[error("spanning points of the line are numerically parallel")]
    DegenerateLine,

    #[error("matrix is not orthogonal for the Lie form (residual {residual:e})")]
    NotLieOrthogonal { residual: f64 },

    #[error("function undefined: point within {distance:e} of the pencil base point")]
    AtBasePoint { distance: f64 },

    #[error("degenerate tangent estimate at vertex {vertex}")]
    RankDeficientTangent { vertex: usize },

    #[error("ill-conditioned shape operator fit at vertex {vertex}")]
    IllConditionedFit { vertex: usize },

    #[error("non-manifold complex: {0}")]
    NonManifold(String),

    #[error("mesh error: {0}")]
    Mesh(String),

    #[error("declared Betti sum {declared} but the complex has {computed}")]
    BettiMismatch { declared: usize, computed: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unknown surface `{0}`")]
    UnknownSurface(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn invalid(what: &'static str, detail: impl Into<String>) -> Error {
    Error::Invalid {
        what,
        detail: detail.into(),
    }
}
