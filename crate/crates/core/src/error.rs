use thiserror::Error;

/// Errors raised by geometric constructions, section evaluation and the
/// numerical routines of the dual machinery.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate span: input vectors are linearly dependent")]
    DegenerateSpan,

    #[error("point set is not full-dimensional (affine rank {rank} < {dim})")]
    NotFullDimensional { rank: usize, dim: usize },

    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("face affine hull contains origin")]
    FaceThroughOrigin,

    #[error("height must be positive, got {0}")]
    NonPositiveHeight(f64),

    #[error("origin is not an interior point of the body")]
    OriginNotInterior,

    #[error("point is not interior to the body")]
    PointNotInterior,

    #[error("degenerate section — perturb direction (vertex {vertex} at distance {distance:e} from the hyperplane)")]
    DegenerateSection { vertex: usize, distance: f64 },

    #[error("ill-conditioned facet {facet}: nearly parallel to the section hyperplane")]
    IllConditionedFacet { facet: usize },

    #[error("cannot find generic direction after {0} rejections")]
    NoGenericDirection(usize),

    #[error("fractional order {q} is an excluded integer; use the classical value (-1)^k h^(k)(0)")]
    ExcludedInteger { q: f64 },

    #[error("fractional order {q} outside the admissible range (-1, {upper})")]
    OrderOutOfRange { q: f64, upper: f64 },

    #[error("tail integral does not converge")]
    DivergentTail,

    #[error("harmonic basis implemented for n=3 only; use odd_part_norm")]
    HarmonicDimension,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
