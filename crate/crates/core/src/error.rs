use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("box sides must be positive, got w={w} h={h}")]
    NonPositiveSize { w: f64, h: f64 },
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("degenerate polygon: vertices are collinear or coincident")]
    Degenerate,
    #[error("covariance is not positive definite")]
    NotPositiveDefinite,
}
