use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("boundary function is not differentiable at phi = {phi}")]
    UndefinedPoint { phi: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("mesh generation failed: {0}")]
    MeshFailure(String),

    #[error("degenerate element {index} (signed area {area:e})")]
    DegenerateElement { index: usize, area: f64 },

    #[error("mesh carries no element region markers")]
    MarkerMissing,

    #[error("eigensolver did not converge in {max_iters} iterations (residual {residual:e})")]
    NoConvergence { max_iters: usize, residual: f64 },

    #[error("factorization failed at pivot {pivot}: value {value:e}")]
    SingularFactorization { pivot: usize, value: f64 },

    #[error("solution residual {residual:e} exceeds tolerance {tol:e}")]
    UnconvergedSolution { residual: f64, tol: f64 },

    #[error("quadrature node falls on a polygon vertex at phi = {phi}")]
    PolygonVertexOnQuadraturePoint { phi: f64 },

    #[error("eigenvalue variation {variation:e} is below the noise floor {floor:e}")]
    AmbiguousExtremum { variation: f64, floor: f64 },

    #[error("solve failed at t = {t}: {source}")]
    AtSample { t: f64, source: Box<Error> },

    #[error("{0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
