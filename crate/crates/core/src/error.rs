use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("degenerate stationary point: {0}")]
    Degenerate(String),
    #[error("stationary points coalesce (xi = 0); use the small-parameter expansion")]
    Coalescence,
    #[error("singular amplitude: {0}")]
    SingularAmplitude(String),
    #[error("sigma quadrature undersampled: {required} samples required, {given} given")]
    Undersampled { required: usize, given: usize },
    #[error("unsupported refraction profile: {0}")]
    UnsupportedProfile(String),
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("test function support escapes the grid")]
    SupportEscapesGrid,
    #[error("Wigner phase is complex for |sigma| > x (sigma = {sigma}, x = {x})")]
    ComplexPhase { sigma: f64, x: f64 },
    #[error("no real stationary point at (x, k) = ({x}, {k})")]
    NoStationaryPoint { x: f64, k: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}
