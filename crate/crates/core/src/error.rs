use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("radial function out of range at node {node}: rho = {rho}")]
    DegenerateRho { node: usize, rho: f64 },

    #[error("hypersurface is not star-shaped about its center (u = {u} at node {node})")]
    NonStarShaped { node: usize, u: f64 },

    #[error("speed function evaluated at non-positive curvature {x}")]
    NonPositiveCurvature { x: f64 },

    #[error("average Gauss curvature mismatch: direct {direct}, recursion {recursion}")]
    RecursionMismatch { direct: f64, recursion: f64 },

    #[error("convexity lost at t = {t}: min principal curvature {kappa_min}")]
    ConvexityLost { t: f64, kappa_min: f64 },

    #[error("step rejected at t = {t}: {reason}")]
    StepRejected { t: f64, reason: String },

    #[error("sphere fit did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("oscillation series does not cover the fitting window")]
    InsufficientDecay,

    #[error("initial shape is not convex: min principal curvature {kappa_min}")]
    NonConvexShape { kappa_min: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
