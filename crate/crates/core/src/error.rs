use thiserror::Error;

/// Errors shared across the toolkit.
#[derive(Debug, Error)]
pub enum WarpError {
    #[error("spectrum not in the Garding cone Gamma_{order}^+ (first failing order {first_failing})")]
    ConeViolation { order: usize, first_failing: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("unsupported curvature constant c = {0} (must be -1, 0 or 1)")]
    BadCurvature(i32),

    #[error("radius r = {r} outside the manifold domain [0, {r_max})")]
    OutOfDomain { r: f64, r_max: f64 },

    #[error("invalid geometry: {0}")]
    GeometryInvalid(String),

    #[error("unsupported manifold: {0}")]
    UnsupportedManifold(&'static str),

    #[error("assumption violated: {what} at {count} node(s), worst value {worst}")]
    AssumptionViolated {
        what: &'static str,
        count: usize,
        worst: f64,
    },

    #[error("potential lambda' is non-positive at a surface node (min {0})")]
    PotentialSign(f64),

    #[error("flow step rejected: {0}")]
    StepRejected(String),

    #[error("invalid config: {0}")]
    ConfigInvalid(String),
}

pub type Result<T> = std::result::Result<T, WarpError>;
