use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("no retarded point on the worldline for field point {point:?}")]
    NoRetardedPoint { point: [f64; 4] },

    #[error("field point {point:?} lies within {epsilon:e} of the worldline")]
    DegeneratePoint { point: [f64; 4], epsilon: f64 },

    #[error("invalid interval [{lo}, {hi}]: {reason}")]
    InvalidInterval { lo: f64, hi: f64, reason: String },

    #[error("singular template does not match integrand: {0}")]
    SingularMismatch(String),

    #[error("surface tangents are degenerate at parameter {u:?}")]
    DegenerateTangents { u: [f64; 3] },

    #[error("quadrature did not converge: estimate {estimate:e} above target {target:e}")]
    NonConvergent { estimate: f64, target: f64 },

    #[error("slow-variation ratio {ratio:e} on {coordinate} exceeds threshold {threshold:e}")]
    ConditionViolated {
        coordinate: &'static str,
        ratio: f64,
        threshold: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
