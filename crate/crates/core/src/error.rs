use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration value failed validation.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// The parametric driving is too strong for the dissipative estimates:
    /// every decay bound needs γ − 2‖g⁽²⁾‖ > 0.
    #[error(
        "strong-damping condition violated: need γ > 2‖g⁽²⁾‖_Cb, got γ = {gamma}, 2‖g⁽²⁾‖_Cb = {twice_parametric}; \
         reduce the sup norm of g2 below {limit}"
    )]
    WeakDamping {
        gamma: f64,
        twice_parametric: f64,
        limit: f64,
    },

    /// A precondition of the requested check does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The step-size controller asked for a step below `dt_min`.
    #[error("step size underflow at t = {t} (‖ψ‖ = {norm}, proposed dt = {dt}); the problem looks stiff")]
    StepUnderflow { t: f64, norm: f64, dt: f64 },

    #[error("fixed-point iteration did not converge after {iterations} iterations (distance trace: {trace:?})")]
    NonConvergence { iterations: usize, trace: Vec<f64> },

    #[error("truncation too small: cutoff {required} needs more than {available} sites per side")]
    TruncationTooSmall { required: usize, available: usize },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerics themselves, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::StepUnderflow { .. } | Error::NonConvergence { .. })
    }
}
