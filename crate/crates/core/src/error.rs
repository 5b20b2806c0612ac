use thiserror::Error;

/// Errors raised by the distribution catalog, the analytic calculators and the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AoiError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("queue is unstable: utilization λ/μ = {rho:.6} (λ = {lambda}, μ = {mu}) must be below {limit}")]
    Unstable {
        lambda: f64,
        mu: f64,
        rho: f64,
        limit: f64,
    },

    #[error("infinite second moment of the {which} distribution `{literal}`")]
    InfiniteMoment {
        which: &'static str,
        literal: String,
    },

    #[error("quadrature did not converge: achieved error {achieved:.3e} against tolerance {requested:.3e}")]
    Quadrature { achieved: f64, requested: f64 },

    #[error("root bracket failure on ({lo}, {hi}): residuals {f_lo:.3e} and {f_hi:.3e} do not change sign")]
    Bracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("degenerate queue: P(S < X) = {0:.3e}, age is effectively infinite")]
    Degenerate(f64),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("cannot parse distribution literal `{0}` (expected det, exp, pareto:ALPHA, lognorm:SIGMA or weibull:KAPPA)")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for AoiError {
    fn from(e: std::io::Error) -> Self {
        AoiError::Io(e.to_string())
    }
}

impl From<csv::Error> for AoiError {
    fn from(e: csv::Error) -> Self {
        AoiError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, AoiError>;
