use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// det σ fell below 1/4: the covariance is not physical.
    #[error("uncertainty relation violated: det(sigma) = {d} < 1/4")]
    UncertaintyViolation { d: f64 },

    #[error("variance must be positive: sigma_pp = {sigma_pp}, sigma_qq = {sigma_qq}")]
    NonPositiveVariance { sigma_pp: f64, sigma_qq: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid Laguerre order: n = {n}, alpha = {alpha} (need n + alpha >= 0)")]
    InvalidOrder { n: usize, alpha: i64 },

    #[error("order {order} exceeds the supported maximum {max}")]
    OrderTooLarge { order: usize, max: usize },

    #[error("symplectic frame is degenerate (mu = {mu}, nu = {nu})")]
    DegenerateFrame { mu: f64, nu: f64 },

    #[error("line sampling step {step} exceeds half the grid step {half_grid_step}")]
    GridTooCoarse { step: f64, half_grid_step: f64 },

    #[error("quadrature failed to converge: {what} (last error estimate {estimate:e})")]
    QuadratureFailure { what: String, estimate: f64 },

    #[error("imaginary residual {residual:e} exceeds {limit:e}")]
    ImaginaryResidual { residual: f64, limit: f64 },

    #[error("moment series not converged: estimated error {estimate:e} > tolerance {tolerance:e}")]
    SeriesNotConverged { estimate: f64, tolerance: f64 },

    #[error("angle index {index} (theta = {theta}) received no samples")]
    EmptyAngle { index: usize, theta: f64 },

    #[error("{source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Errors caused by inputs that are well formed but physically or
    /// mathematically inadmissible, as opposed to numerical breakdowns.
    pub fn is_domain_error(&self) -> bool {
        matches!(
            self,
            Error::UncertaintyViolation { .. }
                | Error::NonPositiveVariance { .. }
                | Error::InvalidParameter(_)
                | Error::InvalidOrder { .. }
                | Error::OrderTooLarge { .. }
                | Error::DegenerateFrame { .. }
                | Error::EmptyAngle { .. }
        )
    }

    pub fn is_numerical_failure(&self) -> bool {
        matches!(
            self,
            Error::QuadratureFailure { .. }
                | Error::ImaginaryResidual { .. }
                | Error::SeriesNotConverged { .. }
                | Error::GridTooCoarse { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
