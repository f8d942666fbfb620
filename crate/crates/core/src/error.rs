use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("lambda = {re}{im:+}i lies on the branch cut of the spectral root (nu = {nu}, |xi|^2 = {k2})")]
    BranchCutViolation { re: f64, im: f64, nu: f64, k2: f64 },
    #[error("viscosity must be positive and finite, got {0}")]
    InvalidViscosity(f64),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid too small: need at least {min} nodes, got {got}")]
    GridTooSmall { min: usize, got: usize },
    #[error("field does not match grid: {0}")]
    ShapeMismatch(String),
    #[error("operation undefined for the zero Fourier mode")]
    ZeroModeUnsupported,
    #[error("boundary matrix is singular (det = {det:e})")]
    SingularB { det: f64 },
    #[error("lambda is at (or numerically at) a pole of the resolvent: {0}")]
    PoleHit(String),
    #[error("lambda = 0 is excluded")]
    ZeroLambda,
    #[error("contour regime mismatch: {0}")]
    InvalidRegime(String),
    #[error("quadrature under-resolved: error estimate {estimate:e} exceeds tolerance {tolerance:e}")]
    QuadratureUnderresolved { estimate: f64, tolerance: f64 },
    #[error("boundary operator violates the structural hypothesis: {0}")]
    HypothesisViolated(String),
    #[error("invalid boundary operator: {0}")]
    InvalidBoundaryOperator(String),
    #[error("incompatible data: {0}")]
    IncompatibleData(String),
    #[error("mode set is not closed under xi -> -xi: {0}")]
    AsymmetricModeSet(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    /// Configuration problems (as opposed to numerical failures).
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidViscosity(_)
                | Error::InvalidGrid(_)
                | Error::GridTooSmall { .. }
                | Error::ShapeMismatch(_)
                | Error::ZeroModeUnsupported
                | Error::ZeroLambda
                | Error::InvalidRegime(_)
                | Error::HypothesisViolated(_)
                | Error::InvalidBoundaryOperator(_)
                | Error::IncompatibleData(_)
                | Error::AsymmetricModeSet(_)
                | Error::InvalidParameter(_)
                | Error::BranchCutViolation { .. }
        )
    }
}

/// Non-fatal diagnostics attached to results.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum Warning {
    /// Field magnitude at the far end of the grid relative to its maximum.
    Truncation { relative_tail: f64 },
    /// Time step large relative to the grid spacing.
    Stability { ratio: f64, comfort: f64 },
    /// Correction applied to make the initial normal component vanish at the wall.
    CompatibilityCorrection { magnitude: f64 },
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Warning::Truncation { relative_tail } => write!(f, "truncation: relative tail {relative_tail:.3e}"),
            Warning::Stability { ratio, comfort } => {
                write!(f, "stability: nu dt/h^2 = {ratio:.3} exceeds {comfort}")
            }
            Warning::CompatibilityCorrection { magnitude } => {
                write!(f, "compatibility correction of size {magnitude:.3e}")
            }
        }
    }
}
