use core::fmt;

/// Errors raised by the numerical kernels.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Body constructor rejected its data.
    InvalidBody(&'static str),
    /// Operands live in different dimensions, or a 2D-only path got a 1D body.
    DimensionMismatch { expected: usize, found: usize },
    /// A scalar argument is outside its admissible range.
    InvalidArgument(&'static str),
    /// No interior lattice nodes: the spacing is too coarse for the body.
    EmptyMask,
    /// The interior lattice is not 4-connected.
    DisconnectedMask { components: usize },
    /// Shooting never changed sign inside the eigenvalue bracket.
    BracketFailure { lo: f64, hi: f64 },
    /// Half-line proxy moved by more than the tolerance when the wall moved out.
    TruncationUnstable { lambda: f64, lambda_wider: f64 },
    /// Iteration budget exhausted.
    NoConvergence { iterations: usize, residual: f64 },
    /// Inverse iteration produced a sign-changing vector.
    ModeMixing { min_value: f64 },
    /// Refinement sequence does not contract fast enough.
    SlowConvergence { order: f64 },
    /// Refinement differences do not shrink.
    Stagnation,
    /// Rayleigh quotient of the zero function.
    ZeroDenominator,
    /// Matrix failed the SPD test.
    NotSpd,
    /// The slope grid does not cover the gradients of the primal field.
    SlopeRangeTooSmall { needed: f64, available: f64 },
    /// A Legendre transform was asked of a function with no finite values.
    EmptyCore,
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidBody(why) => write!(f, "invalid body: {why}"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::InvalidArgument(why) => write!(f, "invalid argument: {why}"),
            Error::EmptyMask => f.write_str("interior mask is empty; grid spacing too coarse"),
            Error::DisconnectedMask { components } => {
                write!(f, "interior mask has {components} components; grid spacing too coarse")
            }
            Error::BracketFailure { lo, hi } => {
                write!(f, "no eigenvalue found in bracket [{lo}, {hi}]")
            }
            Error::TruncationUnstable { lambda, lambda_wider } => write!(
                f,
                "half-line truncation unstable: {lambda} vs {lambda_wider} with wider wall"
            ),
            Error::NoConvergence { iterations, residual } => {
                write!(f, "no convergence after {iterations} iterations (residual {residual:e})")
            }
            Error::ModeMixing { min_value } => {
                write!(f, "eigenvector changes sign (min {min_value:e}); mode mixing")
            }
            Error::SlowConvergence { order } => {
                write!(f, "empirical convergence order {order:.3} below required minimum")
            }
            Error::Stagnation => f.write_str("refinement differences do not decrease"),
            Error::ZeroDenominator => f.write_str("rayleigh quotient of the zero function"),
            Error::NotSpd => f.write_str("matrix is not symmetric positive definite"),
            Error::SlopeRangeTooSmall { needed, available } => write!(
                f,
                "slope grid half-width {available} below required {needed}"
            ),
            Error::EmptyCore => f.write_str("function has no finite values"),
        }
    }
}

impl core::error::Error for Error {}
