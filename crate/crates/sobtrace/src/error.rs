use std::fmt;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An input slice that must be nonempty was empty.
    EmptyInput,
    /// Two parallel slices differ in length.
    LengthMismatch { left: usize, right: usize },
    /// A value that must be finite was NaN or infinite.
    NonFinite,
    /// Abscissae must be strictly increasing; `index` is the first offender.
    NotIncreasing { index: usize },
    /// Interpolation nodes contain duplicates.
    DegenerateNodes,
    /// B-spline order k = 0 is not defined by the divided-difference formula.
    UnsupportedOrder,
    /// An interval (a, b) with a >= b.
    BadInterval,
    /// Exponent outside the permitted range for the operation.
    BadExponent,
    /// Adaptive quadrature hit the panel cap before converging; carries the
    /// best estimate obtained.
    QuadratureFailure { best: f64 },
    /// Nearest-point query with nothing left outside the given subset.
    Exhausted,
    /// Operation needs more data points than supplied.
    TooFewPoints { needed: usize, got: usize },
    /// Exact enumeration refused above its size guard.
    InstanceTooLarge { limit: usize, got: usize },
    /// Small-set augmentation called on a set that is not small.
    NotApplicable,
    /// The outermost retained grid jets were nonzero, so truncating the
    /// unbounded-side grid would change the extension.
    ZeroTailViolation,
    /// A compactly supported extension was expected but a tail is nonzero.
    NonCompactSupport,
    /// Simplex trace norm needs exactly one more point than the order.
    BadSimplex,
    /// A jet polynomial exceeds the degree bound for its role.
    JetDegreeTooHigh { max_degree: usize, got: usize },
    /// Euler spline window too small for the requested order.
    WindowTooSmall { needed: usize, got: usize },
    /// Subsequence must contain the first and last index of the base sequence.
    BadSubsequence,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyInput => write!(f, "input must be nonempty"),
            Error::LengthMismatch { left, right } => {
                write!(f, "parallel inputs differ in length: {left} vs {right}")
            }
            Error::NonFinite => write!(f, "inputs must be finite"),
            Error::NotIncreasing { index } => {
                write!(f, "abscissae not strictly increasing at index {index}")
            }
            Error::DegenerateNodes => write!(f, "interpolation nodes must be pairwise distinct"),
            Error::UnsupportedOrder => write!(f, "order k = 0 is not supported here"),
            Error::BadInterval => write!(f, "interval endpoints must satisfy a < b"),
            Error::BadExponent => write!(f, "exponent outside the permitted range"),
            Error::QuadratureFailure { best } => {
                write!(f, "quadrature failed to converge (best estimate {best:e})")
            }
            Error::Exhausted => write!(f, "no points remain outside the subset"),
            Error::TooFewPoints { needed, got } => {
                write!(f, "needs at least {needed} points, got {got}")
            }
            Error::InstanceTooLarge { limit, got } => {
                write!(f, "exact enumeration limited to {limit} points, got {got}")
            }
            Error::NotApplicable => write!(f, "operation not applicable to this input"),
            Error::ZeroTailViolation => {
                write!(f, "outermost grid jets are nonzero; grid truncation would be inexact")
            }
            Error::NonCompactSupport => write!(f, "extension does not have compact support"),
            Error::BadSimplex => write!(f, "needs exactly order+1 distinct points"),
            Error::JetDegreeTooHigh { max_degree, got } => {
                write!(f, "jet degree {got} exceeds the bound {max_degree}")
            }
            Error::WindowTooSmall { needed, got } => {
                write!(f, "window half-width {got} too small, needs at least {needed}")
            }
            Error::BadSubsequence => {
                write!(f, "subsequence must be strictly increasing and pin both endpoints")
            }
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
