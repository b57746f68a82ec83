use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Complex points are carried as `(re, im)` in `f64` so the error type does
/// not depend on the scalar parameter.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("series order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },

    #[error("series with zero constant term is not invertible")]
    NonInvertible,

    #[error("normalization violated: {0}")]
    Normalization(String),

    #[error("composition requires an inner series with zero constant term")]
    CompositionDomain,

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("point ({0:.3e}, {1:.3e}) is at or next to a declared singularity")]
    Domain(f64, f64),

    #[error("dilatation denominator 1 + z h'/h vanishes at ({0:.3e}, {1:.3e})")]
    DegenerateDilatation(f64, f64),

    #[error("unsupported representation: {0}")]
    Unsupported(String),

    #[error("inadmissible dilatation: {0}")]
    InadmissibleDilatation(String),

    #[error("inadmissible starlike function: {0}")]
    InadmissiblePhi(String),

    #[error(
        "quadrature did not converge: last estimate ({:.6e}, {:.6e}), previous ({:.6e}, {:.6e})",
        last.0, last.1, previous.0, previous.1
    )]
    QuadratureFailure { last: (f64, f64), previous: (f64, f64) },

    #[error("unknown map name `{0}`")]
    UnknownMap(String),

    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}
