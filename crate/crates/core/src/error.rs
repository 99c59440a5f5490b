use thiserror::Error;

/// Errors raised by the library. Every fallible public operation returns one of these.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum HtError {
    #[error("scale parameter t must be nonzero and finite")]
    ZeroScale,
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("complex matrix is not H_t-structured (deviation {0:.3e})")]
    NotStructured(f64),
    #[error("zero divisor (norm form {0:.3e})")]
    ZeroDivisor(f64),
    #[error("matrix is singular or ill-conditioned")]
    Singular,
    #[error("matrix is not star-symmetric (deviation {0:.3e})")]
    NotStarSymmetric(f64),
    #[error("matrix is not star-nonnegative: {0}")]
    NotNonnegative(String),
    #[error("eigen decomposition failed")]
    EigenFailure,
    #[error("matrix is not idempotent (deviation {0:.3e})")]
    NotIdempotent(f64),
    #[error("pole at x = {0}")]
    PoleAt(f64),
    #[error("feedthrough D is not invertible")]
    DNotInvertible,
    #[error("realizations are not similar (residual {0:.3e})")]
    NotSimilar(f64),
    #[error("realization is not minimal")]
    NotMinimal,
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("function is not in the requested class: {0}")]
    NotInClass(String),
    #[error("state matrix A must be invertible for circle classes")]
    AInvertibilityRequired,
    #[error("certificate kind mismatch: expected {expected}, found {found}")]
    KindMismatch { expected: String, found: String },
    #[error("projection is not supporting for this realization")]
    NotSupporting,
    #[error("subspace is degenerate for the certificate form")]
    DegenerateSubspace,
    #[error("subspace is not A-invariant (deviation {0:.3e})")]
    NotInvariant(f64),
    #[error("circle factorization needs A, I - A and D invertible")]
    CircleInvertibilityRequired,
    #[error("alpha + alpha^star vanishes")]
    DegenerateAlpha,
    #[error("alpha + beta^star vanishes")]
    DegeneratePair,
    #[error("alpha alpha^star = 1")]
    UnimodularAlpha,
    #[error("spectral radius {0:.6} is not below one")]
    SpectralRadiusTooLarge(f64),
    #[error("Gram matrix is singular")]
    GramSingular,
    #[error("submodule has no free H_t basis")]
    NonFreeSubmodule,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
}

pub type Result<T> = std::result::Result<T, HtError>;
