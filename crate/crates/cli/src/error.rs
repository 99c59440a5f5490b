use ht_rational::HtError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid document: {0}")]
    Invalid(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] HtError),
    #[error("verification failed: largest residual {0:.3e}")]
    VerificationFailed(f64),
}

/// Process exit codes. They are part of the command-line interface and do not change
/// between releases.
pub mod exit {
    pub const OK: i32 = 0;
    pub const CHECK_FAILED: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const IO: i32 = 3;
    pub const PARSE: i32 = 4;
    pub const NOT_MINIMAL: i32 = 10;
    pub const NOT_IN_CLASS: i32 = 11;
    pub const KIND_MISMATCH: i32 = 12;
    pub const DEGENERATE_SUBSPACE: i32 = 13;
    pub const NOT_INVARIANT: i32 = 14;
    pub const POLE: i32 = 15;
    pub const NOT_SUPPORTING: i32 = 16;
    pub const D_NOT_INVERTIBLE: i32 = 17;
    pub const A_NOT_INVERTIBLE: i32 = 18;
    pub const CIRCLE_INVERTIBILITY: i32 = 19;
    pub const NOT_NONNEGATIVE: i32 = 20;
    pub const SPECTRAL_RADIUS: i32 = 21;
    pub const GRAM_SINGULAR: i32 = 22;
    pub const NON_FREE_SUBMODULE: i32 = 23;
    pub const PRECONDITION: i32 = 24;
    pub const SIZE_MISMATCH: i32 = 25;
    pub const NUMERICAL: i32 = 30;
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Invalid(_) => exit::PARSE,
            CliError::Io { .. } => exit::IO,
            CliError::Usage(_) => exit::USAGE,
            CliError::VerificationFailed(_) => exit::CHECK_FAILED,
            CliError::Core(e) => core_code(e),
        }
    }
}

fn core_code(e: &HtError) -> i32 {
    use HtError::*;
    match e {
        NotMinimal => exit::NOT_MINIMAL,
        NotInClass(_) => exit::NOT_IN_CLASS,
        KindMismatch { .. } => exit::KIND_MISMATCH,
        DegenerateSubspace => exit::DEGENERATE_SUBSPACE,
        NotInvariant(_) => exit::NOT_INVARIANT,
        PoleAt(_) => exit::POLE,
        NotSupporting | NotIdempotent(_) => exit::NOT_SUPPORTING,
        DNotInvertible => exit::D_NOT_INVERTIBLE,
        AInvertibilityRequired => exit::A_NOT_INVERTIBLE,
        CircleInvertibilityRequired => exit::CIRCLE_INVERTIBILITY,
        NotNonnegative(_) => exit::NOT_NONNEGATIVE,
        SpectralRadiusTooLarge(_) => exit::SPECTRAL_RADIUS,
        GramSingular => exit::GRAM_SINGULAR,
        NonFreeSubmodule => exit::NON_FREE_SUBMODULE,
        PreconditionViolated(_) | ZeroScale | DegenerateAlpha | DegeneratePair | UnimodularAlpha
        | NotStarSymmetric(_) | NotStructured(_) => exit::PRECONDITION,
        SizeMismatch(_) => exit::SIZE_MISMATCH,
        ZeroDivisor(_) | Singular | EigenFailure | NotSimilar(_) | InternalInconsistency(_) => exit::NUMERICAL,
    }
}
