use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NonPrime(u32),
    #[error("polynomial {0:?} is reducible")]
    ReduciblePolynomial(Vec<u32>),
    #[error("field of size {0} exceeds the supported maximum 2^16")]
    UnsupportedSize(u64),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("group table is not a Latin square")]
    NotLatinSquare,
    #[error("group table is not associative")]
    NonAssociative,
    #[error("group table has no identity at index 0")]
    NoIdentity,
    #[error("unknown preset group {0:?}")]
    UnknownPreset(String),
    #[error("mismatched group or field")]
    Mismatch,
    #[error("subspace is not stable under the group action")]
    NotGStable,
    #[error("minimal resolutions need a p-group in characteristic p ({0})")]
    UnsupportedGroup(String),

    #[error("degree {needed} is outside the stored window (bound {bound})")]
    TruncationUnderflow { needed: i64, bound: i64 },
    #[error("not a chain map: {0}")]
    NotAChainMap(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("work estimate {0} exceeds the configured budget")]
    BudgetExceeded(u64),

    #[error("the class is zero")]
    ZeroClass,
    #[error("operation needs characteristic 2, field has characteristic {0}")]
    WrongCharacteristic(u32),
    #[error("Massey product undefined: {0}")]
    ProductsNonzero(String),
    #[error("homotopy search failed: {0}")]
    HomotopySearchFailed(String),
    #[error("lifting obstruction does not vanish")]
    ObstructionNonzero,

    #[error("parse error at {position}: expected {expected}")]
    Parse { position: usize, expected: String },
    #[error("expression is not homogeneous (degrees {0} and {1})")]
    NonHomogeneous(usize, usize),
    #[error("unknown generator {0:?}")]
    UnknownGenerator(String),
    #[error("invalid input: {0}")]
    Input(String),
}

pub(crate) fn underflow(needed: i64, bound: i64) -> Error {
    Error::TruncationUnderflow { needed, bound }
}

impl Error {
    /// Errors caused by the caller's input rather than by the computation.
    pub fn is_input(&self) -> bool {
        matches!(
            self,
            Error::NonPrime(_)
                | Error::ReduciblePolynomial(_)
                | Error::UnsupportedSize(_)
                | Error::InvalidField(_)
                | Error::NotLatinSquare
                | Error::NonAssociative
                | Error::NoIdentity
                | Error::UnknownPreset(_)
                | Error::UnsupportedGroup(_)
                | Error::TruncationUnderflow { .. }
                | Error::PreconditionViolated(_)
                | Error::ZeroClass
                | Error::WrongCharacteristic(_)
                | Error::ProductsNonzero(_)
                | Error::Parse { .. }
                | Error::NonHomogeneous(..)
                | Error::UnknownGenerator(_)
                | Error::Input(_)
        )
    }
}
