//! Error type shared by every module in the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building fields or running checks.
///
/// Arithmetic on elements from the wrong context is treated as a programming
/// error and panics at the call site; the variants here cover fallible
/// operations reachable from user input (CLI flags, custom moduli, element
/// specifications) plus internal verification failures that must surface
/// honestly instead of being swallowed.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("unsupported field parameters: {0}")]
    UnsupportedField(String),

    #[error("modulus is not usable: {0}")]
    BadModulus(String),

    #[error("element belongs to context {got}, expected {expected}")]
    ForeignElement { expected: String, got: String },

    #[error("zero has no inverse")]
    NotInvertible,

    #[error("operation requires characteristic 2, context has characteristic {0}")]
    OddCharacteristic(u64),

    #[error("operation requires even extension degree, context is {0}")]
    OddDegree(String),

    #[error("no embedding from context {src} into context {dst}")]
    NoEmbedding { src: String, dst: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("polynomial is identically zero where a nonzero one is required")]
    ZeroPolynomial,

    #[error("polynomial is inseparable: {0}")]
    Inseparable(String),

    #[error("element is not on the unit circle: {0}")]
    NotOnUnitCircle(String),

    #[error("element set is not closed under the conjugate-reciprocal map: {0}")]
    NotPiClosed(String),

    #[error("randomized splitting exhausted its retry budget ({0} attempts)")]
    SplittingBudget(u32),

    #[error("polynomial is not symmetric: {0}")]
    NotSymmetric(String),

    #[error("verified identity failed: {0}")]
    CheckFailed(String),

    #[error("character sum is not rational (unequal nonzero fibers)")]
    IrrationalSum,

    #[error("table verification failed: {0}")]
    TableMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("report serialization failed: {0}")]
    Serialize(#[from] serde_json::Error),
}
