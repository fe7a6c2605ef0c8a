use thiserror::Error;

/// Errors raised by set construction, the profile kernels, the bound
/// evaluators and the search engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    CompositeModulus(u64),
    #[error("modulus {0} exceeds the supported set size of 2^31")]
    ModulusTooLarge(u64),
    #[error("interval [{u}, {v}) is wider than the modulus {p}")]
    RangeTooWide { p: u64, u: i64, v: i64 },
    #[error("interval [{u}, {v}) has its end before its start")]
    ReversedInterval { u: i64, v: i64 },
    #[error("element {element} is outside [0, {p})")]
    ElementOutOfRange { p: u64, element: i64 },
    #[error("duplicate element {0}")]
    DuplicateElement(i64),
    #[error("sets live in different groups (Z/{0} vs Z/{1})")]
    ModulusMismatch(u64, u64),
    #[error("affine scale must be nonzero mod p")]
    ZeroScale,
    #[error("operation needs a nonempty proper subset of the group")]
    DegenerateSet,
    #[error("operation needs a nonempty set")]
    EmptySet,
    #[error("the set B must be nonempty")]
    EmptyB,
    #[error("shift must be nonzero")]
    ZeroShift,
    #[error("the set is the whole group")]
    FullSet,
    #[error("tau is not defined on {0}")]
    TauNotTotal(u64),
    #[error("tau maps {b} to {a}, which is not in A")]
    TauImageOutsideA { b: u64, a: u64 },
    #[error("tau is defined on {0}, which is not in B")]
    TauOutsideDomain(u64),
    #[error("wrong arguments for {claim}: {detail}")]
    ArityMismatch { claim: String, detail: String },
    #[error("B must consist of positive integers, found {0}")]
    NonPositiveB(i64),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("exhaustive enumeration is limited to p <= 31, got {0}")]
    TooLargeForExhaustive(u64),
    #[error(
        "profile backend mismatch at b = {b}: kernel {kernel} gave {got}, naive gave {expected}"
    )]
    ProfileMismatch {
        kernel: &'static str,
        b: u64,
        got: u32,
        expected: u32,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
