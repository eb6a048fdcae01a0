use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("exponent k must be at least 1")]
    ZeroExponent,
    #[error("modulus {p}^{k} exceeds the supported range (2^16)")]
    ModulusTooLarge { p: u64, k: u32 },
    #[error("rank {0} exceeds the supported maximum of 16")]
    RankTooLarge(usize),
    #[error("{0} is not a unit")]
    NonUnit(u32),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("index ({u}, {v}) out of range for size {size}")]
    IndexOutOfRange { u: usize, v: usize, size: usize },
    #[error("matrix is not upper unitriangular")]
    NotUnitriangular,
    #[error("integer overflow in exact matrix arithmetic")]
    Overflow,
    #[error("modulus context mismatch")]
    ContextMismatch,
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("canonical triple violates its shape constraints: {0}")]
    InvalidTriple(String),
    #[error("triple has a non-identity column permutation")]
    OmegaNotIdentity,
    #[error("deck group is trivial")]
    TrivialGroup,
    #[error("invalid cover: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    InvalidCover(Vec<CoverIssue>),
    #[error("parameters ({p}, {k}, {n}) exceed the enumeration bound: {reason}")]
    BoundExceeded {
        p: u32,
        k: u32,
        n: usize,
        reason: String,
    },
    #[error("parameter mismatch: {0}")]
    ParameterMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
}

/// A single reason a cover description is rejected.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoverIssue {
    #[error("malformed: {0}")]
    Malformed(String),
    #[error("images do not sum to zero")]
    NotSumZero,
    #[error("images do not generate the deck group")]
    NotSurjective,
    #[error("deck group exponent is {found}, expected {expected}")]
    WrongExponent { found: u64, expected: u64 },
    #[error("branch point x_{0} has zero image")]
    ZeroBranchImage(usize),
}

impl CoverIssue {
    pub fn code(&self) -> &'static str {
        match self {
            CoverIssue::Malformed(_) => "Malformed",
            CoverIssue::NotSumZero => "NotSumZero",
            CoverIssue::NotSurjective => "NotSurjective",
            CoverIssue::WrongExponent { .. } => "WrongExponent",
            CoverIssue::ZeroBranchImage(_) => "ZeroBranchImage",
        }
    }
}

impl Error {
    /// Stable machine-readable name of the error kind.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NotPrime(_) => "NotPrime",
            Error::ZeroExponent => "ZeroExponent",
            Error::ModulusTooLarge { .. } => "ModulusTooLarge",
            Error::RankTooLarge(_) => "RankTooLarge",
            Error::NonUnit(_) => "NonUnit",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::NotUnitriangular => "NotUnitriangular",
            Error::Overflow => "Overflow",
            Error::ContextMismatch => "ContextMismatch",
            Error::InvalidPermutation(_) => "InvalidPermutation",
            Error::InvalidTriple(_) => "InvalidTriple",
            Error::OmegaNotIdentity => "OmegaNotIdentity",
            Error::TrivialGroup => "TrivialGroup",
            Error::InvalidCover(_) => "InvalidCover",
            Error::BoundExceeded { .. } => "BoundExceeded",
            Error::ParameterMismatch(_) => "ParameterMismatch",
            Error::Parse(_) => "Parse",
        }
    }
}
