use thiserror::Error;

use crate::lattice::LatticeId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("class belongs to lattice {found:?}, expected {expected:?}")]
    BasisMismatch { expected: LatticeId, found: LatticeId },

    #[error("coefficient vector has length {found}, lattice rank is {rank}")]
    RankMismatch { rank: usize, found: usize },

    #[error("malformed lattice: {0}")]
    MalformedLattice(String),

    #[error("unknown basis label `{0}`")]
    UnknownBasisLabel(String),

    #[error("intersection number overflowed i64")]
    Overflow,

    #[error("invalid symplectic pair: {0}")]
    InvalidPair(String),

    #[error("class is not an exceptional candidate: square {square}, K-pairing {canonical}")]
    NotExceptional { square: i64, canonical: i64 },

    #[error("no integral basis of the orthogonal complement with coefficients within {bound}")]
    BasisChangeNotFound { bound: i64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("contact orders sum to {total}, but A.V = {expected}")]
    ContactMismatch { total: i64, expected: i64 },

    #[error("contact orders must be positive")]
    InvalidContact,

    #[error("malformed level decomposition: {0}")]
    MalformedDecomposition(String),

    #[error("divisor squares do not cancel: {x} + {y} != 0")]
    SquareMismatch { x: i64, y: i64 },

    #[error("divisor genera differ: {x} vs {y}")]
    GenusMismatch { x: u32, y: u32 },

    #[error("not one of the four sphere caps: {0}")]
    NotASphereCap(String),
}

pub type Result<T> = std::result::Result<T, Error>;
