use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("order Q must be at least 1")]
    ZeroOrder,
    #[error("H must be at least 1")]
    ZeroWindow,
    #[error("invalid fraction {a}/{q}: {reason}")]
    InvalidFraction { a: u64, q: u64, reason: &'static str },
    #[error("1/1 has no successor")]
    NoSuccessor,
    #[error("{a1}/{q1} and {a2}/{q2} are not neighbours in F_{order}")]
    NotNeighbors {
        order: u64,
        a1: u64,
        q1: u64,
        a2: u64,
        q2: u64,
    },
    #[error("fractions are not in increasing order")]
    NotIncreasing,
    #[error("gap signature entries must be positive and its length must be H")]
    InvalidDelta,
    #[error("R = {r} is outside [H+1, 2H+1] for H = {h}")]
    RangeOutOfBounds { r: usize, h: usize },
    #[error("invalid residue pattern: {0}")]
    InvalidPattern(&'static str),
    #[error("index tuple has length {got}, expected {expected}")]
    IndexLength { expected: usize, got: usize },
    #[error("cutoff {got} is below the minimum {min} for H = {h}")]
    CutoffTooSmall { got: u64, min: u64, h: usize },
    #[error("region does not fit in [0, {bound}]^2")]
    RegionOutOfRange { bound: u64 },
    #[error("region coordinates overflow 128-bit integers")]
    Overflow,
    #[error("population is empty")]
    EmptyPopulation,
}
