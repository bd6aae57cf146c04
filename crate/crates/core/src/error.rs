use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("input must be a positive integer, got 0")]
    Zero,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("field size {q} exceeds the configured ceiling {ceiling}")]
    CeilingExceeded { q: u64, ceiling: u64 },
    #[error("degree {t} exceeds the configured ceiling {ceiling}")]
    DegreeCeilingExceeded { t: u64, ceiling: u64 },
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("zero has no multiplicative inverse or order")]
    ZeroElement,
    #[error("coefficient {value} is out of range for F_{p}")]
    CoefficientOutOfRange { value: u64, p: u64 },
    #[error("element needs exactly {expected} coefficients, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("polynomial must have degree at least {min}")]
    DegreeTooSmall { min: u64 },
    #[error("order {order} does not divide {group}")]
    OrderNotDivisor { order: u64, group: u64 },
    #[error("prime {0} appears more than once")]
    RepeatedPrime(u64),
    #[error("invalid lattice instance: {0}")]
    InvalidInstance(String),
    #[error("degenerate case s=0: no odd prime factors to normalize by")]
    Degenerate,
    #[error("hypothesis not met: {0}")]
    Hypothesis(String),
    #[error("integer overflow in exact arithmetic")]
    Overflow,
}
