use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {q} too small (need q >= 5)")]
    ModulusTooSmall { q: u64 },
    #[error("modulus {q} divides the level {level}")]
    ModulusDividesLevel { q: u64, level: u64 },
    #[error("invalid argument: {0}")]
    BadArgument(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("coefficient cache too shallow: need n = {need}, have {have}")]
    CacheDepth { need: u64, have: u64 },
    #[error("unknown form label {0}")]
    UnknownForm(String),
    #[error("cache i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("usage: {0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;
