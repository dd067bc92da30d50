use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected length {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("table covers indices up to {available}, but {needed} was requested")]
    TableTooSmall { needed: usize, available: usize },

    #[error("{what} refused for n = {n}: size guard is {limit} (pass force to override)")]
    SizeGuard {
        what: &'static str,
        n: usize,
        limit: usize,
    },

    #[error("cache file is not usable: {0}")]
    CacheFormat(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::DimensionMismatch { expected, actual });
    }
    Ok(())
}
