use thiserror::Error;

#[derive(Debug, Error)]
pub enum LambdaError {
    #[error("{0} is not an odd prime")]
    InvalidPrime(i64),
    #[error("{0}")]
    Domain(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("elements over different primes (p={0}, p={1})")]
    MixedPrime(u32, u32),
    #[error("{what} exceeded its budget of {limit}")]
    Budget { what: &'static str, limit: u64 },
}

impl LambdaError {
    /// Resource failures are reported separately from bad input.
    pub fn is_resource(&self) -> bool {
        matches!(self, LambdaError::Budget { .. })
    }
}

pub type Result<T, E = LambdaError> = std::result::Result<T, E>;
