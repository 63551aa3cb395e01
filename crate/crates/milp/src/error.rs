use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MilpError {
    #[error("variable index {0} does not exist")]
    UnknownVariable(usize),
    #[error("invalid bounds for {name}: [{lower}, {upper}]")]
    InvalidBounds { name: String, lower: f64, upper: f64 },
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("brute force would enumerate {combinations} assignments, cap is {cap}")]
    EnumerationCap { combinations: u128, cap: u128 },
    #[error("LP text line {line}: {message}")]
    Parse { line: usize, message: String },
}
