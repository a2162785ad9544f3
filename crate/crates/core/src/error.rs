use thiserror::Error;

use crate::mask::SubsetMask;
use crate::structure::StructureViolation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("ground set has {0} elements, at most {max} are supported", max = SubsetMask::CAPACITY)]
    GroundTooLarge(usize),

    #[error("{0} is not a connected set of the structure")]
    NotConnected(SubsetMask),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("enumeration cap of {cap} exceeded on {base} after {partial} items")]
    CapExceeded {
        base: SubsetMask,
        cap: usize,
        partial: usize,
    },

    #[error("not a connectivity structure: {} violation(s)", .0.len())]
    InvalidStructure(Vec<StructureViolation>),
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        let text = err.to_string();
        let message = match text.rsplit_once(" at line ") {
            Some((head, _)) => head.to_string(),
            None => text,
        };
        Error::Parse {
            line: err.line(),
            column: err.column(),
            message,
        }
    }
}
