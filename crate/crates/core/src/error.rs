use std::fmt;

use thiserror::Error;

/// The moduli space `M̄_{g,n}` a class lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ambient {
    pub genus: u32,
    pub n: u32,
}

impl Ambient {
    pub fn new(genus: u32, n: u32) -> Self {
        Ambient { genus, n }
    }

    pub fn is_stable(&self) -> bool {
        2 * self.genus as i64 - 2 + self.n as i64 > 0
    }

    /// Complex dimension `3g - 3 + n`.
    pub fn dimension(&self) -> i64 {
        3 * self.genus as i64 - 3 + self.n as i64
    }
}

impl fmt::Display for Ambient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.genus, self.n)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid stable graph: {0}")]
    InvalidGraph(String),
    #[error("ambient mismatch: expected {expected}, found {found}")]
    AmbientMismatch { expected: Ambient, found: Ambient },
    #[error("graphs have different genus or leg sets")]
    GraphMismatch,
    #[error("unknown marking {0}")]
    UnknownMarking(u32),
    #[error("moduli space M_{0} is unstable")]
    Unstable(Ambient),
    #[error("outside supported contract: {0}")]
    Unsupported(String),
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("invalid input: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
