use thiserror::Error;

use crate::sets::MAX_GROUND;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("ground set size {0} outside 1..={MAX_GROUND}")]
    GroundSize(usize),

    #[error("element {element} outside [1, {n}]")]
    ElementOutOfRange { element: u64, n: usize },

    #[error("element {0} listed twice")]
    DuplicateElement(u32),

    #[error("ground sets differ: [{left}] vs [{right}]")]
    GroundMismatch { left: usize, right: usize },

    #[error("member {0} appears twice")]
    DuplicateMember(String),

    #[error("member {member} has {actual} elements but the family is {expected}-uniform")]
    NotUniform {
        member: String,
        expected: usize,
        actual: usize,
    },

    #[error("the three sets of a triple must be pairwise distinct")]
    NonDistinctTriple,

    #[error("sets must have equal size, got {0} and {1}")]
    SizeMismatch(usize, usize),

    #[error("invalid shift pair (x={x}, y={y}) on [{n}]: need 1 <= y < x <= n")]
    InvalidShift { x: u32, y: u32, n: usize },

    #[error("size sum {s} exceeds 3n = {}", 3 * .n)]
    SizeSumOutOfRange { s: usize, n: usize },

    /// A closed-form result was requested outside the parameter range where it holds.
    #[error("regime violated: {0}")]
    Regime(String),

    #[error("{count} candidate sets exceed the search cap of {cap}")]
    CapExceeded { count: usize, cap: usize },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
