//! Crate-wide error type for analysis operations.

use crate::phase::Violation;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PhaselabError {
    #[error("carrier size {n} exceeds the exact-search limit {max}")]
    SizeLimitExceeded { n: usize, max: usize },

    #[error("search budget exceeded: required {required} nodes, budget {budget}")]
    BudgetExceeded { required: u128, budget: u64 },

    #[error("phases have different signatures")]
    SignatureMismatch,

    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),

    #[error("index {index} out of range (maximum {max})")]
    IndexOutOfRange { index: u32, max: u32 },

    #[error("not a permutation of the carrier")]
    InvalidPermutation,

    #[error("rejection sampling exhausted after {0} attempts")]
    RejectionBudgetExceeded(u64),

    #[error("target phase has no order block; only identity 2-cells exist")]
    OrderMissing,

    #[error("unknown theorem id `{0}`")]
    UnknownTheorem(String),

    #[error("induced defect map violates monotonicity in the quotient")]
    InducedMonotonicity(Vec<Violation>),

    #[error("partition is not operation-compatible at `{op}`: tuples ({left:?}) and ({right:?}) are related but outputs are not")]
    InvalidCongruence {
        op: String,
        left: Vec<String>,
        right: Vec<String>,
    },

    #[error("induced carrier is not closed under `{op}`")]
    SubphaseNotClosed { op: String },

    #[error("phase validation failed: {} violation(s)", .0.len())]
    Validation(Vec<Violation>),

    #[error("{0}")]
    InvalidInput(String),
}

impl PhaselabError {
    /// Process exit code the CLI maps this error to.
    pub fn exit_code(&self) -> i32 {
        match self {
            PhaselabError::BudgetExceeded { .. }
            | PhaselabError::SizeLimitExceeded { .. }
            | PhaselabError::RejectionBudgetExceeded(_) => 3,
            _ => 2,
        }
    }
}
