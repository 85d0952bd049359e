//! Friction-mechanism discretization, the robot state space and reward
//! matrices.
//!
//! A friction mechanism (contact pad) is classified into a discrete level by
//! comparing its contact angle against an increasing list of critical angles.
//! A robot state is the tuple of mechanism levels, indexed in mixed radix with
//! mechanism 0 (the left/rear end) as the most significant digit, so for two
//! binary pads `0 ↔ (00)`, `1 ↔ (01)`, `2 ↔ (10)` and `3 ↔ (11)`.

mod matrix;
mod mechanism;
mod space;

pub use matrix::{
    apply_mask, default_labels, validate, RewardMatrix, RewardMatrixDocument, Violation, ViolationKind,
    REWARD_MATRIX_SCHEMA,
};
pub use mechanism::{state_from_angle, MechanismSpec, MechanismState};
pub use space::{binary_labels, RobotState, StateSpace};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("contact angle must be finite, got {0}")]
    NonFiniteAngle(f64),
    #[error("invalid mechanism `{label}`: {reason}")]
    InvalidMechanism { label: String, reason: String },
    #[error("state index {index} out of range for cardinality {cardinality}")]
    IndexOutOfRange { index: usize, cardinality: usize },
    #[error("state has {got} mechanisms, state space has {expected}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("mechanism {mechanism} level {level} out of range (level count {level_count})")]
    LevelOutOfRange {
        mechanism: usize,
        level: usize,
        level_count: usize,
    },
    #[error("transition ({from}, {to}) out of range for {n} states")]
    PairOutOfRange { from: usize, to: usize, n: usize },
    #[error("unrecognized state `{0}`")]
    UnknownState(String),
    #[error("malformed reward matrix: {0}")]
    Malformed(String),
    #[error("state space too large: cardinality exceeds {0}")]
    TooLarge(usize),
}
