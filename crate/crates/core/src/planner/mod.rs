//! Gait planning over a reward matrix.
//!
//! A periodic control sequence `S(0) → … → S(N)` with `S(0) = S(N)` earns the
//! sum of its transition rewards. [`optimal_cycle`] finds the best such
//! sequence with `N ≤ l_max`; [`optimal_mean_cycle`] and
//! [`optimal_rate_cycle`] find the asymptotically best gait by reward per
//! transition and reward per second.
//!
//! A periodic sequence visits its start state only at its two ends. A closed
//! walk that returns to its start earlier is two gait cycles run back to back,
//! and is scored as such rather than as one longer cycle.
//!
//! The mean and rate planners only consider simple cycles: a closed walk with a
//! repeated state splits into two shorter closed walks whose better ratio is at
//! least the ratio of the whole, so repetition never helps.

mod exhaustive;
mod mean;
mod rate;
mod sequence;

pub use exhaustive::{
    brute_force_cycles, optimal_cycle, PlanDocument, PlanResult, Sense, BRUTE_FORCE_BUDGET, MAX_LISTED_CYCLES,
    MAX_L_MAX, PLAN_SCHEMA,
};
pub use mean::{optimal_mean_cycle, MeanCycle};
pub use rate::{optimal_rate_cycle, RateCycle, RATE_TOLERANCE};
pub use sequence::{sequence_reward, ControlSequence};

use thiserror::Error;

use crate::statecore::{validate, RewardMatrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlanError {
    #[error("transition {from} -> {to} at step {step} is forbidden")]
    ForbiddenTransition { step: usize, from: usize, to: usize },
    #[error("state index {index} out of range for {n} states")]
    StateOutOfRange { index: usize, n: usize },
    #[error("a control sequence needs at least one transition")]
    TooShort,
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("no feasible cycle")]
    NoFeasibleCycle,
    #[error("invalid reward matrix: {0}")]
    InvalidMatrix(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub(crate) fn ensure_valid(m: &RewardMatrix) -> Result<(), PlanError> {
    let violations = validate(m);
    match violations.first() {
        None => Ok(()),
        Some(v) => Err(PlanError::InvalidMatrix(format!(
            "{} ({} violation(s))",
            v,
            violations.len()
        ))),
    }
}

/// Rotates a closed cycle (without its repeated endpoint) so the smallest
/// state comes first, then closes it.
pub(crate) fn canonical_cycle(mut open: Vec<usize>) -> ControlSequence {
    if let Some(pos) = open.iter().enumerate().min_by_key(|(_, &s)| s).map(|(i, _)| i) {
        open.rotate_left(pos);
    }
    let first = open[0];
    open.push(first);
    ControlSequence::new(open).expect("cycle has at least one transition")
}
