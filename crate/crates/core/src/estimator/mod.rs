//! Reward matrices learned from observed transition trials.
//!
//! Each trial records the signed centre-of-mass displacement of one state
//! transition. Per ordered pair the displacements are aggregated (weighted
//! median by default, optionally with exponential recency weighting) and then
//! discretized. Pairs with too few trials stay forbidden: no data is not the
//! same claim as zero displacement.

mod aggregate;
mod trials;

pub use aggregate::{weighted_median, weighted_vote};
pub use trials::{
    discretize, estimate_matrix, update_online, Aggregation, CoverageReport, EstimatorConfig, OnlineEstimate,
    TrialRecord, TrialStatistics, COVERAGE_SCHEMA,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimateError {
    #[error("displacement must be finite, got {0}")]
    NonFinite(f64),
    #[error("invalid estimator configuration: {0}")]
    InvalidConfig(String),
    #[error("trial {record}: transition ({from}, {to}) out of range for {n} states")]
    TrialOutOfRange {
        record: usize,
        from: usize,
        to: usize,
        n: usize,
    },
    #[error("trial {record}: {reason}")]
    InvalidTrial { record: usize, reason: String },
    #[error("statistics cover {got} states, matrix has {expected}")]
    DimensionMismatch { expected: usize, got: usize },
}
