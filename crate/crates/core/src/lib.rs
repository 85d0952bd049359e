//! Gait planning for soft robots that crawl by switching friction pads.
//!
//! Each end of the body carries a pad whose friction level depends on the
//! angle at which it meets the ground. The tuple of pad levels is the robot
//! state, and a reward matrix records whether each state-to-state transition
//! moves the body forward, backward or not at all. From there:
//!
//! - [`statecore`] classifies contact angles and holds reward matrices;
//! - [`planner`] searches for the best periodic state sequence;
//! - [`quasistatic`] derives reward matrices from a simple beam model;
//! - [`estimator`] learns matrices from observed trials;
//! - [`gaitcontrol`] turns a sequence into actuator commands.
//!
//! Continuous quantities are generic over [`scalar::Real`] (`f32` or `f64`);
//! the aliases below fix `f64`.

// `!(x > 0)` deliberately rejects NaN; index loops mirror the recurrences.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod estimator;
pub mod gaitcontrol;
pub mod planner;
pub mod quasistatic;
pub mod scalar;
pub mod statecore;

use thiserror::Error;

pub use scalar::Real;

pub type Mechanism64 = statecore::MechanismSpec<f64>;
pub type Mechanism32 = statecore::MechanismSpec<f32>;
pub type StateSpace64 = statecore::StateSpace<f64>;
pub type StateSpace32 = statecore::StateSpace<f32>;
pub type Body64 = quasistatic::BodyModel<f64>;
pub type Body32 = quasistatic::BodyModel<f32>;
pub type Shape64 = quasistatic::ShapeState<f64>;
pub type SimConfig64 = quasistatic::SimConfig<f64>;
pub type Trial64 = estimator::TrialRecord<f64>;
pub type EstimatorConfig64 = estimator::EstimatorConfig<f64>;
pub type Waveform64 = gaitcontrol::ActuationWaveform<f64>;
pub type Timeline64 = gaitcontrol::CommandTimeline<f64>;
pub type RateCycle64 = planner::RateCycle<f64>;

/// Any error raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    State(#[from] statecore::StateError),
    #[error(transparent)]
    Plan(#[from] planner::PlanError),
    #[error(transparent)]
    Sim(#[from] quasistatic::SimError),
    #[error(transparent)]
    Estimate(#[from] estimator::EstimateError),
    #[error(transparent)]
    Gait(#[from] gaitcontrol::GaitError),
}
