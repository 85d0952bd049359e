//! Actuator command generation for planned gaits.
//!
//! Open loop, each actuator runs a periodic pulse train (strength, active
//! time, cycle time) with actuator 2 offset by a phase. Closed loop, the
//! contact angles alone decide when the robot has reached the next state of
//! its sequence, and the controller then drives toward the following state's
//! calibrated activation.

mod closed_loop;
mod rate;
mod waveform;

pub use closed_loop::{
    closed_loop_step, run_closed_loop, ClosedLoopController, ExecutedMove, Session, SessionConfig, SessionRow,
    StepOutput, SESSION_HEADER,
};
pub use rate::gait_rate;
pub use waveform::{
    replay_open_loop, schedule_open_loop, ActuationWaveform, CommandEvent, CommandTimeline, Pulse, TIMELINE_HEADER,
};

use thiserror::Error;

use crate::planner::PlanError;
use crate::quasistatic::SimError;
use crate::statecore::StateError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GaitError {
    #[error("invalid waveform: {0}")]
    InvalidWaveform(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("state {state} is off the planned sequence (cursor {cursor})")]
    OffPath { state: String, cursor: usize },
    #[error("controller made no progress within {ticks} ticks")]
    Stalled { ticks: usize },
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    State(#[from] StateError),
}
