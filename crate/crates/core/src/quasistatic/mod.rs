//! Quasi-static simulation of a segmented planar beam on two friction pads.
//!
//! Actuators impose curvature over arc-length spans (overlapping spans add).
//! The shape is integrated from the left end and placed with both end pads on
//! the ground, which for the arched shapes produced by positive curvature
//! leaves the body above the ground line. The end-segment angles are the
//! contact angles that select each pad's friction level.
//!
//! Between two activation vectors the shape is stepped in small increments.
//! At each increment the lever rule gives the normal force at each pad, and
//! the pad with the smaller Coulomb capacity `μ·N` slides while the other
//! sticks. When the two capacities agree within the stick tolerance there is
//! no net friction force and the centre of mass stays put.

mod body;
mod shape;
mod slip;
mod transition;

pub use body::{mirror_body, ActuatorSpan, BodyDocument, BodyModel, SimConfig, BODY_SCHEMA};
pub use shape::{contact_angles, normal_forces, shape_from_activation, ShapeState};
pub use slip::{slip_mode, slip_step, Placement, SlipMode};
pub use transition::{
    build_reward_matrix, calibrate_activation, calibrate_all, execute_transition, simulate_activation_path,
    simulate_transitions, CalibratedState, Calibration, SubstepRecord, Transit, TransitionTable,
};

use thiserror::Error;

use crate::estimator::EstimateError;
use crate::statecore::StateError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid body: {0}")]
    InvalidBody(String),
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error("expected {expected} activations, got {got}")]
    ActivationArity { expected: usize, got: usize },
    #[error("activation {value} of actuator {actuator} outside [0, 1]")]
    ActivationOutOfRange { actuator: usize, value: f64 },
    #[error("shape dips {depth} mm below the ground line between the pads")]
    BelowGround { depth: f64 },
    #[error("pads coincide or cross (chord {chord} mm)")]
    Degenerate { chord: f64 },
    #[error("{}centre of mass at {com} mm lies outside the support [0, {chord}] mm", substep.map(|k| format!("substep {}: ", k)).unwrap_or_default())]
    Tipping {
        substep: Option<usize>,
        com: f64,
        chord: f64,
    },
    #[error("state {target} is not realizable; achievable states: {}", achieved.join(", "))]
    Unrealizable { target: String, achieved: Vec<String> },
    #[error("transition {from} -> {to}: {source}")]
    Transition {
        from: String,
        to: String,
        source: Box<SimError>,
    },
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Estimate(#[from] EstimateError),
}
