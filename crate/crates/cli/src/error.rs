use std::path::Path;

use gaitmatrix::estimator::EstimateError;
use gaitmatrix::gaitcontrol::GaitError;
use gaitmatrix::planner::PlanError;
use gaitmatrix::quasistatic::SimError;
use gaitmatrix::statecore::StateError;
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_SIMULATION: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Infeasible(String),
    #[error("{0}")]
    Simulation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Infeasible(_) => EXIT_INFEASIBLE,
            CliError::Simulation(_) => EXIT_SIMULATION,
        }
    }

    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    pub fn file(path: &Path, err: impl std::fmt::Display) -> Self {
        CliError::Input(format!("{}: {}", path.display(), err))
    }
}

impl From<StateError> for CliError {
    fn from(e: StateError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<EstimateError> for CliError {
    fn from(e: EstimateError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<PlanError> for CliError {
    fn from(e: PlanError) -> Self {
        match e {
            PlanError::NoFeasibleCycle => CliError::Infeasible(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::InvalidBody(_)
            | SimError::InvalidConfig(_)
            | SimError::ActivationArity { .. }
            | SimError::ActivationOutOfRange { .. }
            | SimError::State(_) => CliError::Input(e.to_string()),
            other => CliError::Simulation(other.to_string()),
        }
    }
}

impl From<GaitError> for CliError {
    fn from(e: GaitError) -> Self {
        match e {
            GaitError::Sim(s) => s.into(),
            GaitError::Plan(p) => p.into(),
            GaitError::OffPath { .. } | GaitError::Stalled { .. } => CliError::Simulation(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}
