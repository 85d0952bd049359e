use serde::{Deserialize, Serialize};

use super::GaitError;
use crate::estimator::discretize;
use crate::planner::ControlSequence;
use crate::quasistatic::{
    calibrate_all, shape_from_activation, simulate_activation_path, BodyModel, Calibration, SimConfig,
};
use crate::scalar::{from_usize, Real};
use crate::statecore::{RobotState, StateSpace};

/// Column header of the session log; one `commanded_k` column per actuator.
pub const SESSION_HEADER: &str = "t_ms,psi_left,psi_right,state,cursor,commanded_1,commanded_2,com_mm";

/// Result of one controller tick.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutput<T> {
    /// State index classified from the feedback.
    pub state: usize,
    pub cursor: usize,
    /// Whether the feedback reached the cursor's target.
    pub advanced: bool,
    /// Absolute actuator levels to hold.
    pub drive: Vec<T>,
    /// `drive` minus the levels previously commanded.
    pub deltas: Vec<T>,
}

fn next_cursor(sequence: &ControlSequence, cursor: usize) -> Option<usize> {
    let last = sequence.states().len() - 1;
    if cursor < last {
        Some(cursor + 1)
    } else if sequence.is_periodic() {
        // states[last] == states[0], so the cycle resumes at its second state.
        Some(1)
    } else {
        None
    }
}

/// One tick of the contact-angle controller.
///
/// `cursor` indexes the state being driven toward. When the feedback
/// classifies to that state the cursor moves on and the drive switches to the
/// next state's activation; otherwise the current drive is held. A classified
/// state that is neither on the sequence nor `current` is off-path.
/// `targets` holds the activation realizing each state index.
pub fn closed_loop_step<T: Real>(
    current: &RobotState,
    sequence: &ControlSequence,
    cursor: usize,
    feedback: (T, T),
    space: &StateSpace<T>,
    targets: &[Option<Vec<T>>],
    commanded: &[T],
) -> Result<StepOutput<T>, GaitError> {
    let states = sequence.states();
    if cursor >= states.len() {
        return Err(GaitError::InvalidInput(format!(
            "cursor {} beyond sequence of {} states",
            cursor,
            states.len()
        )));
    }
    let observed = space.classify(&[feedback.0, feedback.1])?;
    let state = space.index_of(&observed)?;
    let current = space.index_of(current)?;

    let (cursor, advanced) = if state == states[cursor] {
        match next_cursor(sequence, cursor) {
            Some(c) => (c, true),
            None => (cursor, false),
        }
    } else if states.contains(&state) || state == current {
        (cursor, false)
    } else {
        return Err(GaitError::OffPath {
            state: observed.to_string(),
            cursor,
        });
    };

    let target = states[cursor];
    let drive = targets
        .get(target)
        .cloned()
        .flatten()
        .ok_or_else(|| GaitError::InvalidInput(format!("no activation known for state index {}", target)))?;
    if drive.len() != commanded.len() {
        return Err(GaitError::InvalidInput(format!(
            "{} commanded levels for {} actuators",
            commanded.len(),
            drive.len()
        )));
    }
    let deltas = drive.iter().zip(commanded).map(|(&d, &c)| d - c).collect();
    Ok(StepOutput {
        state,
        cursor,
        advanced,
        drive,
        deltas,
    })
}

/// A sequence bound to a state space and its calibrated activations.
#[derive(Debug, Clone)]
pub struct ClosedLoopController<T> {
    space: StateSpace<T>,
    sequence: ControlSequence,
    targets: Vec<Option<Vec<T>>>,
}

impl<T: Real> ClosedLoopController<T> {
    pub fn new(
        space: StateSpace<T>,
        sequence: ControlSequence,
        calibration: &Calibration<T>,
    ) -> Result<Self, GaitError> {
        for &s in sequence.states() {
            calibration.activation(s)?;
        }
        Ok(Self {
            space,
            sequence,
            targets: calibration
                .states
                .iter()
                .map(|c| c.as_ref().map(|c| c.activation.clone()))
                .collect(),
        })
    }

    pub fn sequence(&self) -> &ControlSequence {
        &self.sequence
    }

    pub fn space(&self) -> &StateSpace<T> {
        &self.space
    }

    pub fn step(
        &self,
        current: usize,
        cursor: usize,
        feedback: (T, T),
        commanded: &[T],
    ) -> Result<StepOutput<T>, GaitError> {
        let current = self.space.state_of(current)?;
        closed_loop_step(
            &current,
            &self.sequence,
            cursor,
            feedback,
            &self.space,
            &self.targets,
            commanded,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real", default)]
pub struct SessionConfig<T> {
    /// Controller period, ms.
    pub tick_ms: T,
    /// Gait cycles to complete before stopping.
    pub cycles: usize,
    /// Log every k-th simulation substep.
    pub log_every: usize,
    pub max_ticks: usize,
}

impl<T: Real> Default for SessionConfig<T> {
    fn default() -> Self {
        Self {
            tick_ms: T::lit(100.0),
            cycles: 3,
            log_every: 8,
            max_ticks: 10_000,
        }
    }
}

/// One row of the session log.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionRow<T> {
    pub t_ms: T,
    pub psi_left: T,
    pub psi_right: T,
    pub state: usize,
    pub cursor: usize,
    pub commanded: Vec<T>,
    /// World position of the centre of mass, mm.
    pub com: T,
}

/// A state change carried out by the plant.
#[derive(Debug, Clone, PartialEq)]
pub struct ExecutedMove<T> {
    pub from: usize,
    pub to: usize,
    pub displacement: T,
    pub reward: i32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Session<T> {
    pub labels: Vec<String>,
    pub rows: Vec<SessionRow<T>>,
    pub moves: Vec<ExecutedMove<T>>,
    pub cycles_completed: usize,
}

impl<T: Real> Session<T> {
    /// Sum of the discretized displacement of every executed move.
    pub fn cumulative_reward(&self) -> i64 {
        self.moves.iter().map(|m| m.reward as i64).sum()
    }

    pub fn net_displacement(&self) -> T {
        self.moves.iter().map(|m| m.displacement).sum()
    }

    /// States occupied between moves, starting state included.
    pub fn visited(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.rows.first().map(|r| r.state).into_iter().collect();
        out.extend(self.moves.iter().map(|m| m.to));
        out
    }

    pub fn to_csv(&self) -> String {
        let actuators = self.rows.first().map_or(2, |r| r.commanded.len());
        let mut s = String::from("t_ms,psi_left,psi_right,state,cursor");
        for k in 1..=actuators {
            s.push_str(&format!(",commanded_{}", k));
        }
        s.push_str(",com_mm\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{:.3},{:.6},{:.6},{}:{},{}",
                r.t_ms.as_f64(),
                r.psi_left.as_f64() + 0.0,
                r.psi_right.as_f64() + 0.0,
                r.state,
                self.labels[r.state],
                r.cursor
            ));
            for c in &r.commanded {
                s.push_str(&format!(",{:.6}", c.as_f64() + 0.0));
            }
            s.push_str(&format!(",{:.6}\n", r.com.as_f64() + 0.0));
        }
        s
    }
}

/// Runs `sequence` closed loop on the simulated `body`.
///
/// Each tick the controller reads the contact angles and the plant then
/// settles quasi-statically onto the commanded activation before the next
/// tick. The robot starts at rest in the sequence's first state with its
/// centre of mass at 0.
pub fn run_closed_loop<T: Real>(
    body: &BodyModel<T>,
    sequence: &ControlSequence,
    sim: &SimConfig<T>,
    session: &SessionConfig<T>,
) -> Result<Session<T>, GaitError> {
    if session.cycles == 0 || session.log_every == 0 {
        return Err(GaitError::InvalidInput(
            "cycles and log_every must be at least 1".into(),
        ));
    }
    if !(session.tick_ms > T::zero()) || !session.tick_ms.is_finite() {
        return Err(GaitError::InvalidInput(format!(
            "tick must be positive, got {} ms",
            session.tick_ms
        )));
    }
    let space = body.state_space()?;
    let calibration = calibrate_all(body, sim)?;
    let controller = ClosedLoopController::new(space.clone(), sequence.clone(), &calibration)?;

    let classify = |psi: (T, T)| -> Result<usize, GaitError> {
        let s = space.classify(&[psi.0, psi.1])?;
        Ok(space.index_of(&s)?)
    };

    let mut activation = calibration.activation(sequence.states()[0])?.to_vec();
    let shape = shape_from_activation(body, &activation)?;
    let mut psi = (shape.psi_left, shape.psi_right);
    let mut current = classify(psi)?;
    let mut com = T::zero();
    let mut cursor = 0;
    let mut commanded = activation.clone();
    let mut t = T::zero();

    let mut out = Session {
        labels: space.labels(),
        rows: vec![SessionRow {
            t_ms: t,
            psi_left: psi.0,
            psi_right: psi.1,
            state: current,
            cursor,
            commanded: commanded.clone(),
            com,
        }],
        moves: Vec::new(),
        cycles_completed: 0,
    };
    let last = sequence.states().len() - 1;

    for _ in 0..session.max_ticks {
        let step = controller.step(current, cursor, psi, &commanded)?;
        if step.advanced && cursor == last {
            out.cycles_completed += 1;
        }
        let arrived = !sequence.is_periodic() && cursor == last && step.state == sequence.states()[last];
        let finished = arrived || out.cycles_completed >= session.cycles;
        cursor = step.cursor;
        commanded = step.drive;
        if finished {
            return Ok(out);
        }

        if commanded != activation {
            let transit = simulate_activation_path(body, &activation, &commanded, com, sim)?;
            let n = sim.substeps;
            for rec in transit.substeps.iter().skip(1) {
                if rec.index % session.log_every == 0 || rec.index == n {
                    out.rows.push(SessionRow {
                        t_ms: t + session.tick_ms * from_usize::<T>(rec.index) / from_usize::<T>(n),
                        psi_left: rec.psi_left,
                        psi_right: rec.psi_right,
                        state: classify((rec.psi_left, rec.psi_right))?,
                        cursor,
                        commanded: commanded.clone(),
                        com: rec.placement.com,
                    });
                }
            }
            let end = transit.end();
            psi = (end.psi_left, end.psi_right);
            let from = current;
            current = classify(psi)?;
            com = end.placement.com;
            activation = commanded.clone();
            out.moves.push(ExecutedMove {
                from,
                to: current,
                displacement: transit.displacement,
                reward: discretize(transit.displacement, sim.deadband).map_err(crate::quasistatic::SimError::from)?,
            });
        } else {
            out.rows.push(SessionRow {
                t_ms: t + session.tick_ms,
                psi_left: psi.0,
                psi_right: psi.1,
                state: current,
                cursor,
                commanded: commanded.clone(),
                com,
            });
        }
        t = t + session.tick_ms;
    }
    Err(GaitError::Stalled {
        ticks: session.max_ticks,
    })
}
