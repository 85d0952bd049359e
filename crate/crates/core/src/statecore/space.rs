use std::fmt;

use serde::{Deserialize, Serialize};

use super::mechanism::{state_from_angle, MechanismSpec, MechanismState};
use super::StateError;
use crate::scalar::Real;

/// Upper bound on state-space cardinality accepted anywhere in the crate.
pub const MAX_CARDINALITY: usize = 4096;

/// Ordered friction mechanisms; index 0 is the left/rear end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct StateSpace<T> {
    mechanisms: Vec<MechanismSpec<T>>,
}

/// One level per mechanism, in state-space order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RobotState {
    pub levels: Vec<MechanismState>,
}

impl RobotState {
    pub fn from_levels(levels: &[usize]) -> Self {
        Self {
            levels: levels.iter().copied().map(MechanismState::new).collect(),
        }
    }
}

impl fmt::Display for RobotState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for l in &self.levels {
            write!(f, "{}", l.level)?;
        }
        f.write_str(")")
    }
}

impl<T: Real> StateSpace<T> {
    pub fn new(mechanisms: Vec<MechanismSpec<T>>) -> Result<Self, StateError> {
        if mechanisms.is_empty() {
            return Err(StateError::Malformed("state space needs a mechanism".into()));
        }
        let mut card = 1usize;
        for m in &mechanisms {
            m.check()?;
            card = card.saturating_mul(m.level_count());
            if card > MAX_CARDINALITY {
                return Err(StateError::TooLarge(MAX_CARDINALITY));
            }
        }
        Ok(Self { mechanisms })
    }

    pub fn mechanisms(&self) -> &[MechanismSpec<T>] {
        &self.mechanisms
    }

    pub fn cardinality(&self) -> usize {
        self.mechanisms.iter().map(|m| m.level_count()).product()
    }

    pub fn index_of(&self, state: &RobotState) -> Result<usize, StateError> {
        if state.levels.len() != self.mechanisms.len() {
            return Err(StateError::ArityMismatch {
                expected: self.mechanisms.len(),
                got: state.levels.len(),
            });
        }
        let mut index = 0;
        for (i, (m, l)) in self.mechanisms.iter().zip(&state.levels).enumerate() {
            let radix = m.level_count();
            if l.level >= radix {
                return Err(StateError::LevelOutOfRange {
                    mechanism: i,
                    level: l.level,
                    level_count: radix,
                });
            }
            index = index * radix + l.level;
        }
        Ok(index)
    }

    pub fn state_of(&self, index: usize) -> Result<RobotState, StateError> {
        let cardinality = self.cardinality();
        if index >= cardinality {
            return Err(StateError::IndexOutOfRange { index, cardinality });
        }
        let mut rest = index;
        let mut levels = vec![MechanismState::new(0); self.mechanisms.len()];
        for (slot, m) in levels.iter_mut().zip(&self.mechanisms).rev() {
            let radix = m.level_count();
            slot.level = rest % radix;
            rest /= radix;
        }
        Ok(RobotState { levels })
    }

    /// Classifies one contact angle per mechanism into a robot state.
    pub fn classify(&self, angles: &[T]) -> Result<RobotState, StateError> {
        if angles.len() != self.mechanisms.len() {
            return Err(StateError::ArityMismatch {
                expected: self.mechanisms.len(),
                got: angles.len(),
            });
        }
        let levels = angles
            .iter()
            .zip(&self.mechanisms)
            .map(|(&psi, m)| state_from_angle(psi, m))
            .collect::<Result<_, _>>()?;
        Ok(RobotState { levels })
    }

    /// State strings in index order, e.g. `["(00)", "(01)", "(10)", "(11)"]`.
    pub fn labels(&self) -> Vec<String> {
        (0..self.cardinality())
            .map(|i| self.state_of(i).map(|s| s.to_string()).unwrap_or_default())
            .collect()
    }
}

/// Labels for `count` binary mechanisms.
pub fn binary_labels(count: usize) -> Vec<String> {
    (0..1usize << count)
        .map(|i| {
            let digits: String = (0..count)
                .rev()
                .map(|b| if i >> b & 1 == 1 { '1' } else { '0' })
                .collect();
            format!("({})", digits)
        })
        .collect()
}
