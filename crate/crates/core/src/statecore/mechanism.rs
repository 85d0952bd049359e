use serde::{Deserialize, Serialize};

use super::StateError;
use crate::scalar::Real;

/// Largest level count a mechanism may have; levels render as one decimal
/// digit in state strings.
pub const MAX_LEVELS: usize = 10;

/// A friction contact: its critical contact angles and the friction
/// coefficient in effect at each discrete level.
///
/// Level `k` holds while `thresholds[k-1] <= ψ < thresholds[k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct MechanismSpec<T> {
    pub label: String,
    /// Critical contact angles in radians, strictly increasing.
    pub thresholds: Vec<T>,
    /// Friction coefficient per level; `thresholds.len() + 1` entries.
    pub friction: Vec<T>,
}

impl<T: Real> MechanismSpec<T> {
    pub fn new(label: impl Into<String>, thresholds: Vec<T>, friction: Vec<T>) -> Result<Self, StateError> {
        let spec = Self {
            label: label.into(),
            thresholds,
            friction,
        };
        spec.check()?;
        Ok(spec)
    }

    /// Two-level pad: `low` friction below the critical angle, `high` at or
    /// above it.
    pub fn binary(label: impl Into<String>, critical: T, below: T, above: T) -> Result<Self, StateError> {
        Self::new(label, vec![critical], vec![below, above])
    }

    pub fn level_count(&self) -> usize {
        self.thresholds.len() + 1
    }

    /// Friction coefficient at `level`.
    pub fn friction_at(&self, level: MechanismState) -> T {
        self.friction[level.level]
    }

    /// Distance from `psi` to the nearest critical angle.
    pub fn margin(&self, psi: T) -> T {
        self.thresholds
            .iter()
            .map(|&t| (psi - t).abs())
            .fold(T::infinity(), T::min)
    }

    pub fn check(&self) -> Result<(), StateError> {
        let fail = |reason: String| {
            Err(StateError::InvalidMechanism {
                label: self.label.clone(),
                reason,
            })
        };
        if self.thresholds.is_empty() {
            return fail("at least one critical angle is required".into());
        }
        if self.level_count() > MAX_LEVELS {
            return fail(format!("at most {} levels supported", MAX_LEVELS));
        }
        let half_pi = T::FRAC_PI_2();
        for &t in &self.thresholds {
            if !t.is_finite() || t <= -half_pi || t >= half_pi {
                return fail(format!("critical angle {} outside (-π/2, π/2)", t));
            }
        }
        if self.thresholds.windows(2).any(|w| w[0] >= w[1]) {
            return fail("critical angles must be strictly increasing".into());
        }
        if self.friction.len() != self.level_count() {
            return fail(format!(
                "{} friction coefficients for {} levels",
                self.friction.len(),
                self.level_count()
            ));
        }
        if self.friction.iter().any(|&mu| !mu.is_finite() || mu <= T::zero()) {
            return fail("friction coefficients must be positive and finite".into());
        }
        Ok(())
    }
}

/// Discrete friction level of one mechanism.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MechanismState {
    pub level: usize,
}

impl MechanismState {
    pub const fn new(level: usize) -> Self {
        Self { level }
    }
}

/// Classifies a contact angle: the level is the number of critical angles at
/// or below `psi`, so `psi == ψ*` lands on the higher level.
pub fn state_from_angle<T: Real>(psi: T, spec: &MechanismSpec<T>) -> Result<MechanismState, StateError> {
    if !psi.is_finite() {
        return Err(StateError::NonFiniteAngle(psi.as_f64()));
    }
    let level = spec.thresholds.iter().filter(|&&t| psi >= t).count();
    Ok(MechanismState { level })
}
