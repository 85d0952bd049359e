use serde::{Deserialize, Serialize};

use super::SimError;
use crate::scalar::Real;
use crate::statecore::{MechanismSpec, StateSpace};

pub const BODY_SCHEMA: &str = "gaitmatrix/body/v1";

/// Curvature imposed over `[start, end]` of the body's arc length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ActuatorSpan<T> {
    /// mm from the left end.
    pub start: T,
    /// mm from the left end.
    pub end: T,
    /// 1/mm at full activation. Zero models a dead actuator.
    pub max_curvature: T,
}

impl<T: Real> ActuatorSpan<T> {
    pub fn new(start: T, end: T, max_curvature: T) -> Self {
        Self {
            start,
            end,
            max_curvature,
        }
    }

    /// Length of `[a, b]` covered by the span.
    pub(crate) fn overlap(&self, a: T, b: T) -> T {
        (self.end.min(b) - self.start.max(a)).max(T::zero())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct BodyModel<T> {
    /// mm.
    pub length: T,
    /// g.
    pub mass: T,
    pub segment_count: usize,
    /// m/s².
    pub gravity: T,
    pub actuators: Vec<ActuatorSpan<T>>,
    /// Left pad (mechanism 0) then right pad.
    pub pads: [MechanismSpec<T>; 2],
}

impl<T: Real> BodyModel<T> {
    /// 80 mm, 3.3 g, 80 segments, two overlapping actuators.
    pub fn reference(left: MechanismSpec<T>, right: MechanismSpec<T>) -> Self {
        let k = T::lit(0.02);
        Self {
            length: T::lit(80.0),
            mass: T::lit(3.3),
            segment_count: 80,
            gravity: T::lit(9.81),
            actuators: vec![
                ActuatorSpan::new(T::zero(), T::lit(66.0), k),
                ActuatorSpan::new(T::lit(14.0), T::lit(80.0), k),
            ],
            pads: [left, right],
        }
    }

    /// Weight in newtons.
    pub fn weight(&self) -> T {
        self.mass / T::lit(1000.0) * self.gravity
    }

    pub fn segment_length(&self) -> T {
        self.length / crate::scalar::from_usize(self.segment_count)
    }

    pub fn state_space(&self) -> Result<StateSpace<T>, SimError> {
        Ok(StateSpace::new(self.pads.to_vec())?)
    }

    pub fn check(&self) -> Result<(), SimError> {
        let bad = |msg: String| Err(SimError::InvalidBody(msg));
        for (name, v) in [("length", self.length), ("mass", self.mass), ("gravity", self.gravity)] {
            if !v.is_finite() || v <= T::zero() {
                return bad(format!("{} must be positive, got {}", name, v));
            }
        }
        if self.segment_count < 8 {
            return bad(format!("at least 8 segments required, got {}", self.segment_count));
        }
        if self.actuators.is_empty() {
            return bad("at least one actuator required".into());
        }
        for (i, a) in self.actuators.iter().enumerate() {
            if !(a.start.is_finite() && a.end.is_finite() && a.start >= T::zero() && a.end <= self.length) {
                return bad(format!("actuator {} span lies outside [0, {}]", i + 1, self.length));
            }
            if a.start >= a.end {
                return bad(format!("actuator {} span is empty", i + 1));
            }
            if !a.max_curvature.is_finite() || a.max_curvature < T::zero() {
                return bad(format!(
                    "actuator {} max curvature must be non-negative, got {}",
                    i + 1,
                    a.max_curvature
                ));
            }
        }
        for pad in &self.pads {
            pad.check()?;
        }
        Ok(())
    }
}

/// Mirror image of `body`: spans reflected end for end, actuator order
/// reversed and pads swapped. Applying it twice returns the original.
pub fn mirror_body<T: Real>(body: &BodyModel<T>) -> BodyModel<T> {
    let l = body.length;
    BodyModel {
        actuators: body
            .actuators
            .iter()
            .rev()
            .map(|a| ActuatorSpan::new(l - a.end, l - a.start, a.max_curvature))
            .collect(),
        pads: [body.pads[1].clone(), body.pads[0].clone()],
        ..body.clone()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real", default)]
pub struct SimConfig<T> {
    /// Increments per transition.
    pub substeps: usize,
    /// mm; displacements smaller in magnitude discretize to 0.
    pub deadband: T,
    /// Relative capacity difference below which neither pad slips.
    pub stick_tolerance: T,
    /// Points per actuator in the calibration grid.
    pub calibration_grid: usize,
}

impl<T: Real> Default for SimConfig<T> {
    fn default() -> Self {
        Self {
            substeps: 64,
            deadband: T::lit(0.1),
            stick_tolerance: T::lit(0.5),
            calibration_grid: 64,
        }
    }
}

impl<T: Real> SimConfig<T> {
    pub fn check(&self) -> Result<(), SimError> {
        let bad = |msg: String| Err(SimError::InvalidConfig(msg));
        if self.substeps < 2 {
            return bad(format!("substeps must be at least 2, got {}", self.substeps));
        }
        if !self.deadband.is_finite() || self.deadband <= T::zero() {
            return bad(format!("deadband must be positive, got {}", self.deadband));
        }
        if !self.stick_tolerance.is_finite() || self.stick_tolerance < T::zero() {
            return bad(format!(
                "stick tolerance must be non-negative, got {}",
                self.stick_tolerance
            ));
        }
        if self.calibration_grid < 2 {
            return bad(format!(
                "calibration grid needs at least 2 points, got {}",
                self.calibration_grid
            ));
        }
        Ok(())
    }
}

/// On-disk body configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct BodyDocument<T> {
    pub schema: String,
    pub body: BodyModel<T>,
    #[serde(default)]
    pub sim: SimConfig<T>,
}

impl<T: Real> BodyDocument<T> {
    pub fn new(body: BodyModel<T>, sim: SimConfig<T>) -> Self {
        Self {
            schema: BODY_SCHEMA.into(),
            body,
            sim,
        }
    }

    pub fn check(&self) -> Result<(), SimError> {
        if self.schema != BODY_SCHEMA {
            return Err(SimError::InvalidBody(format!(
                "unsupported schema `{}`, expected `{}`",
                self.schema, BODY_SCHEMA
            )));
        }
        self.body.check()?;
        self.sim.check()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pads() -> (MechanismSpec<f64>, MechanismSpec<f64>) {
        (
            MechanismSpec::binary("left", 0.26, 1.2, 0.2).unwrap(),
            MechanismSpec::binary("right", 0.26, 0.2, 1.2).unwrap(),
        )
    }

    #[test]
    fn reference_body_is_valid() {
        let (l, r) = pads();
        let b = BodyModel::reference(l, r);
        b.check().unwrap();
        assert!((b.weight() - 0.0033 * 9.81).abs() < 1e-15);
        assert_eq!(b.state_space().unwrap().cardinality(), 4);
    }

    #[test]
    fn mirror_is_involution() {
        let (l, r) = pads();
        let b = BodyModel::reference(l, r);
        let m = mirror_body(&b);
        assert_eq!(m.pads[0].label, "right");
        assert_eq!(m.actuators[0], ActuatorSpan::new(0.0, 66.0, 0.02));
        assert_eq!(mirror_body(&m), b);
    }

    #[test]
    fn rejects_bad_spans() {
        let (l, r) = pads();
        let mut b = BodyModel::reference(l, r);
        b.actuators[0].end = 90.0;
        assert!(b.check().is_err());
        b.actuators[0].end = 0.0;
        assert!(b.check().is_err());
        b.actuators[0].end = 66.0;
        b.actuators[1].max_curvature = -0.1;
        assert!(b.check().is_err());
        b.actuators[1].max_curvature = 0.0;
        assert!(b.check().is_ok());
        b.segment_count = 4;
        assert!(b.check().is_err());
    }

    #[test]
    fn document_roundtrip() {
        let (l, r) = pads();
        let doc = BodyDocument::new(BodyModel::reference(l, r), SimConfig::default());
        let text = serde_json::to_string_pretty(&doc).unwrap();
        let back: BodyDocument<f64> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, doc);
        back.check().unwrap();
    }

    #[test]
    fn config_checks() {
        let mut c = SimConfig::<f64>::default();
        c.check().unwrap();
        c.substeps = 1;
        assert!(c.check().is_err());
    }
}
