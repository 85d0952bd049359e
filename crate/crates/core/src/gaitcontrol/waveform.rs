use serde::{Deserialize, Serialize};

use super::GaitError;
use crate::quasistatic::{shape_from_activation, BodyModel};
use crate::scalar::{from_usize, Real};

pub const TIMELINE_HEADER: &str = "t_ms,actuator,level";

/// One actuator's periodic drive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Pulse<T> {
    /// Command level while active, in `[0, 1]`.
    pub strength: T,
    /// On-time per cycle, ms.
    pub active_ms: T,
    /// Period, ms.
    pub cycle_ms: T,
}

impl<T: Real> Pulse<T> {
    pub fn new(strength: T, active_ms: T, cycle_ms: T) -> Self {
        Self {
            strength,
            active_ms,
            cycle_ms,
        }
    }
}

/// Two pulse trains, actuator 2's starting `phase_ms` after actuator 1's.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ActuationWaveform<T> {
    pub pulses: [Pulse<T>; 2],
    pub phase_ms: T,
}

impl<T: Real> ActuationWaveform<T> {
    pub fn new(first: Pulse<T>, second: Pulse<T>, phase_ms: T) -> Self {
        Self {
            pulses: [first, second],
            phase_ms,
        }
    }

    pub fn check(&self) -> Result<(), GaitError> {
        let bad = |msg: String| Err(GaitError::InvalidWaveform(msg));
        for (i, p) in self.pulses.iter().enumerate() {
            if !(p.strength >= T::zero() && p.strength <= T::one()) {
                return bad(format!("actuator {} strength {} outside [0, 1]", i + 1, p.strength));
            }
            if !p.cycle_ms.is_finite() || !(p.active_ms > T::zero() && p.active_ms <= p.cycle_ms) {
                return bad(format!(
                    "actuator {} needs 0 < active time ({}) <= cycle time ({})",
                    i + 1,
                    p.active_ms,
                    p.cycle_ms
                ));
            }
        }
        let cycle = self.pulses[0].cycle_ms;
        if !(self.phase_ms >= T::zero() && self.phase_ms < cycle) {
            return bad(format!("phase {} ms outside [0, {}) ms", self.phase_ms, cycle));
        }
        Ok(())
    }

    fn offset(&self, actuator: usize) -> T {
        if actuator == 0 {
            T::zero()
        } else {
            self.phase_ms
        }
    }
}

/// A level change of one actuator (0-based) at time `t_ms`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct CommandEvent<T> {
    pub t_ms: T,
    pub actuator: usize,
    pub level: T,
}

/// Time-sorted actuator level changes. Levels hold between events and start
/// at 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct CommandTimeline<T> {
    pub actuators: usize,
    pub events: Vec<CommandEvent<T>>,
    pub horizon_ms: T,
}

impl<T: Real> CommandTimeline<T> {
    /// Levels in force at `t_ms`, events at exactly `t_ms` included.
    pub fn levels_at(&self, t_ms: T) -> Vec<T> {
        let mut levels = vec![T::zero(); self.actuators];
        for e in self.events.iter().take_while(|e| e.t_ms <= t_ms) {
            levels[e.actuator] = e.level;
        }
        levels
    }

    /// Piecewise-constant pieces as `(start_ms, levels)`, starting with the
    /// all-zero levels before the first event.
    pub fn segments(&self) -> Vec<(T, Vec<T>)> {
        let mut out = vec![(T::neg_infinity(), vec![T::zero(); self.actuators])];
        let mut k = 0;
        while k < self.events.len() {
            let t = self.events[k].t_ms;
            let mut levels = out.last().expect("non-empty").1.clone();
            while k < self.events.len() && self.events[k].t_ms == t {
                levels[self.events[k].actuator] = self.events[k].level;
                k += 1;
            }
            out.push((t, levels));
        }
        out
    }

    /// Rows of the `t_ms,actuator,level` table, actuators numbered from 1.
    pub fn to_csv(&self) -> String {
        let mut s = String::from(TIMELINE_HEADER);
        s.push('\n');
        for e in &self.events {
            s.push_str(&format!("{},{},{}\n", e.t_ms, e.actuator + 1, e.level));
        }
        s
    }
}

/// Open-loop timeline covering `cycles` periods of every actuator.
pub fn schedule_open_loop<T: Real>(w: &ActuationWaveform<T>, cycles: usize) -> Result<CommandTimeline<T>, GaitError> {
    w.check()?;
    if cycles == 0 {
        return Err(GaitError::InvalidInput("at least one cycle required".into()));
    }
    // (time, actuator, order within actuator, level)
    let mut raw = Vec::new();
    let mut horizon = T::zero();
    for (i, p) in w.pulses.iter().enumerate() {
        let offset = w.offset(i);
        for k in 0..cycles {
            let on = offset + from_usize::<T>(k) * p.cycle_ms;
            raw.push((on, i, 2 * k + 1, p.strength));
            raw.push((on + p.active_ms, i, 2 * k + 2, T::zero()));
        }
        horizon = horizon.max(offset + from_usize::<T>(cycles) * p.cycle_ms);
    }
    // An off event coinciding with the next on event sorts first.
    raw.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .expect("finite times")
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
    });
    Ok(CommandTimeline {
        actuators: 2,
        events: raw
            .into_iter()
            .map(|(t_ms, actuator, _, level)| CommandEvent { t_ms, actuator, level })
            .collect(),
        horizon_ms: horizon,
    })
}

/// States visited when the timeline's levels are applied directly as
/// activations of `body`, with consecutive repeats collapsed.
pub fn replay_open_loop<T: Real>(body: &BodyModel<T>, timeline: &CommandTimeline<T>) -> Result<Vec<usize>, GaitError> {
    let space = body.state_space()?;
    let mut visited: Vec<usize> = Vec::new();
    for (_, levels) in timeline.segments() {
        let shape = shape_from_activation(body, &levels)?;
        let state = space.classify(&[shape.psi_left, shape.psi_right])?;
        let index = space.index_of(&state)?;
        if visited.last() != Some(&index) {
            visited.push(index);
        }
    }
    Ok(visited)
}
