use super::{
    normal_forces, shape_from_activation, slip_mode, slip_step, BodyModel, Placement, ShapeState, SimConfig, SimError,
    SlipMode,
};
use crate::estimator::{discretize, TrialRecord};
use crate::scalar::{from_usize, Real};
use crate::statecore::{RewardMatrix, RobotState, StateSpace};

/// Largest calibration grid, counted over all actuators.
const MAX_GRID_POINTS: usize = 1 << 20;

/// The activation chosen to realize one state.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibratedState<T> {
    pub activation: Vec<T>,
    /// Smallest distance of either contact angle from its nearest threshold.
    pub margin: T,
    pub psi_left: T,
    pub psi_right: T,
}

/// Calibrated activation per state index; `None` where no grid point
/// realizes the state.
#[derive(Debug, Clone, PartialEq)]
pub struct Calibration<T> {
    pub labels: Vec<String>,
    pub states: Vec<Option<CalibratedState<T>>>,
}

impl<T: Real> Calibration<T> {
    pub fn is_realizable(&self, index: usize) -> bool {
        self.states.get(index).is_some_and(Option::is_some)
    }

    /// Labels of every realizable state.
    pub fn achieved(&self) -> Vec<String> {
        (0..self.states.len())
            .filter(|&i| self.is_realizable(i))
            .map(|i| self.labels[i].clone())
            .collect()
    }

    pub fn activation(&self, index: usize) -> Result<&[T], SimError> {
        match self.states.get(index) {
            Some(Some(c)) => Ok(&c.activation),
            _ => Err(SimError::Unrealizable {
                target: self.labels.get(index).cloned().unwrap_or_else(|| index.to_string()),
                achieved: self.achieved(),
            }),
        }
    }
}

fn state_index<T: Real>(space: &StateSpace<T>, shape: &ShapeState<T>) -> Result<usize, SimError> {
    let state = space.classify(&[shape.psi_left, shape.psi_right])?;
    Ok(space.index_of(&state)?)
}

/// Grid search over activations for every state at once.
///
/// Each actuator takes `cfg.calibration_grid` evenly spaced levels in
/// `[0, 1]`. Per state, the point whose contact angles sit furthest from any
/// threshold wins; ties keep the first point in lexicographic order.
/// Shapes that dip below the ground or tip are skipped.
pub fn calibrate_all<T: Real>(body: &BodyModel<T>, cfg: &SimConfig<T>) -> Result<Calibration<T>, SimError> {
    body.check()?;
    cfg.check()?;
    let space = body.state_space()?;
    let g = cfg.calibration_grid;
    let k = body.actuators.len();
    let points = (0..k)
        .try_fold(1usize, |acc, _| acc.checked_mul(g))
        .filter(|&p| p <= MAX_GRID_POINTS)
        .ok_or_else(|| SimError::InvalidConfig(format!("calibration grid {}^{} is too large", g, k)))?;

    let step = T::one() / from_usize::<T>(g - 1);
    let mut best: Vec<Option<CalibratedState<T>>> = vec![None; space.cardinality()];
    let mut digits = vec![0usize; k];
    for p in 0..points {
        let mut rest = p;
        for d in digits.iter_mut().rev() {
            *d = rest % g;
            rest /= g;
        }
        let a: Vec<T> = digits.iter().map(|&d| from_usize::<T>(d) * step).collect();
        let Ok(shape) = shape_from_activation(body, &a) else {
            continue;
        };
        if normal_forces(&shape, body).is_err() {
            continue;
        }
        let index = state_index(&space, &shape)?;
        let margin = body.pads[0]
            .margin(shape.psi_left)
            .min(body.pads[1].margin(shape.psi_right));
        if best[index].as_ref().is_none_or(|b| margin > b.margin) {
            best[index] = Some(CalibratedState {
                activation: a,
                margin,
                psi_left: shape.psi_left,
                psi_right: shape.psi_right,
            });
        }
    }
    Ok(Calibration {
        labels: space.labels(),
        states: best,
    })
}

/// Activation realizing `target` with the largest threshold margin.
pub fn calibrate_activation<T: Real>(
    body: &BodyModel<T>,
    target: &RobotState,
    cfg: &SimConfig<T>,
) -> Result<Vec<T>, SimError> {
    let space = body.state_space()?;
    let index = space.index_of(target)?;
    let cal = calibrate_all(body, cfg)?;
    cal.activation(index).map(<[T]>::to_vec)
}

/// One increment of a simulated activation ramp.
#[derive(Debug, Clone, PartialEq)]
pub struct SubstepRecord<T> {
    pub index: usize,
    pub activation: Vec<T>,
    pub psi_left: T,
    pub psi_right: T,
    /// Pad normal forces of this shape, N.
    pub normal: (T, T),
    /// How the body reached this shape; `None` for the starting shape.
    pub mode: Option<SlipMode>,
    pub placement: Placement<T>,
}

/// Result of ramping between two activations.
#[derive(Debug, Clone, PartialEq)]
pub struct Transit<T> {
    /// Net centre-of-mass displacement, mm.
    pub displacement: T,
    /// Starting shape followed by one record per increment.
    pub substeps: Vec<SubstepRecord<T>>,
}

impl<T: Real> Transit<T> {
    pub fn end(&self) -> &SubstepRecord<T> {
        self.substeps.last().expect("transit has a starting record")
    }
}

/// Ramps linearly from `from` to `to` in `cfg.substeps` increments, starting
/// with the centre of mass at world position `start`.
///
/// Each increment's slip assignment uses the friction levels and normal
/// forces of the shape it departs from.
pub fn simulate_activation_path<T: Real>(
    body: &BodyModel<T>,
    from: &[T],
    to: &[T],
    start: T,
    cfg: &SimConfig<T>,
) -> Result<Transit<T>, SimError> {
    cfg.check()?;
    let space = body.state_space()?;
    let tipping = |e: SimError, k: usize| match e {
        SimError::Tipping { com, chord, .. } => SimError::Tipping {
            substep: Some(k),
            com,
            chord,
        },
        other => other,
    };

    let mut shape = shape_from_activation(body, from)?;
    let mut normal = normal_forces(&shape, body).map_err(|e| tipping(e, 0))?;
    let mut placement = Placement::of(&shape, start - shape.com[0]);
    let mut records = vec![SubstepRecord {
        index: 0,
        activation: from.to_vec(),
        psi_left: shape.psi_left,
        psi_right: shape.psi_right,
        normal,
        mode: None,
        placement,
    }];

    let total = from_usize::<T>(cfg.substeps);
    for k in 1..=cfg.substeps {
        let a: Vec<T> = if k == cfg.substeps {
            to.to_vec()
        } else {
            let f = from_usize::<T>(k) / total;
            from.iter().zip(to).map(|(&x, &y)| x + (y - x) * f).collect()
        };
        let state = space.classify(&[shape.psi_left, shape.psi_right])?;
        let mu = |pad: usize| body.pads[pad].friction_at(state.levels[pad]);
        let mode = slip_mode(mu(0) * normal.0, mu(1) * normal.1, cfg.stick_tolerance);

        shape = shape_from_activation(body, &a)?;
        normal = normal_forces(&shape, body).map_err(|e| tipping(e, k))?;
        placement = slip_step(&placement, &shape, mode);
        records.push(SubstepRecord {
            index: k,
            activation: a,
            psi_left: shape.psi_left,
            psi_right: shape.psi_right,
            normal,
            mode: Some(mode),
            placement,
        });
    }
    Ok(Transit {
        displacement: placement.com - start,
        substeps: records,
    })
}

/// Centre-of-mass displacement of one state transition between calibrated
/// activations, mm.
pub fn execute_transition<T: Real>(
    body: &BodyModel<T>,
    from: &RobotState,
    to: &RobotState,
    cfg: &SimConfig<T>,
) -> Result<T, SimError> {
    let space = body.state_space()?;
    let (i, j) = (space.index_of(from)?, space.index_of(to)?);
    let cal = calibrate_all(body, cfg)?;
    let transit = simulate_activation_path(body, cal.activation(i)?, cal.activation(j)?, T::zero(), cfg)?;
    Ok(transit.displacement)
}

/// Raw displacement of every transition between realizable states.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionTable<T> {
    pub calibration: Calibration<T>,
    /// mm, row = from; `None` where either state is unrealizable.
    pub displacements: Vec<Vec<Option<T>>>,
}

impl<T: Real> TransitionTable<T> {
    pub fn n(&self) -> usize {
        self.displacements.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.calibration.labels
    }

    /// Discretizes into a reward matrix; unrealizable pairs are forbidden.
    pub fn to_matrix(&self, deadband: T) -> Result<RewardMatrix, SimError> {
        let mut m = RewardMatrix::masked(self.labels().to_vec());
        for (i, row) in self.displacements.iter().enumerate() {
            for (j, d) in row.iter().enumerate() {
                if let Some(d) = *d {
                    m.set(i, j, Some(discretize(d, deadband)?));
                }
            }
        }
        Ok(m)
    }

    /// One trial per simulated transition, in row-major order.
    pub fn to_trials(&self) -> Vec<TrialRecord<T>> {
        let mut out = Vec::new();
        for (i, row) in self.displacements.iter().enumerate() {
            for (j, d) in row.iter().enumerate() {
                if let Some(d) = *d {
                    let t = from_usize::<T>(out.len());
                    out.push(TrialRecord::new(i, j, d, t).tagged("simulated"));
                }
            }
        }
        out
    }
}

/// Simulates every ordered pair of realizable states.
pub fn simulate_transitions<T: Real>(body: &BodyModel<T>, cfg: &SimConfig<T>) -> Result<TransitionTable<T>, SimError> {
    let cal = calibrate_all(body, cfg)?;
    let n = cal.states.len();
    let mut displacements = vec![vec![None; n]; n];
    for i in 0..n {
        for j in 0..n {
            let (Some(a), Some(b)) = (&cal.states[i], &cal.states[j]) else {
                continue;
            };
            if i == j {
                displacements[i][j] = Some(T::zero());
                continue;
            }
            let transit =
                simulate_activation_path(body, &a.activation, &b.activation, T::zero(), cfg).map_err(|e| {
                    SimError::Transition {
                        from: cal.labels[i].clone(),
                        to: cal.labels[j].clone(),
                        source: Box::new(e),
                    }
                })?;
            displacements[i][j] = Some(transit.displacement);
        }
    }
    Ok(TransitionTable {
        calibration: cal,
        displacements,
    })
}

/// Reward matrix of `body`: simulated transitions discretized with
/// `cfg.deadband`.
pub fn build_reward_matrix<T: Real>(body: &BodyModel<T>, cfg: &SimConfig<T>) -> Result<RewardMatrix, SimError> {
    simulate_transitions(body, cfg)?.to_matrix(cfg.deadband)
}
