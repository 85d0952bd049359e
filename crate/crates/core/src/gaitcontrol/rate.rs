use super::GaitError;
use crate::planner::{sequence_reward, ControlSequence};
use crate::scalar::Real;
use crate::statecore::RewardMatrix;

/// Reward per second of a periodic cycle whose transitions take
/// `durations_ms` each (one entry per transition).
pub fn gait_rate<T: Real>(cycle: &ControlSequence, m: &RewardMatrix, durations_ms: &[T]) -> Result<T, GaitError> {
    if !cycle.is_periodic() {
        return Err(GaitError::InvalidInput("gait rate needs a periodic sequence".into()));
    }
    if durations_ms.len() != cycle.len() {
        return Err(GaitError::InvalidInput(format!(
            "{} durations given for {} transitions",
            durations_ms.len(),
            cycle.len()
        )));
    }
    if let Some(d) = durations_ms.iter().find(|d| !d.is_finite() || **d <= T::zero()) {
        return Err(GaitError::InvalidInput(format!(
            "duration must be positive, got {} ms",
            d
        )));
    }
    let reward = sequence_reward(cycle, m)?;
    let seconds = durations_ms.iter().copied().sum::<T>() / T::lit(1000.0);
    Ok(T::lit(reward as f64) / seconds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statecore::apply_mask;

    fn r1() -> RewardMatrix {
        RewardMatrix::from_rows(vec![
            vec![0, -1, 1, 0],
            vec![1, 0, 0, -1],
            vec![-1, 0, 0, 1],
            vec![0, 0, 0, 0],
        ])
        .unwrap()
    }

    #[test]
    fn c_t1_one_second_per_transition() {
        let c = ControlSequence::new(vec![0, 2, 1, 0]).unwrap();
        let r = gait_rate(&c, &r1(), &[1000.0f64; 3]).unwrap();
        assert!((r - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn c_l2_half_second_transitions() {
        let mut pairs: Vec<_> = (0..4).flat_map(|i| [(i, 1), (1, i)]).collect();
        pairs.extend([(0, 3), (3, 0)]);
        let m = apply_mask(&r1(), &pairs).unwrap();
        let c = ControlSequence::new(vec![2, 3, 2]).unwrap();
        assert_eq!(gait_rate(&c, &m, &[500.0, 500.0]).unwrap(), 1.0);
    }

    #[test]
    fn zero_reward_cycle() {
        let c = ControlSequence::new(vec![3, 3]).unwrap();
        assert_eq!(gait_rate(&c, &r1(), &[123.0f32]).unwrap(), 0.0);
    }

    #[test]
    fn rejects_bad_durations() {
        let c = ControlSequence::new(vec![0, 2, 1, 0]).unwrap();
        assert!(gait_rate(&c, &r1(), &[1000.0, 0.0, 1000.0]).is_err());
        assert!(gait_rate(&c, &r1(), &[1000.0]).is_err());
        let open = ControlSequence::new(vec![0, 2]).unwrap();
        assert!(gait_rate(&open, &r1(), &[1000.0]).is_err());
    }
}
