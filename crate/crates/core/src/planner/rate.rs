use super::{canonical_cycle, ensure_valid, sequence_reward, ControlSequence, PlanError};
use crate::scalar::Real;
use crate::statecore::RewardMatrix;

/// Bisection stops once the bracket on the rate is narrower than this.
pub const RATE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct RateCycle<T> {
    pub cycle: ControlSequence,
    pub reward: i64,
    /// Total cycle duration in seconds.
    pub duration: T,
    /// Reward per second.
    pub rate: T,
}

/// Simple cycle with the largest total reward over total duration.
///
/// Bisects on the rate `λ`: a cycle beats `λ` exactly when it is positive
/// under the weights `reward − λ·duration`, which Bellman–Ford detects.
/// `durations` is indexed like the matrix and is read only on allowed entries.
pub fn optimal_rate_cycle<T: Real>(m: &RewardMatrix, durations: &[Vec<T>]) -> Result<RateCycle<T>, PlanError> {
    ensure_valid(m)?;
    let n = m.n();
    if durations.len() != n || durations.iter().any(|row| row.len() != n) {
        return Err(PlanError::InvalidInput(format!("durations must be {}x{}", n, n)));
    }
    let mut d_min = T::infinity();
    for u in 0..n {
        for (v, _) in m.successors(u) {
            let d = durations[u][v];
            if !d.is_finite() || d <= T::zero() {
                return Err(PlanError::InvalidInput(format!(
                    "duration of {} -> {} must be positive, got {}",
                    u, v, d
                )));
            }
            d_min = d_min.min(d);
        }
    }
    if m.allowed_count() == 0 {
        return Err(PlanError::NoFeasibleCycle);
    }

    let bound = T::one() / d_min + T::one();
    let mut lo = -bound;
    let mut hi = bound;
    let mut witness = positive_cycle(m, durations, lo).ok_or(PlanError::NoFeasibleCycle)?;

    let tol = T::lit(RATE_TOLERANCE).max(T::epsilon() * bound * T::lit(4.0));
    for _ in 0..256 {
        if hi - lo <= tol {
            break;
        }
        let mid = (lo + hi) / T::lit(2.0);
        match positive_cycle(m, durations, mid) {
            Some(c) => {
                lo = mid;
                witness = c;
            }
            None => hi = mid,
        }
    }

    let cycle = canonical_cycle(witness);
    let reward = sequence_reward(&cycle, m)?;
    let duration: T = cycle.transitions().map(|(u, v)| durations[u][v]).sum();
    Ok(RateCycle {
        rate: T::lit(reward as f64) / duration,
        cycle,
        reward,
        duration,
    })
}

/// A simple cycle with positive total `reward − rate·duration`, if any.
fn positive_cycle<T: Real>(m: &RewardMatrix, durations: &[Vec<T>], rate: T) -> Option<Vec<usize>> {
    let n = m.n();
    let mut dist = vec![T::zero(); n];
    let mut pred = vec![usize::MAX; n];
    let slack = T::epsilon() * T::lit(64.0);
    let mut last = None;
    for _ in 0..n {
        last = None;
        for u in 0..n {
            for (v, r) in m.successors(u) {
                let cand = dist[u] + T::lit(r as f64) - rate * durations[u][v];
                if cand > dist[v] + slack * (T::one() + dist[v].abs()) {
                    dist[v] = cand;
                    pred[v] = u;
                    last = Some(v);
                }
            }
        }
        last?;
    }
    let mut v = last?;
    for _ in 0..n {
        v = pred[v];
    }
    let mut cycle = vec![v];
    let mut u = pred[v];
    while u != v {
        cycle.push(u);
        u = pred[u];
    }
    cycle.reverse();
    Some(cycle)
}
