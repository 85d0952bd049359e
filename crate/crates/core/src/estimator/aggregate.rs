use crate::scalar::Real;

/// Weighted median of `(value, weight)` pairs.
///
/// Values are taken in ascending order until the running weight reaches half
/// the total. Landing exactly on half averages with the next value, so equal
/// weights give the ordinary median. `None` for empty input or zero total
/// weight.
pub fn weighted_median<T: Real>(samples: &[(T, T)]) -> Option<T> {
    let mut sorted: Vec<(T, T)> = samples.iter().copied().filter(|&(_, w)| w > T::zero()).collect();
    if sorted.is_empty() {
        return None;
    }
    sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite values"));
    let total: T = sorted.iter().map(|&(_, w)| w).sum();
    let half = total / T::lit(2.0);
    let mut cum = T::zero();
    for (k, &(v, w)) in sorted.iter().enumerate() {
        cum = cum + w;
        if cum == half {
            if let Some(&(next, _)) = sorted.get(k + 1) {
                return Some((v + next) / T::lit(2.0));
            }
            return Some(v);
        }
        if cum > half {
            return Some(v);
        }
    }
    sorted.last().map(|&(v, _)| v)
}

/// Weighted plurality over discrete rewards. A tie for first place yields 0.
pub fn weighted_vote<T: Real>(votes: &[(i32, T)]) -> Option<i32> {
    if votes.is_empty() {
        return None;
    }
    let mut tally = [T::zero(); 3];
    for &(r, w) in votes {
        let k = (r.clamp(-1, 1) + 1) as usize;
        tally[k] = tally[k] + w;
    }
    let best = tally.iter().copied().fold(T::neg_infinity(), T::max);
    let winners: Vec<i32> = (0..3).filter(|&k| tally[k] == best).map(|k| k as i32 - 1).collect();
    Some(if winners.len() == 1 { winners[0] } else { 0 })
}
