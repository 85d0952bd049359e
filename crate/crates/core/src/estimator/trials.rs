use serde::{Deserialize, Serialize};

use super::{weighted_median, weighted_vote, EstimateError};
use crate::scalar::Real;
use crate::statecore::{default_labels, RewardMatrix};

pub const COVERAGE_SCHEMA: &str = "gaitmatrix/coverage/v1";

/// Reward of a displacement: `+1` at or beyond `eps`, `-1` at or beyond
/// `-eps`, otherwise `0`.
pub fn discretize<T: Real>(displacement: T, eps: T) -> Result<i32, EstimateError> {
    if !displacement.is_finite() {
        return Err(EstimateError::NonFinite(displacement.as_f64()));
    }
    if !(eps > T::zero()) || !eps.is_finite() {
        return Err(EstimateError::InvalidConfig(format!(
            "deadband must be positive, got {}",
            eps
        )));
    }
    Ok(if displacement >= eps {
        1
    } else if displacement <= -eps {
        -1
    } else {
        0
    })
}

/// One observed transition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct TrialRecord<T> {
    pub from: usize,
    pub to: usize,
    /// Signed centre-of-mass displacement in mm, positive forward.
    pub displacement: T,
    /// Seconds.
    pub timestamp: T,
    #[serde(default)]
    pub tag: String,
}

impl<T: Real> TrialRecord<T> {
    pub fn new(from: usize, to: usize, displacement: T, timestamp: T) -> Self {
        Self {
            from,
            to,
            displacement,
            timestamp,
            tag: String::new(),
        }
    }

    pub fn tagged(mut self, tag: impl Into<String>) -> Self {
        self.tag = tag.into();
        self
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregation {
    /// Weighted median of raw displacements, then discretize.
    #[default]
    Median,
    /// Discretize each trial, then weighted vote.
    Majority,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real", default)]
pub struct EstimatorConfig<T> {
    /// mm.
    pub deadband: T,
    pub aggregation: Aggregation,
    /// Seconds; `None` weights every trial equally.
    pub recency_halflife: Option<T>,
    pub min_trials: usize,
    /// Allow unobserved self-transitions with reward 0 instead of masking
    /// them.
    pub zero_unobserved_diagonal: bool,
}

impl<T: Real> Default for EstimatorConfig<T> {
    fn default() -> Self {
        Self {
            deadband: T::lit(0.1),
            aggregation: Aggregation::Median,
            recency_halflife: None,
            min_trials: 1,
            zero_unobserved_diagonal: false,
        }
    }
}

impl<T: Real> EstimatorConfig<T> {
    pub fn check(&self) -> Result<(), EstimateError> {
        if !(self.deadband > T::zero()) || !self.deadband.is_finite() {
            return Err(EstimateError::InvalidConfig(format!(
                "deadband must be positive, got {}",
                self.deadband
            )));
        }
        if self.min_trials == 0 {
            return Err(EstimateError::InvalidConfig("min_trials must be at least 1".into()));
        }
        if let Some(h) = self.recency_halflife {
            if !(h > T::zero()) || !h.is_finite() {
                return Err(EstimateError::InvalidConfig(format!(
                    "recency half-life must be positive, got {}",
                    h
                )));
            }
        }
        Ok(())
    }
}

/// Observations per ordered pair, kept in a canonical order so the derived
/// matrix depends only on the multiset of trials.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialStatistics<T> {
    n: usize,
    /// `(timestamp, displacement)`, row-major by pair.
    pairs: Vec<Vec<(T, T)>>,
}

impl<T: Real> TrialStatistics<T> {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            pairs: vec![Vec::new(); n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn count(&self, from: usize, to: usize) -> usize {
        self.pairs[from * self.n + to].len()
    }

    pub fn observations(&self, from: usize, to: usize) -> &[(T, T)] {
        &self.pairs[from * self.n + to]
    }

    fn check_trial(&self, record: usize, t: &TrialRecord<T>) -> Result<(), EstimateError> {
        if t.from >= self.n || t.to >= self.n {
            return Err(EstimateError::TrialOutOfRange {
                record,
                from: t.from,
                to: t.to,
                n: self.n,
            });
        }
        if !t.displacement.is_finite() {
            return Err(EstimateError::InvalidTrial {
                record,
                reason: format!("displacement must be finite, got {}", t.displacement),
            });
        }
        if !t.timestamp.is_finite() {
            return Err(EstimateError::InvalidTrial {
                record,
                reason: format!("timestamp must be finite, got {}", t.timestamp),
            });
        }
        Ok(())
    }

    fn insert(&mut self, t: &TrialRecord<T>) {
        let obs = &mut self.pairs[t.from * self.n + t.to];
        let item = (t.timestamp, t.displacement);
        let pos = obs.partition_point(|&o| canonical_lt(o, item));
        obs.insert(pos, item);
    }

    /// Reward for one pair, `None` when it stays forbidden.
    fn derive(&self, from: usize, to: usize, cfg: &EstimatorConfig<T>) -> Result<Option<i32>, EstimateError> {
        let obs = self.observations(from, to);
        if obs.len() < cfg.min_trials {
            let zero_diag = from == to && cfg.zero_unobserved_diagonal;
            return Ok(zero_diag.then_some(0));
        }
        let latest = obs.iter().map(|&(t, _)| t).fold(T::neg_infinity(), T::max);
        let weight = |t: T| match cfg.recency_halflife {
            None => T::one(),
            Some(h) => T::lit(0.5).powf((latest - t) / h),
        };
        match cfg.aggregation {
            Aggregation::Median => {
                let samples: Vec<(T, T)> = obs.iter().map(|&(t, d)| (d, weight(t))).collect();
                match weighted_median(&samples) {
                    Some(d) => discretize(d, cfg.deadband).map(Some),
                    None => Ok(None),
                }
            }
            Aggregation::Majority => {
                let votes = obs
                    .iter()
                    .map(|&(t, d)| discretize(d, cfg.deadband).map(|r| (r, weight(t))))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(weighted_vote(&votes))
            }
        }
    }

    pub fn coverage(&self, m: &RewardMatrix, cfg: &EstimatorConfig<T>) -> CoverageReport {
        let n = self.n;
        let counts: Vec<Vec<usize>> = (0..n).map(|i| (0..n).map(|j| self.count(i, j)).collect()).collect();
        let masked = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| !m.is_allowed(i, j))
            .map(|(i, j)| format!("{}->{}", m.describe(i), m.describe(j)))
            .collect();
        let observed_pairs = counts.iter().flatten().filter(|&&c| c >= cfg.min_trials).count();
        CoverageReport {
            schema: COVERAGE_SCHEMA.into(),
            n,
            states: m.labels().to_vec(),
            counts,
            observed_pairs,
            total_pairs: n * n,
            masked,
            deadband_mm: cfg.deadband.as_f64(),
            aggregation: cfg.aggregation,
            min_trials: cfg.min_trials,
            recency_halflife_s: cfg.recency_halflife.map(Real::as_f64),
        }
    }
}

fn canonical_lt<T: Real>(a: (T, T), b: (T, T)) -> bool {
    a.0 < b.0 || (a.0 == b.0 && a.1 < b.1)
}

/// Which pairs were observed and which stayed forbidden.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub schema: String,
    pub n: usize,
    pub states: Vec<String>,
    /// Trials per ordered pair, row = from.
    pub counts: Vec<Vec<usize>>,
    /// Pairs with at least `min_trials` trials.
    pub observed_pairs: usize,
    pub total_pairs: usize,
    /// Forbidden pairs as `"i:(..)->j:(..)"`.
    pub masked: Vec<String>,
    pub deadband_mm: f64,
    pub aggregation: Aggregation,
    pub min_trials: usize,
    pub recency_halflife_s: Option<f64>,
}

/// A learned matrix together with the statistics it was derived from.
#[derive(Debug, Clone, PartialEq)]
pub struct OnlineEstimate<T> {
    pub matrix: RewardMatrix,
    pub statistics: TrialStatistics<T>,
}

impl<T: Real> OnlineEstimate<T> {
    /// Estimate before any trial.
    pub fn empty(n: usize, cfg: &EstimatorConfig<T>) -> Result<Self, EstimateError> {
        let (matrix, _) = estimate_matrix(&[], n, cfg)?;
        Ok(Self {
            matrix,
            statistics: TrialStatistics::new(n),
        })
    }
}

/// Batch estimate of an `n`-state matrix from `trials`.
pub fn estimate_matrix<T: Real>(
    trials: &[TrialRecord<T>],
    n: usize,
    cfg: &EstimatorConfig<T>,
) -> Result<(RewardMatrix, CoverageReport), EstimateError> {
    cfg.check()?;
    let mut stats = TrialStatistics::new(n);
    for (k, t) in trials.iter().enumerate() {
        stats.check_trial(k, t)?;
        stats.insert(t);
    }
    let mut m = RewardMatrix::masked(default_labels(n));
    for i in 0..n {
        for j in 0..n {
            m.set(i, j, stats.derive(i, j, cfg)?);
        }
    }
    let report = stats.coverage(&m, cfg);
    Ok((m, report))
}

/// Folds one trial into `current`, re-deriving only the affected entry.
pub fn update_online<T: Real>(
    current: &OnlineEstimate<T>,
    trial: &TrialRecord<T>,
    cfg: &EstimatorConfig<T>,
) -> Result<OnlineEstimate<T>, EstimateError> {
    cfg.check()?;
    if current.matrix.n() != current.statistics.n() {
        return Err(EstimateError::DimensionMismatch {
            expected: current.matrix.n(),
            got: current.statistics.n(),
        });
    }
    let mut next = current.clone();
    next.statistics.check_trial(0, trial)?;
    next.statistics.insert(trial);
    let entry = next.statistics.derive(trial.from, trial.to, cfg)?;
    next.matrix.set(trial.from, trial.to, entry);
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statecore::validate;

    const R3: [[i32; 4]; 4] = [[0, -1, 1, 1], [1, 0, 0, -1], [-1, -1, 0, -1], [-1, 1, 0, 0]];

    fn replay(rows: &[[i32; 4]; 4]) -> Vec<TrialRecord<f64>> {
        let mut out = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            for (j, &r) in row.iter().enumerate() {
                out.push(TrialRecord::new(i, j, r as f64, (i * 4 + j) as f64));
            }
        }
        out
    }

    #[test]
    fn discretize_boundaries() {
        assert_eq!(discretize(0.5, 0.1).unwrap(), 1);
        assert_eq!(discretize(-0.05, 0.1).unwrap(), 0);
        assert_eq!(discretize(0.1, 0.1).unwrap(), 1);
        assert_eq!(discretize(-0.1, 0.1).unwrap(), -1);
        assert!(discretize(f64::NAN, 0.1).is_err());
        assert!(discretize(1.0, 0.0).is_err());
    }

    #[test]
    fn r3_replay_recovers_matrix() {
        let (m, report) = estimate_matrix(&replay(&R3), 4, &EstimatorConfig::default()).unwrap();
        assert_eq!(m.rows(), R3.iter().map(|r| r.to_vec()).collect::<Vec<_>>());
        assert_eq!(m.allowed_count(), 16);
        assert_eq!(report.observed_pairs, 16);
        assert!(report.masked.is_empty());
    }

    #[test]
    fn no_trials_masks_everything() {
        let (m, report) = estimate_matrix::<f64>(&[], 4, &EstimatorConfig::default()).unwrap();
        assert_eq!(m.allowed_count(), 0);
        assert_eq!((report.observed_pairs, report.total_pairs), (0, 16));
        assert_eq!(report.masked.len(), 16);
        assert!(validate(&m).is_empty());
    }

    #[test]
    fn unobserved_diagonal_can_default_to_zero() {
        let cfg = EstimatorConfig {
            zero_unobserved_diagonal: true,
            ..EstimatorConfig::default()
        };
        let (m, _) = estimate_matrix::<f64>(&[], 4, &cfg).unwrap();
        assert_eq!(m.allowed_count(), 4);
        assert!((0..4).all(|i| m.get(i, i) == Some(0)));
    }

    #[test]
    fn median_of_three() {
        let trials = [0.5, 0.4, -0.6].map(|d| TrialRecord::new(0, 2, d, 0.0));
        let (m, _) = estimate_matrix(&trials, 4, &EstimatorConfig::default()).unwrap();
        assert_eq!(m.get(0, 2), Some(1));
    }

    #[test]
    fn majority_mode() {
        let trials = [0.5, -0.4, -0.6].map(|d| TrialRecord::new(1, 0, d, 0.0));
        let cfg = EstimatorConfig {
            aggregation: Aggregation::Majority,
            ..EstimatorConfig::default()
        };
        let (m, _) = estimate_matrix(&trials, 4, &cfg).unwrap();
        assert_eq!(m.get(1, 0), Some(-1));
    }

    #[test]
    fn recent_trial_flips_stale_entry() {
        let stale = TrialRecord::new(0, 2, 1.0, 0.0);
        let fresh = TrialRecord::new(0, 2, -1.0, 10.0);
        let cfg = EstimatorConfig {
            recency_halflife: Some(1.0),
            ..EstimatorConfig::default()
        };
        let start = OnlineEstimate::empty(4, &cfg).unwrap();
        let one = update_online(&start, &stale, &cfg).unwrap();
        assert_eq!(one.matrix.get(0, 2), Some(1));
        let two = update_online(&one, &fresh, &cfg).unwrap();
        assert_eq!(two.matrix.get(0, 2), Some(-1));

        // Equal weights split the two trials evenly.
        let flat = EstimatorConfig::default();
        let (m, _) = estimate_matrix(&[stale, fresh], 4, &flat).unwrap();
        assert_eq!(m.get(0, 2), Some(0));
    }

    #[test]
    fn online_unmasks_observed_pair() {
        let cfg = EstimatorConfig::default();
        let start = OnlineEstimate::empty(4, &cfg).unwrap();
        assert!(!start.matrix.is_allowed(3, 1));
        let next = update_online(&start, &TrialRecord::new(3, 1, 0.02, 0.0), &cfg).unwrap();
        assert_eq!(next.matrix.get(3, 1), Some(0));
        assert_eq!(next.matrix.allowed_count(), 1);
    }

    #[test]
    fn fold_equals_batch() {
        let trials = replay(&R3);
        let cfg = EstimatorConfig::default();
        let mut est = OnlineEstimate::empty(4, &cfg).unwrap();
        for t in trials.iter().rev() {
            est = update_online(&est, t, &cfg).unwrap();
        }
        let (batch, _) = estimate_matrix(&trials, 4, &cfg).unwrap();
        assert_eq!(est.matrix, batch);
    }

    #[test]
    fn out_of_range_trial_is_named() {
        let trials = vec![TrialRecord::new(0, 0, 0.0, 0.0), TrialRecord::new(0, 4, 0.0, 0.0)];
        assert_eq!(
            estimate_matrix(&trials, 4, &EstimatorConfig::default()).unwrap_err(),
            EstimateError::TrialOutOfRange {
                record: 1,
                from: 0,
                to: 4,
                n: 4
            }
        );
    }

    #[test]
    fn min_trials_masks_sparse_pairs() {
        let cfg = EstimatorConfig {
            min_trials: 2,
            ..EstimatorConfig::default()
        };
        let trials = vec![
            TrialRecord::new(0, 2, 1.0, 0.0),
            TrialRecord::new(0, 2, 1.0, 1.0),
            TrialRecord::new(2, 0, -1.0, 0.0),
        ];
        let (m, report) = estimate_matrix(&trials, 4, &cfg).unwrap();
        assert_eq!(m.get(0, 2), Some(1));
        assert_eq!(m.get(2, 0), None);
        assert_eq!(report.counts[2][0], 1);
        assert_eq!(report.observed_pairs, 1);
    }

    #[test]
    fn config_rejects_bad_values() {
        let bad = EstimatorConfig {
            deadband: -1.0,
            ..EstimatorConfig::default()
        };
        assert!(bad.check().is_err());
        let bad = EstimatorConfig::<f64> {
            min_trials: 0,
            ..EstimatorConfig::default()
        };
        assert!(bad.check().is_err());
    }
}
