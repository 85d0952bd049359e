use std::fmt;

use super::PlanError;
use crate::statecore::RewardMatrix;

/// Ordered state path `S(0) … S(N)`; periodic when the ends coincide.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ControlSequence {
    states: Vec<usize>,
}

impl ControlSequence {
    pub fn new(states: Vec<usize>) -> Result<Self, PlanError> {
        if states.len() < 2 {
            return Err(PlanError::TooShort);
        }
        Ok(Self { states })
    }

    pub fn states(&self) -> &[usize] {
        &self.states
    }

    /// Number of transitions, `N`.
    pub fn len(&self) -> usize {
        self.states.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_periodic(&self) -> bool {
        self.states.first() == self.states.last()
    }

    pub fn transitions(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.states.windows(2).map(|w| (w[0], w[1]))
    }

    /// Same cycle entered at position `k`. Only meaningful for periodic
    /// sequences.
    pub fn rotated(&self, k: usize) -> Self {
        let mut open = self.states[..self.len()].to_vec();
        let len = open.len();
        open.rotate_left(k % len);
        let first = open[0];
        open.push(first);
        Self { states: open }
    }

    /// State strings from the matrix labels.
    pub fn labels(&self, m: &RewardMatrix) -> Vec<String> {
        self.states.iter().map(|&s| m.label(s).to_string()).collect()
    }

    pub fn render(&self, m: &RewardMatrix) -> String {
        self.labels(m).join(" -> ")
    }
}

impl fmt::Display for ControlSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.states.iter().map(usize::to_string).collect();
        f.write_str(&parts.join(" -> "))
    }
}

/// Sum of transition rewards along `seq`.
pub fn sequence_reward(seq: &ControlSequence, m: &RewardMatrix) -> Result<i64, PlanError> {
    let n = m.n();
    if let Some(&bad) = seq.states.iter().find(|&&s| s >= n) {
        return Err(PlanError::StateOutOfRange { index: bad, n });
    }
    seq.transitions()
        .enumerate()
        .try_fold(0i64, |acc, (step, (from, to))| match m.get(from, to) {
            Some(r) => Ok(acc + r as i64),
            None => Err(PlanError::ForbiddenTransition { step, from, to }),
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statecore::{apply_mask, RewardMatrix};

    fn r1() -> RewardMatrix {
        RewardMatrix::from_rows(vec![
            vec![0, -1, 1, 0],
            vec![1, 0, 0, -1],
            vec![-1, 0, 0, 1],
            vec![0, 0, 0, 0],
        ])
        .unwrap()
    }

    fn seq(s: &[usize]) -> ControlSequence {
        ControlSequence::new(s.to_vec()).unwrap()
    }

    #[test]
    fn anteriograde_cycle_on_r1() {
        // 1 + 0 + 1
        assert_eq!(sequence_reward(&seq(&[0, 2, 1, 0]), &r1()).unwrap(), 2);
    }

    #[test]
    fn zero_matrix_gives_zero() {
        let z = RewardMatrix::zeros(r1().labels().to_vec());
        assert_eq!(sequence_reward(&seq(&[0, 3, 1, 2, 0]), &z).unwrap(), 0);
    }

    #[test]
    fn forbidden_transition_named() {
        let m = apply_mask(&r1(), &[(2, 1)]).unwrap();
        assert_eq!(
            sequence_reward(&seq(&[0, 2, 1, 0]), &m),
            Err(PlanError::ForbiddenTransition {
                step: 1,
                from: 2,
                to: 1
            })
        );
    }

    #[test]
    fn periodicity_and_rotation() {
        let s = seq(&[0, 2, 1, 0]);
        assert!(s.is_periodic());
        assert_eq!(s.rotated(1).states(), &[2, 1, 0, 2]);
        assert!(!seq(&[0, 2]).is_periodic());
        assert_eq!(ControlSequence::new(vec![0]), Err(PlanError::TooShort));
    }

    #[test]
    fn out_of_range_state() {
        assert!(matches!(
            sequence_reward(&seq(&[0, 5]), &r1()),
            Err(PlanError::StateOutOfRange { index: 5, n: 4 })
        ));
    }
}
