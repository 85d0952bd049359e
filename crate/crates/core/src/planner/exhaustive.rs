use serde::{Deserialize, Serialize};

use super::{ensure_valid, sequence_reward, ControlSequence, PlanError};
use crate::statecore::RewardMatrix;

pub const PLAN_SCHEMA: &str = "gaitmatrix/plan/v1";
/// Largest cycle length accepted by [`optimal_cycle`].
pub const MAX_L_MAX: usize = 8;
/// Largest state space accepted by [`optimal_cycle`].
pub const MAX_STATES: usize = 4096;
/// Optimal cycles beyond this many are counted but not listed.
pub const MAX_LISTED_CYCLES: usize = 4096;
/// `n^l_max` ceiling for [`brute_force_cycles`].
pub const BRUTE_FORCE_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    /// Most positive displacement (forward, +X).
    #[default]
    Maximize,
    /// Most negative displacement (backward, −X).
    Minimize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanResult {
    pub best_reward: i64,
    /// Every periodic sequence achieving `best_reward`, shortest first, then
    /// lexicographic; the first entry is the canonical gait.
    pub cycles: Vec<ControlSequence>,
    /// Number of periodic sequences with `N ≤ l_max` considered.
    pub explored: u64,
    pub l_max: usize,
    pub sense: Sense,
    /// `false` when the mask admits no periodic sequence at all.
    pub feasible: bool,
    /// Set when more than [`MAX_LISTED_CYCLES`] optimal cycles exist.
    pub truncated: bool,
}

impl PlanResult {
    pub fn canonical(&self) -> Option<&ControlSequence> {
        self.cycles.first()
    }

    pub fn to_document(&self, m: &RewardMatrix) -> PlanDocument {
        PlanDocument {
            schema: PLAN_SCHEMA.into(),
            best_reward: self.best_reward,
            cycles: self.cycles.iter().map(|c| c.labels(m)).collect(),
            l_max: self.l_max,
            explored: self.explored,
            sense: self.sense,
            feasible: self.feasible,
            truncated: self.truncated,
        }
    }
}

/// On-disk form of a [`PlanResult`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanDocument {
    pub schema: String,
    pub best_reward: i64,
    pub cycles: Vec<Vec<String>>,
    pub l_max: usize,
    pub explored: u64,
    pub sense: Sense,
    pub feasible: bool,
    pub truncated: bool,
}

/// Exact optimum over every periodic sequence with `1 ≤ N ≤ l_max`, from any
/// start state.
///
/// For each start state a max-plus recurrence over walks that avoid the start
/// until they close gives the best reward per length; optimal cycles are then
/// recovered by a depth-first walk pruned with the matching reward-to-go table.
pub fn optimal_cycle(m: &RewardMatrix, l_max: usize, sense: Sense) -> Result<PlanResult, PlanError> {
    if l_max == 0 {
        return Err(PlanError::InvalidInput("l_max must be at least 1".into()));
    }
    if l_max > MAX_L_MAX {
        return Err(PlanError::Capacity(format!("l_max {} exceeds {}", l_max, MAX_L_MAX)));
    }
    if m.n() > MAX_STATES {
        return Err(PlanError::Capacity(format!("{} states exceeds {}", m.n(), MAX_STATES)));
    }
    ensure_valid(m)?;
    let work = match sense {
        Sense::Maximize => m.clone(),
        Sense::Minimize => m.negated(),
    };

    let n = work.n();
    let mut best: Option<i64> = None;
    let mut explored = 0u64;
    // best_by_start[s][len] = best reward of a cycle through s with that length
    let mut best_by_start = vec![vec![None; l_max + 1]; n];
    let mut to_go = Vec::with_capacity(n);
    for s in 0..n {
        let tables = StartTables::build(&work, s, l_max);
        explored = explored.saturating_add(tables.closed_count);
        for len in 1..=l_max {
            let v = tables.best_closed(&work, len);
            best_by_start[s][len] = v;
            best = max_opt(best, v);
        }
        to_go.push(tables.to_go);
    }

    let Some(best) = best else {
        return Ok(PlanResult {
            best_reward: 0,
            cycles: Vec::new(),
            explored,
            l_max,
            sense,
            feasible: false,
            truncated: false,
        });
    };

    let mut cycles = Vec::new();
    let mut truncated = false;
    'outer: for len in 1..=l_max {
        for s in 0..n {
            if best_by_start[s][len] != Some(best) {
                continue;
            }
            let mut path = vec![s];
            if !collect_optimal(&work, &to_go[s], s, len, best, 0, &mut path, &mut cycles) {
                truncated = true;
                break 'outer;
            }
        }
    }

    let best_reward = match sense {
        Sense::Maximize => best,
        Sense::Minimize => -best,
    };
    Ok(PlanResult {
        best_reward,
        cycles,
        explored,
        l_max,
        sense,
        feasible: true,
        truncated,
    })
}

fn max_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

struct StartTables {
    start: usize,
    /// reach[k][v]: best reward of a k-step walk start → v that avoids the
    /// start after leaving it (v ≠ start for k ≥ 1).
    reach: Vec<Vec<Option<i64>>>,
    /// to_go[k][v]: best reward of a k-step walk v → start whose interior
    /// avoids the start (v ≠ start).
    to_go: Vec<Vec<Option<i64>>>,
    closed_count: u64,
}

impl StartTables {
    fn build(m: &RewardMatrix, start: usize, l_max: usize) -> Self {
        let n = m.n();
        let mut reach = vec![vec![None; n]; l_max];
        let mut count = vec![vec![0u64; n]; l_max];
        reach[0][start] = Some(0);
        count[0][start] = 1;
        for k in 1..l_max {
            for u in 0..n {
                let Some(base) = reach[k - 1][u] else { continue };
                let c = count[k - 1][u];
                for (v, r) in m.successors(u) {
                    if v == start {
                        continue;
                    }
                    reach[k][v] = max_opt(reach[k][v], Some(base + r as i64));
                    count[k][v] = count[k][v].saturating_add(c);
                }
            }
        }

        // to_go[0] is unused
        let mut to_go = vec![vec![None; n]; l_max];
        if l_max > 1 {
            for v in 0..n {
                if v != start {
                    to_go[1][v] = m.get(v, start).map(i64::from);
                }
            }
            for k in 2..l_max {
                for v in 0..n {
                    if v == start {
                        continue;
                    }
                    let mut acc = None;
                    for (w, r) in m.successors(v) {
                        if w == start {
                            continue;
                        }
                        if let Some(rest) = to_go[k - 1][w] {
                            acc = max_opt(acc, Some(rest + r as i64));
                        }
                    }
                    to_go[k][v] = acc;
                }
            }
        }

        let mut closed_count = 0u64;
        for len in 1..=l_max {
            for u in 0..n {
                if m.is_allowed(u, start) {
                    closed_count = closed_count.saturating_add(count[len - 1][u]);
                }
            }
        }
        Self {
            start,
            reach,
            to_go,
            closed_count,
        }
    }

    fn best_closed(&self, m: &RewardMatrix, len: usize) -> Option<i64> {
        let start = self.start;
        (0..m.n())
            .filter_map(|u| {
                let base = self.reach[len - 1][u]?;
                m.get(u, start).map(|r| base + r as i64)
            })
            .max()
    }
}

/// Extends `path` (currently `steps` transitions long) in lexicographic order,
/// keeping only branches that can still reach `target`. Returns `false` once
/// the listing cap is hit.
#[allow(clippy::too_many_arguments)]
fn collect_optimal(
    m: &RewardMatrix,
    to_go: &[Vec<Option<i64>>],
    start: usize,
    len: usize,
    target: i64,
    prefix: i64,
    path: &mut Vec<usize>,
    out: &mut Vec<ControlSequence>,
) -> bool {
    let here = *path.last().unwrap();
    let remaining = len - (path.len() - 1);
    if remaining == 1 {
        if m.get(here, start).map(|r| prefix + r as i64) == Some(target) {
            if out.len() == MAX_LISTED_CYCLES {
                return false;
            }
            let mut states = path.clone();
            states.push(start);
            out.push(ControlSequence::new(states).expect("non-empty"));
        }
        return true;
    }
    for (next, r) in m.successors(here) {
        if next == start {
            continue;
        }
        let Some(rest) = to_go[remaining - 1][next] else {
            continue;
        };
        if prefix + r as i64 + rest != target {
            continue;
        }
        path.push(next);
        let keep_going = collect_optimal(m, to_go, start, len, target, prefix + r as i64, path, out);
        path.pop();
        if !keep_going {
            return false;
        }
    }
    true
}

/// Every periodic sequence with `N ≤ l_max` and its reward, by plain
/// depth-first enumeration. Intended as an oracle for [`optimal_cycle`].
pub fn brute_force_cycles(m: &RewardMatrix, l_max: usize) -> Result<Vec<(ControlSequence, i64)>, PlanError> {
    if l_max == 0 {
        return Err(PlanError::InvalidInput("l_max must be at least 1".into()));
    }
    let work = (m.n() as u64)
        .checked_pow(l_max as u32)
        .filter(|&w| w <= BRUTE_FORCE_BUDGET);
    if work.is_none() {
        return Err(PlanError::Capacity(format!(
            "{}^{} walks exceeds enumeration budget {}",
            m.n(),
            l_max,
            BRUTE_FORCE_BUDGET
        )));
    }
    let mut out = Vec::new();
    for s in 0..m.n() {
        let mut path = vec![s];
        enumerate(m, s, l_max, &mut path, &mut out);
    }
    Ok(out)
}

fn enumerate(
    m: &RewardMatrix,
    start: usize,
    l_max: usize,
    path: &mut Vec<usize>,
    out: &mut Vec<(ControlSequence, i64)>,
) {
    let here = *path.last().unwrap();
    for next in 0..m.n() {
        if !m.is_allowed(here, next) {
            continue;
        }
        path.push(next);
        if next == start {
            let seq = ControlSequence::new(path.clone()).expect("non-empty");
            let reward = sequence_reward(&seq, m).expect("walk uses allowed transitions");
            out.push((seq, reward));
        } else if path.len() - 1 < l_max {
            enumerate(m, start, l_max, path, out);
        }
        path.pop();
    }
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

    fn r2() -> RewardMatrix {
        r1().negated()
    }

    fn limb_loss() -> RewardMatrix {
        let mut pairs: Vec<_> = (0..4).flat_map(|i| [(i, 1), (1, i)]).collect();
        pairs.extend([(0, 3), (3, 0)]);
        apply_mask(&r1(), &pairs).unwrap()
    }

    #[test]
    fn r1_lmax3_canonical_is_anteriograde() {
        let p = optimal_cycle(&r1(), 3, Sense::Maximize).unwrap();
        assert_eq!(p.best_reward, 2);
        assert_eq!(p.canonical().unwrap().states(), &[0, 2, 1, 0]);
    }

    #[test]
    fn r1_lmax4_finds_four_cycle() {
        let p = optimal_cycle(&r1(), 4, Sense::Maximize).unwrap();
        assert_eq!(p.best_reward, 3);
        assert_eq!(p.canonical().unwrap().states(), &[0, 2, 3, 1, 0]);
    }

    #[test]
    fn limb_loss_lmax5() {
        let p = optimal_cycle(&limb_loss(), 5, Sense::Maximize).unwrap();
        assert_eq!(p.best_reward, 1);
        assert_eq!(p.canonical().unwrap().states(), &[2, 3, 2]);
        let states: Vec<&[usize]> = p.cycles.iter().map(|c| c.states()).collect();
        assert!(states.contains(&&[2, 3, 2][..]));
        assert!(states.contains(&&[0, 2, 3, 2, 0][..]));
    }

    #[test]
    fn brute_force_r2_lmax3() {
        let all = brute_force_cycles(&r2(), 3).unwrap();
        let best = all.iter().map(|(_, r)| *r).max().unwrap();
        assert_eq!(best, 2);
        assert!(all.iter().any(|(c, r)| c.states() == [0, 1, 2, 0] && *r == 2));
    }

    #[test]
    fn brute_force_two_state() {
        let m = RewardMatrix::from_rows(vec![vec![0, 1], vec![1, 0]]).unwrap();
        let all = brute_force_cycles(&m, 2).unwrap();
        assert_eq!(all.iter().map(|(_, r)| *r).max(), Some(2));
    }

    #[test]
    fn fully_masked_has_no_cycles() {
        let m = RewardMatrix::masked(r1().labels().to_vec());
        assert!(brute_force_cycles(&m, 4).unwrap().is_empty());
        let p = optimal_cycle(&m, 4, Sense::Maximize).unwrap();
        assert!(!p.feasible);
        assert_eq!(p.best_reward, 0);
        assert!(p.cycles.is_empty());
    }

    #[test]
    fn explored_matches_enumeration() {
        for l in 1..=5 {
            let bf = brute_force_cycles(&limb_loss(), l).unwrap();
            let p = optimal_cycle(&limb_loss(), l, Sense::Maximize).unwrap();
            assert_eq!(p.explored, bf.len() as u64, "l_max {}", l);
        }
    }

    #[test]
    fn minimize_is_negated_maximize() {
        let p = optimal_cycle(&r1(), 3, Sense::Minimize).unwrap();
        assert_eq!(p.best_reward, -2);
        assert_eq!(p.canonical().unwrap().states(), &[0, 1, 2, 0]);
    }

    #[test]
    fn guards() {
        assert!(matches!(
            optimal_cycle(&r1(), 0, Sense::Maximize),
            Err(PlanError::InvalidInput(_))
        ));
        assert!(matches!(
            optimal_cycle(&r1(), 9, Sense::Maximize),
            Err(PlanError::Capacity(_))
        ));
        let big = RewardMatrix::zeros((0..64).map(|i| i.to_string()).collect());
        assert!(matches!(brute_force_cycles(&big, 4), Err(PlanError::Capacity(_))));
        let mut rows = r1().rows();
        rows[0][0] = 3;
        let bad = RewardMatrix::from_rows(rows).unwrap();
        assert!(matches!(
            optimal_cycle(&bad, 3, Sense::Maximize),
            Err(PlanError::InvalidMatrix(_))
        ));
    }

    #[test]
    fn listing_is_capped() {
        let z = RewardMatrix::zeros((0..8).map(|i| i.to_string()).collect());
        let p = optimal_cycle(&z, 6, Sense::Maximize).unwrap();
        assert_eq!(p.best_reward, 0);
        assert!(p.truncated);
        assert_eq!(p.cycles.len(), MAX_LISTED_CYCLES);
        assert_eq!(p.canonical().unwrap().states(), &[0, 0]);
    }
}
