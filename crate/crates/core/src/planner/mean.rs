use num_rational::Ratio;

use super::{canonical_cycle, ensure_valid, ControlSequence, PlanError};
use crate::statecore::RewardMatrix;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeanCycle {
    pub cycle: ControlSequence,
    /// Reward per transition.
    pub mean: Ratio<i64>,
}

/// Simple cycle with the largest reward per transition.
///
/// The optimum is Karp's value
/// `max_v min_k (D_n(v) − D_k(v)) / (n − k)`, where `D_k(v)` is the best
/// reward of a `k`-step walk ending at `v` from any start. A cycle attaining it
/// is then read off the edges that are tight under longest-path potentials for
/// the shifted weights `q·r − p` (with `mean = p/q`): every such edge lies on a
/// zero-weight, hence optimal, cycle.
pub fn optimal_mean_cycle(m: &RewardMatrix) -> Result<MeanCycle, PlanError> {
    ensure_valid(m)?;
    let n = m.n();

    let mut walks: Vec<Vec<Option<i64>>> = vec![vec![Some(0); n]];
    for k in 1..=n {
        let prev = &walks[k - 1];
        let mut next = vec![None; n];
        for u in 0..n {
            let Some(base) = prev[u] else { continue };
            for (v, r) in m.successors(u) {
                let cand = base + r as i64;
                if next[v].is_none_or(|cur| cand > cur) {
                    next[v] = Some(cand);
                }
            }
        }
        walks.push(next);
    }

    let mut best: Option<Ratio<i64>> = None;
    for v in 0..n {
        let Some(dn) = walks[n][v] else { continue };
        let worst = (0..n)
            .filter_map(|k| walks[k][v].map(|dk| Ratio::new(dn - dk, (n - k) as i64)))
            .min();
        if let Some(w) = worst {
            if best.is_none_or(|b| w > b) {
                best = Some(w);
            }
        }
    }
    let mean = best.ok_or(PlanError::NoFeasibleCycle)?;

    let (p, q) = (*mean.numer(), *mean.denom());
    let weight = |r: i32| q * r as i64 - p;
    let mut potential = vec![0i64; n];
    for _ in 0..n {
        let mut changed = false;
        for u in 0..n {
            for (v, r) in m.successors(u) {
                let cand = potential[u] + weight(r);
                if cand > potential[v] {
                    potential[v] = cand;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let tight = |u: usize, v: usize| m.get(u, v).is_some_and(|r| potential[u] + weight(r) == potential[v]);

    let open = find_cycle(n, tight).expect("an optimal cycle is tight under optimal potentials");
    Ok(MeanCycle {
        cycle: canonical_cycle(open),
        mean,
    })
}

/// First cycle found by depth-first search in index order over the edge
/// predicate, returned without its repeated endpoint.
fn find_cycle(n: usize, edge: impl Fn(usize, usize) -> bool) -> Option<Vec<usize>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Active,
        Done,
    }
    let mut mark = vec![Mark::New; n];
    for root in 0..n {
        if mark[root] != Mark::New {
            continue;
        }
        // (vertex, next successor to try)
        let mut stack = vec![(root, 0usize)];
        mark[root] = Mark::Active;
        while let Some(&mut (u, ref mut next)) = stack.last_mut() {
            if *next == n {
                mark[u] = Mark::Done;
                stack.pop();
                continue;
            }
            let v = *next;
            *next += 1;
            if !edge(u, v) {
                continue;
            }
            match mark[v] {
                Mark::Active => {
                    let pos = stack.iter().position(|&(w, _)| w == v).unwrap();
                    return Some(stack[pos..].iter().map(|&(w, _)| w).collect());
                }
                Mark::New => {
                    mark[v] = Mark::Active;
                    stack.push((v, 0));
                }
                Mark::Done => {}
            }
        }
    }
    None
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
    fn r1_best_mean_is_four_cycle() {
        let c = optimal_mean_cycle(&r1()).unwrap();
        assert_eq!(c.mean, Ratio::new(3, 4));
        assert_eq!(c.cycle.states(), &[0, 2, 3, 1, 0]);
    }

    #[test]
    fn zero_matrix_self_loop() {
        let z = RewardMatrix::zeros(r1().labels().to_vec());
        let c = optimal_mean_cycle(&z).unwrap();
        assert_eq!(c.mean, Ratio::from_integer(0));
        assert_eq!(c.cycle.states(), &[0, 0]);
    }

    #[test]
    fn limb_loss_mean() {
        let mut pairs: Vec<_> = (0..4).flat_map(|i| [(i, 1), (1, i)]).collect();
        pairs.extend([(0, 3), (3, 0)]);
        let m = apply_mask(&r1(), &pairs).unwrap();
        let c = optimal_mean_cycle(&m).unwrap();
        assert_eq!(c.mean, Ratio::new(1, 2));
        assert_eq!(c.cycle.states(), &[2, 3, 2]);
    }

    #[test]
    fn acyclic_graph_has_no_mean_cycle() {
        let mut m = RewardMatrix::masked(r1().labels().to_vec());
        m.set(0, 1, Some(1));
        m.set(1, 2, Some(1));
        assert_eq!(optimal_mean_cycle(&m), Err(PlanError::NoFeasibleCycle));
    }

    #[test]
    fn negative_only_cycles() {
        let mut m = RewardMatrix::masked(r1().labels().to_vec());
        m.set(0, 1, Some(-1));
        m.set(1, 0, Some(0));
        let c = optimal_mean_cycle(&m).unwrap();
        assert_eq!(c.mean, Ratio::new(-1, 2));
        assert_eq!(c.cycle.states(), &[0, 1, 0]);
    }
}
