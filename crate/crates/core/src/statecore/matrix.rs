use std::fmt;

use serde::{Deserialize, Serialize};

use super::space::binary_labels;
use super::StateError;

pub const REWARD_MATRIX_SCHEMA: &str = "gaitmatrix/reward-matrix/v1";

/// Square matrix of discretized transition rewards with a forbidden-transition
/// mask. Row `i`, column `j` is the transition from state `i` to state `j`.
///
/// A forbidden entry always stores reward 0; its value is never read.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewardMatrix {
    n: usize,
    labels: Vec<String>,
    rewards: Vec<i32>,
    allowed: Vec<bool>,
}

impl RewardMatrix {
    /// Builds a matrix from row-major rows; only the shape is checked here,
    /// reward invariants are reported by [`validate`].
    pub fn new(labels: Vec<String>, rewards: Vec<Vec<i32>>, allowed: Vec<Vec<bool>>) -> Result<Self, StateError> {
        let n = labels.len();
        if n == 0 {
            return Err(StateError::Malformed("empty matrix".into()));
        }
        fn square<E>(rows: &[Vec<E>], n: usize) -> bool {
            rows.len() == n && rows.iter().all(|r| r.len() == n)
        }
        if !square(&rewards, n) {
            return Err(StateError::Malformed(format!("rewards are not {}x{}", n, n)));
        }
        if !square(&allowed, n) {
            return Err(StateError::Malformed(format!("mask is not {}x{}", n, n)));
        }
        Ok(Self {
            n,
            labels,
            rewards: rewards.into_iter().flatten().collect(),
            allowed: allowed.into_iter().flatten().collect(),
        })
    }

    /// All transitions allowed; labels are binary state strings when `n` is a
    /// power of two.
    pub fn from_rows(rewards: Vec<Vec<i32>>) -> Result<Self, StateError> {
        let n = rewards.len();
        Self::new(default_labels(n), rewards, vec![vec![true; n]; n])
    }

    pub fn zeros(labels: Vec<String>) -> Self {
        let n = labels.len();
        Self {
            n,
            labels,
            rewards: vec![0; n * n],
            allowed: vec![true; n * n],
        }
    }

    /// Every transition forbidden.
    pub fn masked(labels: Vec<String>) -> Self {
        let n = labels.len();
        Self {
            n,
            labels,
            rewards: vec![0; n * n],
            allowed: vec![false; n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    /// `"2:(10)"` style rendering used in reports.
    pub fn describe(&self, i: usize) -> String {
        format!("{}:{}", i, self.labels[i])
    }

    #[inline]
    pub fn reward(&self, from: usize, to: usize) -> i32 {
        self.rewards[from * self.n + to]
    }

    #[inline]
    pub fn is_allowed(&self, from: usize, to: usize) -> bool {
        self.allowed[from * self.n + to]
    }

    /// Reward of an allowed transition, `None` when forbidden.
    #[inline]
    pub fn get(&self, from: usize, to: usize) -> Option<i32> {
        self.is_allowed(from, to).then(|| self.reward(from, to))
    }

    pub fn set(&mut self, from: usize, to: usize, reward: Option<i32>) {
        let k = from * self.n + to;
        match reward {
            Some(r) => {
                self.rewards[k] = r;
                self.allowed[k] = true;
            }
            None => {
                self.rewards[k] = 0;
                self.allowed[k] = false;
            }
        }
    }

    pub fn rows(&self) -> Vec<Vec<i32>> {
        self.rewards.chunks(self.n).map(<[i32]>::to_vec).collect()
    }

    pub fn mask_rows(&self) -> Vec<Vec<bool>> {
        self.allowed.chunks(self.n).map(<[bool]>::to_vec).collect()
    }

    /// Allowed successors of `from`, ascending.
    pub fn successors(&self, from: usize) -> impl Iterator<Item = (usize, i32)> + '_ {
        (0..self.n).filter_map(move |to| self.get(from, to).map(|r| (to, r)))
    }

    pub fn allowed_count(&self) -> usize {
        self.allowed.iter().filter(|&&a| a).count()
    }

    /// Same mask, every reward sign flipped.
    pub fn negated(&self) -> Self {
        Self {
            rewards: self.rewards.iter().map(|r| -r).collect(),
            ..self.clone()
        }
    }

    /// Resolves `"2"`, `"(10)"`, `"10"` or `"2:(10)"` to a state index.
    pub fn resolve(&self, token: &str) -> Result<usize, StateError> {
        let t = token.trim();
        if let Some((idx, label)) = t.split_once(':') {
            let i = idx
                .trim()
                .parse::<usize>()
                .map_err(|_| StateError::UnknownState(token.into()))?;
            return if self.resolve(label)? == i {
                Ok(i)
            } else {
                Err(StateError::UnknownState(token.into()))
            };
        }
        if let Some(i) = self.labels.iter().position(|l| l == t) {
            return Ok(i);
        }
        if t.starts_with('(') {
            return Err(StateError::UnknownState(token.into()));
        }
        // Bare digit strings name a state label before an index.
        let wrapped = format!("({})", t);
        if let Some(i) = self.labels.iter().position(|l| *l == wrapped) {
            return Ok(i);
        }
        let i = t.parse::<usize>().map_err(|_| StateError::UnknownState(token.into()))?;
        if i < self.n {
            Ok(i)
        } else {
            Err(StateError::IndexOutOfRange {
                index: i,
                cardinality: self.n,
            })
        }
    }

    pub fn to_document(&self) -> RewardMatrixDocument {
        RewardMatrixDocument {
            schema: REWARD_MATRIX_SCHEMA.into(),
            n: self.n,
            states: self.labels.clone(),
            rewards: self.rows(),
            allowed: self.mask_rows(),
        }
    }

    pub fn from_document(doc: RewardMatrixDocument) -> Result<Self, StateError> {
        if doc.schema != REWARD_MATRIX_SCHEMA {
            return Err(StateError::Malformed(format!("unexpected schema `{}`", doc.schema)));
        }
        if doc.n != doc.states.len() {
            return Err(StateError::Malformed(format!(
                "n = {} but {} state labels",
                doc.n,
                doc.states.len()
            )));
        }
        Self::new(doc.states, doc.rewards, doc.allowed)
    }
}

impl fmt::Display for RewardMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.labels.iter().map(String::len).max().unwrap_or(1).max(2);
        write!(f, "{:width$}", "", width = width)?;
        for l in &self.labels {
            write!(f, " {:>width$}", l, width = width)?;
        }
        writeln!(f)?;
        for i in 0..self.n {
            write!(f, "{:width$}", self.labels[i], width = width)?;
            for j in 0..self.n {
                match self.get(i, j) {
                    Some(r) => write!(f, " {:>width$}", r, width = width)?,
                    None => write!(f, " {:>width$}", "x", width = width)?,
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Binary state strings when `n` is a power of two, otherwise `(i)`.
pub fn default_labels(n: usize) -> Vec<String> {
    if n.is_power_of_two() {
        binary_labels(n.trailing_zeros() as usize)
    } else {
        (0..n).map(|i| format!("({})", i)).collect()
    }
}

/// On-disk form of a [`RewardMatrix`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardMatrixDocument {
    pub schema: String,
    pub n: usize,
    pub states: Vec<String>,
    pub rewards: Vec<Vec<i32>>,
    pub allowed: Vec<Vec<bool>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    /// Reward outside {−1, 0, +1}.
    RewardOutOfRange(i32),
    /// Forbidden entry carrying a nonzero reward.
    ForbiddenNonzero(i32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Violation {
    pub row: usize,
    pub col: usize,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ViolationKind::RewardOutOfRange(v) => {
                write!(
                    f,
                    "entry ({}, {}): reward {} not in {{-1, 0, 1}}",
                    self.row, self.col, v
                )
            }
            ViolationKind::ForbiddenNonzero(v) => {
                write!(
                    f,
                    "entry ({}, {}): forbidden entry carries reward {}",
                    self.row, self.col, v
                )
            }
        }
    }
}

/// Lists every entry that breaks a reward-matrix invariant. Never fails.
pub fn validate(m: &RewardMatrix) -> Vec<Violation> {
    let mut out = Vec::new();
    for row in 0..m.n {
        for col in 0..m.n {
            let r = m.reward(row, col);
            if m.is_allowed(row, col) {
                if !(-1..=1).contains(&r) {
                    out.push(Violation {
                        row,
                        col,
                        kind: ViolationKind::RewardOutOfRange(r),
                    });
                }
            } else if r != 0 {
                out.push(Violation {
                    row,
                    col,
                    kind: ViolationKind::ForbiddenNonzero(r),
                });
            }
        }
    }
    out
}

/// Returns a copy of `m` with every listed transition forbidden.
pub fn apply_mask(m: &RewardMatrix, forbidden: &[(usize, usize)]) -> Result<RewardMatrix, StateError> {
    let mut out = m.clone();
    for &(from, to) in forbidden {
        if from >= m.n || to >= m.n {
            return Err(StateError::PairOutOfRange { from, to, n: m.n });
        }
        out.set(from, to, None);
    }
    Ok(out)
}
