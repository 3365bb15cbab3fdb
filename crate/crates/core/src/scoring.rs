//! Borda scoring.
//!
//! Every object votes: it ranks all `n` objects (itself included) by
//! ascending cost from its own row and gives `n - rank` points to each. An
//! object's aggregated score is the mean of the `n` votes it receives, so it
//! lies in `[0, n - 1]` and the scores always sum to `n (n - 1) / 2`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::relation::RelationMatrix;

/// How equal costs within a row are ranked. In both policies the voter
/// itself takes rank 1.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TiePolicy {
    /// Tied objects are ranked by ascending index; every row is a
    /// permutation of `1..=n`.
    #[default]
    IndexOrder,
    /// Tied objects share the mean of the ranks they span.
    MidRank,
}

impl fmt::Display for TiePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TiePolicy::IndexOrder => "index",
            TiePolicy::MidRank => "midrank",
        })
    }
}

impl FromStr for TiePolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "index" | "index-order" => Ok(TiePolicy::IndexOrder),
            "midrank" | "mid-rank" => Ok(TiePolicy::MidRank),
            _ => Err(format!("unknown tie policy {s:?} (expected index or midrank)")),
        }
    }
}

/// Per-voter ranks `Rk_x(y)`.
///
/// Ranks are stored doubled so that mid-ranks stay integral. Alongside the
/// ranks each row keeps the voter's preference order: objects sorted by
/// ascending cost, voter first, remaining ties by index. Neighborhoods and
/// tie-breaks read that order under either policy.
#[derive(Clone, Debug, PartialEq)]
pub struct RankTable {
    n: usize,
    policy: TiePolicy,
    doubled: Vec<u32>,
    order: Vec<u32>,
}

impl RankTable {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn policy(&self) -> TiePolicy {
        self.policy
    }

    /// `Rk_voter(candidate)`; a half-integer only under [`TiePolicy::MidRank`].
    pub fn rank(&self, voter: usize, candidate: usize) -> f64 {
        f64::from(self.doubled[voter * self.n + candidate]) / 2.0
    }

    pub fn rank_row(&self, voter: usize) -> Vec<f64> {
        (0..self.n).map(|c| self.rank(voter, c)).collect()
    }

    /// The voter's preference order, best first.
    pub fn order(&self, voter: usize) -> &[u32] {
        &self.order[voter * self.n..(voter + 1) * self.n]
    }

    /// Position of `candidate` in the voter's preference order (0 for the
    /// voter itself). Equals `rank - 1` under [`TiePolicy::IndexOrder`].
    pub fn position(&self, voter: usize, candidate: usize) -> usize {
        match self.policy {
            TiePolicy::IndexOrder => self.doubled[voter * self.n + candidate] as usize / 2 - 1,
            TiePolicy::MidRank => self
                .order(voter)
                .iter()
                .position(|&c| c as usize == candidate)
                .expect("candidate in range"),
        }
    }

    fn doubled_row(&self, voter: usize) -> &[u32] {
        &self.doubled[voter * self.n..(voter + 1) * self.n]
    }
}

/// Ranks every row of `relation`.
pub fn rank_table(relation: &RelationMatrix, policy: TiePolicy) -> RankTable {
    let n = relation.len();
    assert!(n < (u32::MAX / 2) as usize, "relation too large for rank storage");
    let mut doubled = vec![0u32; n * n];
    let mut order = vec![0u32; n * n];
    let mut idx: Vec<u32> = Vec::with_capacity(n);

    for x in 0..n {
        let row = relation.row(x);
        idx.clear();
        idx.extend(0..n as u32);
        idx.sort_unstable_by(|&a, &b| preference(row, x, a as usize, b as usize));

        let ranks = &mut doubled[x * n..(x + 1) * n];
        match policy {
            TiePolicy::IndexOrder => {
                for (p, &y) in idx.iter().enumerate() {
                    ranks[y as usize] = 2 * (p as u32 + 1);
                }
            }
            TiePolicy::MidRank => {
                ranks[x] = 2;
                let mut start = 1;
                while start < n {
                    let cost = row[idx[start] as usize];
                    let mut end = start;
                    while end + 1 < n && row[idx[end + 1] as usize] == cost {
                        end += 1;
                    }
                    // positions start..=end hold ranks start+1..=end+1
                    let shared = (start + end + 2) as u32;
                    for &y in &idx[start..=end] {
                        ranks[y as usize] = shared;
                    }
                    start = end + 1;
                }
            }
        }
        order[x * n..(x + 1) * n].copy_from_slice(&idx);
    }

    RankTable {
        n,
        policy,
        doubled,
        order,
    }
}

fn preference(row: &[f64], voter: usize, a: usize, b: usize) -> Ordering {
    row[a]
        .total_cmp(&row[b])
        .then_with(|| (b == voter).cmp(&(a == voter)))
        .then_with(|| a.cmp(&b))
}

/// Aggregated Borda scores `Sc(x)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScoreVector {
    scores: Vec<f64>,
    argmax: Vec<usize>,
    #[serde(skip)]
    mass: Vec<u64>,
}

impl ScoreVector {
    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn get(&self, x: usize) -> f64 {
        self.scores[x]
    }

    /// All indices attaining the maximum score, ascending.
    pub fn argmax_set(&self) -> &[usize] {
        &self.argmax
    }

    pub fn max(&self) -> f64 {
        self.argmax.first().map_or(0.0, |&i| self.scores[i])
    }

    /// Compares the scores of two objects exactly.
    pub fn cmp_objects(&self, a: usize, b: usize) -> Ordering {
        self.mass[a].cmp(&self.mass[b])
    }

    /// Indices sorted by descending score, ties by ascending index.
    pub fn descending(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by(|&a, &b| self.cmp_objects(b, a).then(a.cmp(&b)));
        idx
    }
}

/// `Sc(x) = (1/n) Σ_y (n - Rk_y(x))`, self-vote included.
///
/// Votes are summed as integers and divided once, so the result does not
/// depend on summation order.
pub fn aggregated_scores(ranks: &RankTable) -> ScoreVector {
    let n = ranks.len();
    // doubled mass: Σ_y 2 (n - Rk_y(x))
    let mut mass = vec![0u64; n];
    for y in 0..n {
        for (m, &r) in mass.iter_mut().zip(ranks.doubled_row(y)) {
            *m += (2 * n) as u64 - u64::from(r);
        }
    }
    let denom = (2 * n) as f64;
    let scores = mass.iter().map(|&m| m as f64 / denom).collect();
    let best = mass.iter().copied().max().unwrap_or(0);
    let argmax = (0..n).filter(|&x| mass[x] == best).collect();
    ScoreVector { scores, argmax, mass }
}

/// The standard: the smallest index with the highest aggregated score.
pub fn standard(scores: &ScoreVector) -> usize {
    *scores.argmax_set().first().expect("standard of an empty score vector")
}
