//! Exemplar networks.
//!
//! Each object links to the best-scoring member of its neighborhood. Objects
//! that link to themselves are the exemplars: local maxima of the aggregated
//! score at the chosen scale. A score tie inside a neighborhood goes to the
//! candidate the object itself prefers (lowest cost, so the object itself
//! first). Every non-self link therefore strictly increases the score and the
//! link map is a forest rooted at the exemplars.

use std::collections::HashMap;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scoring::{RankTable, ScoreVector};

/// Per-object neighbor lists for graph-defined neighborhoods. The object
/// itself is never listed; it is always part of its own neighborhood.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Adjacency {
    neighbors: Vec<Vec<usize>>,
}

impl Adjacency {
    /// Sorts and deduplicates each list. Self-references and out-of-range
    /// indices are rejected.
    pub fn new(mut neighbors: Vec<Vec<usize>>) -> Result<Self> {
        let n = neighbors.len();
        for (x, list) in neighbors.iter_mut().enumerate() {
            list.sort_unstable();
            list.dedup();
            if list.contains(&x) {
                return Err(Error::Domain(format!("object {x} lists itself as a neighbor")));
            }
            if let Some(&y) = list.iter().find(|&&y| y >= n) {
                return Err(Error::Domain(format!(
                    "neighbor index {y} out of range for {n} objects"
                )));
            }
        }
        Ok(Self { neighbors })
    }

    pub fn len(&self) -> usize {
        self.neighbors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neighbors.is_empty()
    }

    pub fn neighbors(&self, x: usize) -> &[usize] {
        &self.neighbors[x]
    }
}

/// Parses an adjacency file: one `label: neighbor,neighbor,...` line per
/// object. Objects without a line have no neighbors.
pub fn parse_adjacency(text: &str, labels: &[String], origin: &Path) -> Result<Adjacency> {
    let index: HashMap<&str, usize> = labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
    let lookup = |label: &str, line: usize| {
        index
            .get(label)
            .copied()
            .ok_or_else(|| Error::parse(origin, line, format!("unknown label {label:?}")))
    };
    let mut neighbors = vec![Vec::new(); labels.len()];
    let mut seen = vec![false; labels.len()];
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (head, tail) = line
            .split_once(':')
            .ok_or_else(|| Error::parse(origin, i + 1, "expected `label: neighbors`"))?;
        let x = lookup(head.trim(), i + 1)?;
        if std::mem::replace(&mut seen[x], true) {
            return Err(Error::parse(
                origin,
                i + 1,
                format!("second line for {:?}", head.trim()),
            ));
        }
        for cell in tail.split(',').map(str::trim).filter(|c| !c.is_empty()) {
            neighbors[x].push(lookup(cell, i + 1)?);
        }
    }
    Adjacency::new(neighbors)
}

/// Reads an adjacency file against the relation's labels.
pub fn load_adjacency(path: &Path, labels: &[String]) -> Result<Adjacency> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_adjacency(&text, labels, path)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NeighborhoodSpec {
    /// The `k` objects ranked best by the object's own row.
    Knn(usize),
    /// Fixed neighborhoods given by a graph.
    Graph(Adjacency),
}

impl NeighborhoodSpec {
    pub fn k(&self) -> Option<usize> {
        match self {
            NeighborhoodSpec::Knn(k) => Some(*k),
            NeighborhoodSpec::Graph(_) => None,
        }
    }

    fn check(&self, n: usize) -> Result<()> {
        match self {
            NeighborhoodSpec::Knn(k) if *k == 0 || *k > n => Err(Error::ScaleOutOfRange { k: *k, n }),
            NeighborhoodSpec::Graph(adj) if adj.len() != n => Err(Error::Domain(format!(
                "adjacency covers {} objects, relation has {n}",
                adj.len()
            ))),
            _ => Ok(()),
        }
    }
}

/// `N(x)` as a sorted index list; always contains `x`.
pub fn neighborhood(ranks: &RankTable, x: usize, spec: &NeighborhoodSpec) -> Result<Vec<usize>> {
    spec.check(ranks.len())?;
    let mut members: Vec<usize> = match spec {
        NeighborhoodSpec::Knn(k) => ranks.order(x)[..*k].iter().map(|&y| y as usize).collect(),
        NeighborhoodSpec::Graph(adj) => std::iter::once(x).chain(adj.neighbors(x).iter().copied()).collect(),
    };
    members.sort_unstable();
    Ok(members)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExemplarNetwork {
    link: Vec<usize>,
    exemplars: Vec<usize>,
    spec: NeighborhoodSpec,
    scores: ScoreVector,
}

impl ExemplarNetwork {
    pub fn len(&self) -> usize {
        self.link.len()
    }

    pub fn is_empty(&self) -> bool {
        self.link.is_empty()
    }

    pub fn link(&self, x: usize) -> usize {
        self.link[x]
    }

    pub fn links(&self) -> &[usize] {
        &self.link
    }

    /// Self-linked objects, ascending.
    pub fn exemplars(&self) -> &[usize] {
        &self.exemplars
    }

    pub fn is_exemplar(&self, x: usize) -> bool {
        self.link[x] == x
    }

    pub fn spec(&self) -> &NeighborhoodSpec {
        &self.spec
    }

    pub fn scores(&self) -> &ScoreVector {
        &self.scores
    }

    /// The exemplar reached by following links from `x`.
    pub fn root(&self, mut x: usize) -> usize {
        while self.link[x] != x {
            x = self.link[x];
        }
        x
    }
}

/// Links every object to the best-scoring member of its neighborhood.
pub fn build_network(scores: &ScoreVector, ranks: &RankTable, spec: &NeighborhoodSpec) -> Result<ExemplarNetwork> {
    let n = ranks.len();
    if scores.len() != n {
        return Err(Error::Domain(format!(
            "{} scores for a rank table over {n} objects",
            scores.len()
        )));
    }
    spec.check(n)?;

    let link: Vec<usize> = match spec {
        NeighborhoodSpec::Knn(k) => (0..n).map(|x| best_in_prefix(scores, ranks.order(x), *k)).collect(),
        NeighborhoodSpec::Graph(adj) => {
            let mut position = vec![0usize; n];
            (0..n)
                .map(|x| {
                    for (p, &y) in ranks.order(x).iter().enumerate() {
                        position[y as usize] = p;
                    }
                    let mut best = x;
                    for &y in adj.neighbors(x) {
                        let better = scores
                            .cmp_objects(y, best)
                            .then_with(|| position[best].cmp(&position[y]))
                            .is_gt();
                        if better {
                            best = y;
                        }
                    }
                    best
                })
                .collect()
        }
    };

    let exemplars = (0..n).filter(|&x| link[x] == x).collect();
    Ok(ExemplarNetwork {
        link,
        exemplars,
        spec: spec.clone(),
        scores: scores.clone(),
    })
}

// Scanning in preference order and replacing only on a strict increase
// breaks score ties toward the lowest rank.
fn best_in_prefix(scores: &ScoreVector, order: &[u32], k: usize) -> usize {
    let mut best = order[0] as usize;
    for &y in &order[1..k] {
        if scores.cmp_objects(y as usize, best).is_gt() {
            best = y as usize;
        }
    }
    best
}

/// Exemplars at every scale `k = 1..=n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepTable {
    /// `counts[k - 1] = E(k)`.
    counts: Vec<usize>,
    /// Largest `k` at which each object is an exemplar.
    durations: Vec<usize>,
    k_optimum: usize,
}

impl SweepTable {
    pub fn len(&self) -> usize {
        self.durations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.durations.is_empty()
    }

    /// `E(k)` for `k = 1..=n`.
    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn count(&self, k: usize) -> usize {
        self.counts[k - 1]
    }

    pub fn durations(&self) -> &[usize] {
        &self.durations
    }

    pub fn k_optimum(&self) -> usize {
        self.k_optimum
    }

    /// Exemplars at scale `k`, ascending.
    pub fn exemplars(&self, k: usize) -> Vec<usize> {
        (0..self.len()).filter(|&x| self.durations[x] >= k).collect()
    }
}

/// Sweeps the scale factor over `1..=n`.
///
/// An object stays an exemplar exactly until its neighborhood first reaches
/// an object with a strictly higher score, so its duration is the position
/// of that object in its preference order. Exemplar sets are nested and the
/// whole sweep costs one pass over each preference row.
pub fn scale_sweep(scores: &ScoreVector, ranks: &RankTable) -> SweepTable {
    let n = ranks.len();
    let durations: Vec<usize> = (0..n)
        .map(|x| {
            ranks
                .order(x)
                .iter()
                .position(|&y| scores.cmp_objects(y as usize, x).is_gt())
                .unwrap_or(n)
        })
        .collect();

    // E(k) = #{x : duration(x) >= k}
    let mut counts = vec![0usize; n];
    for &d in &durations {
        counts[d - 1] += 1;
    }
    for k in (1..n).rev() {
        counts[k - 1] += counts[k];
    }
    let k_optimum = optimal_k(&counts);
    SweepTable {
        counts,
        durations,
        k_optimum,
    }
}

/// Smallest `k` maximizing `(n - k + 1) - E(k)`, where `counts[k - 1] = E(k)`
/// and `n = counts.len()`.
pub fn optimal_k(counts: &[usize]) -> usize {
    let n = counts.len() as i64;
    let mut best = (i64::MIN, 1);
    for (i, &e) in counts.iter().enumerate() {
        let k = i as i64 + 1;
        let gap = (n - k + 1) - e as i64;
        if gap > best.0 {
            best = (gap, i + 1);
        }
    }
    best.1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::euclidean_line;
    use crate::scoring::{aggregated_scores, rank_table, TiePolicy};

    fn fixture() -> (ScoreVector, RankTable) {
        let rk = rank_table(
            &euclidean_line(&[0.0, 1.0, 2.0, 10.0, 11.0, 12.0]),
            TiePolicy::IndexOrder,
        );
        (aggregated_scores(&rk), rk)
    }

    #[test]
    fn knn_neighborhoods() {
        let (_, rk) = fixture();
        assert_eq!(neighborhood(&rk, 0, &NeighborhoodSpec::Knn(3)).unwrap(), [0, 1, 2]);
        for x in 0..6 {
            assert_eq!(neighborhood(&rk, x, &NeighborhoodSpec::Knn(1)).unwrap(), [x]);
            assert_eq!(
                neighborhood(&rk, x, &NeighborhoodSpec::Knn(6)).unwrap(),
                [0, 1, 2, 3, 4, 5]
            );
        }
    }

    #[test]
    fn k_out_of_range() {
        let (sv, rk) = fixture();
        assert!(matches!(
            neighborhood(&rk, 0, &NeighborhoodSpec::Knn(0)),
            Err(Error::ScaleOutOfRange { k: 0, n: 6 })
        ));
        assert!(build_network(&sv, &rk, &NeighborhoodSpec::Knn(7)).is_err());
    }

    #[test]
    fn fixture_links() {
        let (sv, rk) = fixture();
        let net = build_network(&sv, &rk, &NeighborhoodSpec::Knn(3)).unwrap();
        assert_eq!(net.links(), [2, 2, 2, 3, 3, 3]);
        assert_eq!(net.exemplars(), [2, 3]);
        let net = build_network(&sv, &rk, &NeighborhoodSpec::Knn(4)).unwrap();
        assert_eq!(net.exemplars(), [3]);
        assert_eq!(net.root(0), 3);
    }

    #[test]
    fn fixture_sweep() {
        let (sv, rk) = fixture();
        let sweep = scale_sweep(&sv, &rk);
        assert_eq!(sweep.counts(), [6, 3, 2, 1, 1, 1]);
        assert_eq!(sweep.durations(), [1, 2, 3, 6, 1, 1]);
        assert_eq!(sweep.k_optimum(), 2);
        assert_eq!(sweep.exemplars(2), [1, 2, 3]);
    }

    #[test]
    fn optimal_k_edges() {
        assert_eq!(optimal_k(&[1]), 1);
        assert_eq!(optimal_k(&[6, 3, 2, 1, 1, 1]), 2);
        assert_eq!(optimal_k(&[2, 2]), 1);
    }

    #[test]
    fn graph_mode_links() {
        let (sv, rk) = fixture();
        // 0 - 5 - 3, isolated 1, 2 - 4
        let adj = Adjacency::new(vec![vec![5], vec![], vec![4], vec![5], vec![2], vec![0, 3]]).unwrap();
        let spec = NeighborhoodSpec::Graph(adj);
        assert_eq!(neighborhood(&rk, 5, &spec).unwrap(), [0, 3, 5]);
        let net = build_network(&sv, &rk, &spec).unwrap();
        // scores: 2, 8/3, 17/6, 3, 8/3, 11/6
        assert_eq!(net.links(), [0, 1, 2, 3, 2, 3]);
        assert_eq!(net.exemplars(), [0, 1, 2, 3]);
    }

    #[test]
    fn graph_mode_tie_goes_to_preferred() {
        // scores 8/3 for objects 1 and 4; object 0 sees both, prefers 1 (cost 1 < 11)
        let (sv, rk) = fixture();
        let adj = Adjacency::new(vec![vec![4, 1], vec![], vec![], vec![], vec![], vec![]]).unwrap();
        let net = build_network(&sv, &rk, &NeighborhoodSpec::Graph(adj)).unwrap();
        assert_eq!(net.link(0), 1);
    }

    #[test]
    fn adjacency_file() {
        let labels: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let adj = parse_adjacency("a: b, c\nc: a\n", &labels, Path::new("g.txt")).unwrap();
        assert_eq!(adj.neighbors(0), [1, 2]);
        assert!(adj.neighbors(1).is_empty());
        assert_eq!(adj.neighbors(2), [0]);
        assert!(parse_adjacency("a: z\n", &labels, Path::new("g.txt")).is_err());
        assert!(parse_adjacency("a: a\n", &labels, Path::new("g.txt")).is_err());
        assert!(parse_adjacency("a b\n", &labels, Path::new("g.txt")).is_err());
    }

    #[test]
    fn adjacency_rejects_self() {
        assert!(Adjacency::new(vec![vec![0]]).is_err());
        assert!(Adjacency::new(vec![vec![3], vec![]]).is_err());
    }
}
