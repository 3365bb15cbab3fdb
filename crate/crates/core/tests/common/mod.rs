//! Brute-force reference computations, written without sorting or prefix
//! scans so they share no code path with the library.

#![allow(dead_code)]

use exemplar_core::RelationMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// `Rk_x(y)` by counting the objects `x` strictly prefers to `y`.
pub fn oracle_ranks(r: &RelationMatrix) -> Vec<Vec<usize>> {
    let n = r.len();
    let before = |x: usize, z: usize, y: usize| {
        let (cz, cy) = (r.get(x, z), r.get(x, y));
        if cz != cy {
            return cz < cy;
        }
        if z == x || y == x {
            return z == x && y != x;
        }
        z < y
    };
    (0..n)
        .map(|x| {
            (0..n)
                .map(|y| 1 + (0..n).filter(|&z| z != y && before(x, z, y)).count())
                .collect()
        })
        .collect()
}

/// Aggregated scores as exact fractions `numerator / n`.
pub fn oracle_score_numerators(ranks: &[Vec<usize>]) -> Vec<i64> {
    let n = ranks.len();
    (0..n).map(|x| (0..n).map(|y| (n - ranks[y][x]) as i64).sum()).collect()
}

/// Link map at scale `k` by enumerating each neighborhood.
pub fn oracle_links(ranks: &[Vec<usize>], num: &[i64], k: usize) -> Vec<usize> {
    let n = ranks.len();
    (0..n)
        .map(|x| {
            let hood: Vec<usize> = (0..n).filter(|&y| ranks[x][y] <= k).collect();
            assert_eq!(hood.len(), k);
            let best = hood.iter().map(|&y| num[y]).max().unwrap();
            *hood
                .iter()
                .filter(|&&y| num[y] == best)
                .min_by_key(|&&y| ranks[x][y])
                .unwrap()
        })
        .collect()
}

pub fn oracle_exemplars(ranks: &[Vec<usize>], num: &[i64], k: usize) -> Vec<usize> {
    let links = oracle_links(ranks, num, k);
    (0..ranks.len()).filter(|&x| links[x] == x).collect()
}

/// Random valid relation: off-diagonal costs uniform in (0, 1), asymmetric.
pub fn random_relation(rng: &mut ChaCha8Rng, n: usize) -> RelationMatrix {
    RelationMatrix::from_fn((0..n).map(|i| format!("o{i}")).collect(), |i, j| {
        if i == j {
            0.0
        } else {
            rng.gen_range(f64::EPSILON..1.0)
        }
    })
    .unwrap()
}

pub fn uniform_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| vec![rng.gen_range(-10.0..=40.0), rng.gen_range(-15.0..=15.0)])
        .collect()
}
