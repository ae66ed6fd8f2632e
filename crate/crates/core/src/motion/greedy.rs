//! Greedy closest-pair matching.
//!
//! The reference procedure lists every pairing, sorts ascending by distance
//! and repeatedly takes the first pairing whose endpoints are both free. The
//! implementation below produces the same pairs without materialising the
//! sorted list: every free left item keeps its best free partner in a heap;
//! a popped entry whose partner was taken meanwhile is re-queried and pushed
//! back. A stale entry is never larger than the item's true best key, so the
//! first valid pop is always the global minimum.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::model::Point;

/// Greedy matching over abstract items. `key(i, j)` orders the pairing of
/// left item `i` with right item `j`, or rejects it with `None`. Keys must be
/// unique across pairings for the result to be well defined.
pub(crate) fn greedy_by<K, F>(n_left: usize, n_right: usize, key: F) -> Vec<(usize, usize)>
where
    K: Ord + Copy + Send,
    F: Fn(usize, usize) -> Option<K> + Sync,
{
    if n_left == 0 || n_right == 0 {
        return Vec::new();
    }
    let mut right_used = vec![false; n_right];
    let best_for = |i: usize, used: &[bool]| -> Option<(K, usize)> {
        (0..n_right)
            .filter(|&j| !used[j])
            .filter_map(|j| key(i, j).map(|k| (k, j)))
            .min_by(|a, b| a.0.cmp(&b.0))
    };
    let initial: Vec<Option<(K, usize)>> = if n_left * n_right > 1 << 16 {
        (0..n_left).into_par_iter().map(|i| best_for(i, &right_used)).collect()
    } else {
        (0..n_left).map(|i| best_for(i, &right_used)).collect()
    };
    let mut heap: BinaryHeap<Reverse<(K, usize, usize)>> = initial
        .into_iter()
        .enumerate()
        .filter_map(|(i, b)| b.map(|(k, j)| Reverse((k, i, j))))
        .collect();
    let mut pairs = Vec::with_capacity(n_left.min(n_right));
    let mut matched = 0;
    while let Some(Reverse((_, i, j))) = heap.pop() {
        if right_used[j] {
            if let Some((k, j2)) = best_for(i, &right_used) {
                heap.push(Reverse((k, i, j2)));
            }
            continue;
        }
        right_used[j] = true;
        pairs.push((i, j));
        matched += 1;
        if matched == n_right {
            break;
        }
    }
    pairs
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GreedyMatch {
    /// `(from, to)` in the order the pairings were taken.
    pub pairs: Vec<(Point, Point)>,
    pub delta_left: Vec<Point>,
    pub mu_left: Vec<Point>,
}

impl GreedyMatch {
    pub fn total_distance(&self) -> f64 {
        self.pairs.iter().map(|(a, b)| a.cell.distance(&b.cell)).fold(0.0, |s, d| s + d)
    }
}

/// Pairs freed FLSs with vacant cells, closest pairing first. Ties in
/// distance go to the lexicographically smaller `(from, to)` cells.
/// Produces `min(|delta|, |mu|)` pairs; the rest is returned unmatched in
/// input order.
pub fn greedy_match(delta: &[Point], mu: &[Point]) -> GreedyMatch {
    let idx = greedy_by(delta.len(), mu.len(), |i, j| {
        let (a, b) = (delta[i].cell, mu[j].cell);
        Some((a.sq_dist(&b), a, b))
    });
    let mut used_d = vec![false; delta.len()];
    let mut used_m = vec![false; mu.len()];
    let pairs = idx
        .into_iter()
        .map(|(i, j)| {
            used_d[i] = true;
            used_m[j] = true;
            (delta[i], mu[j])
        })
        .collect();
    GreedyMatch {
        pairs,
        delta_left: unused(delta, &used_d),
        mu_left: unused(mu, &used_m),
    }
}

fn unused(points: &[Point], used: &[bool]) -> Vec<Point> {
    points
        .iter()
        .zip(used)
        .filter(|(_, &u)| !u)
        .map(|(p, _)| *p)
        .collect()
}
