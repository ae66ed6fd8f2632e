//! Exact reference solvers: minimum-cost perfect matching and the
//! minimum-makespan launch order for a single dispatcher. Both are slow by
//! construction and meant for small instances, gap reports and tests.

use serde::{Deserialize, Serialize};

use crate::error::{PlanError, Result};
use crate::model::{euclidean_distance, Vec3};

/// Largest instance solved by exhaustive enumeration.
pub const EXHAUSTIVE_MATCH_LIMIT: usize = 12;
/// Largest list accepted by [`optimal_makespan_order`].
pub const MAKESPAN_LIMIT: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchingInstance {
    pub sources: Vec<Vec3>,
    pub sinks: Vec<Vec3>,
}

impl MatchingInstance {
    pub fn cost_matrix(&self) -> Vec<Vec<f64>> {
        self.sources
            .iter()
            .map(|&s| self.sinks.iter().map(|&t| euclidean_distance(s, t)).collect())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Matching {
    pub total: f64,
    /// `assignment[i]` is the sink matched to source `i`.
    pub assignment: Vec<usize>,
}

/// Minimum total distance perfect matching. Exhaustive up to
/// [`EXHAUSTIVE_MATCH_LIMIT`], Hungarian beyond.
pub fn optimal_match(instance: &MatchingInstance) -> Result<Matching> {
    optimal_match_costs(&instance.cost_matrix())
}

pub fn optimal_match_costs(costs: &[Vec<f64>]) -> Result<Matching> {
    let n = square_size(costs)?;
    if n <= EXHAUSTIVE_MATCH_LIMIT {
        exhaustive_match(costs)
    } else {
        hungarian_match(costs)
    }
}

fn square_size(costs: &[Vec<f64>]) -> Result<usize> {
    let rows = costs.len();
    match costs.iter().find(|r| r.len() != rows) {
        Some(r) => Err(PlanError::NonSquare {
            rows,
            cols: r.len(),
        }),
        None => Ok(rows),
    }
}

/// Enumerates every perfect matching, sharing work between matchings with
/// the same set of used sinks (dynamic programming over sink subsets).
pub fn exhaustive_match(costs: &[Vec<f64>]) -> Result<Matching> {
    let n = square_size(costs)?;
    if n > EXHAUSTIVE_MATCH_LIMIT {
        return Err(PlanError::TooLarge {
            len: n,
            max: EXHAUSTIVE_MATCH_LIMIT,
        });
    }
    let full = 1usize << n;
    // best[mask]: cheapest way to match the first popcount(mask) sources onto `mask`.
    let mut best = vec![f64::INFINITY; full];
    let mut choice = vec![usize::MAX; full];
    best[0] = 0.0;
    for mask in 0..full {
        if !best[mask].is_finite() {
            continue;
        }
        let row = mask.count_ones() as usize;
        if row == n {
            continue;
        }
        for (col, c) in costs[row].iter().enumerate() {
            if mask & (1 << col) != 0 {
                continue;
            }
            let next = mask | (1 << col);
            let cost = best[mask] + c;
            if cost < best[next] {
                best[next] = cost;
                choice[next] = col;
            }
        }
    }
    let mut assignment = vec![0; n];
    let mut mask = full - 1;
    for row in (0..n).rev() {
        let col = choice[mask];
        assignment[row] = col;
        mask &= !(1 << col);
    }
    Ok(Matching {
        total: best[full - 1],
        assignment,
    })
}

/// O(n³) shortest augmenting path assignment with row/column potentials.
pub fn hungarian_match(costs: &[Vec<f64>]) -> Result<Matching> {
    let n = square_size(costs)?;
    if n == 0 {
        return Ok(Matching {
            total: 0.0,
            assignment: vec![],
        });
    }
    // 1-based arrays; column 0 is the virtual root of each augmentation.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = costs[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0; n];
    for j in 1..=n {
        assignment[row_of[j] - 1] = j - 1;
    }
    let total = assignment
        .iter()
        .enumerate()
        .map(|(i, &j)| costs[i][j])
        .sum();
    Ok(Matching { total, assignment })
}

/// Makespan of launching `distances` in the given order from one dispatcher:
/// the k-th launch leaves at `k / rate` and flies `d / speed`.
pub fn makespan(distances: &[f64], order: &[usize], rate: f64, speed: f64) -> f64 {
    order
        .iter()
        .enumerate()
        .map(|(k, &i)| k as f64 / rate + distances[i] / speed)
        .fold(0.0, f64::max)
}

/// Tries every launch order. Returns the minimum makespan and the first
/// order (lexicographically) that achieves it.
pub fn optimal_makespan_order(distances: &[f64], rate: f64, speed: f64) -> Result<(f64, Vec<usize>)> {
    let n = distances.len();
    if n > MAKESPAN_LIMIT {
        return Err(PlanError::TooLarge {
            len: n,
            max: MAKESPAN_LIMIT,
        });
    }
    let mut best = (f64::INFINITY, Vec::new());
    let mut order = Vec::with_capacity(n);
    let mut used = vec![false; n];
    permute(distances, rate, speed, &mut order, &mut used, &mut best);
    if n == 0 {
        best.0 = 0.0;
    }
    Ok(best)
}

fn permute(
    distances: &[f64],
    rate: f64,
    speed: f64,
    order: &mut Vec<usize>,
    used: &mut [bool],
    best: &mut (f64, Vec<usize>),
) {
    if order.len() == distances.len() {
        let m = makespan(distances, order, rate, speed);
        if m < best.0 {
            *best = (m, order.clone());
        }
        return;
    }
    for i in 0..distances.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        order.push(i);
        permute(distances, rate, speed, order, used, best);
        order.pop();
        used[i] = false;
    }
}
