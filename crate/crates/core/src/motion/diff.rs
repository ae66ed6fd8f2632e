use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::model::{Cell, ColorChange, Point, PointCloud, Rgb};

/// How the points of one cloud relate to the next, by exact coordinate.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CloudDiff {
    /// Same cell, same color.
    pub unchanged: Vec<Point>,
    /// Same cell, new color.
    pub gamma: Vec<ColorChange>,
    /// Points of the current cloud with no counterpart in the next one; their
    /// FLSs are free to move.
    pub delta: Vec<Point>,
    /// Points of the next cloud with no counterpart in the current one.
    pub mu: Vec<Point>,
}

pub fn diff_clouds(current: &PointCloud, next: &PointCloud) -> CloudDiff {
    diff_points(current.points(), next.points())
}

/// Hashes `current` by cell and probes it with `next`. Probe hits are removed
/// from the table; whatever is left over becomes `delta`, listed in
/// `current` order.
pub fn diff_points(current: &[Point], next: &[Point]) -> CloudDiff {
    let mut table: HashMap<Cell, (usize, Rgb)> = current
        .iter()
        .enumerate()
        .map(|(i, p)| (p.cell, (i, p.color)))
        .collect();
    let mut out = CloudDiff::default();
    for q in next {
        match table.remove(&q.cell) {
            Some((_, color)) if color == q.color => out.unchanged.push(*q),
            Some((_, color)) => out.gamma.push(ColorChange {
                cell: q.cell,
                from: color,
                to: q.color,
            }),
            None => out.mu.push(*q),
        }
    }
    let mut left: Vec<usize> = table.into_values().map(|(i, _)| i).collect();
    left.sort_unstable();
    out.delta = left.into_iter().map(|i| current[i]).collect();
    out
}
