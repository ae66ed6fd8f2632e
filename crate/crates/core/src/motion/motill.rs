//! Step 1 of a transition: matching freed FLSs to vacant cells, either over
//! the whole display at once or cuboid by cuboid.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::diff::{diff_points, CloudDiff};
use super::greedy::greedy_match;
use super::grid::{Grid, Occupancy};
use crate::model::{Cell, ColorChange, FlightPath, PathOrigin, Point, PointCloud, TransitionPlan};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// One greedy pass over the whole display.
    Simple,
    /// Intra-cuboid matching, then inter-cuboid, then a final global pass.
    Icf,
    /// Inter-cuboid matching, then intra-cuboid, then a final global pass.
    Icl,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Simple => "simple",
            Variant::Icf => "icf",
            Variant::Icl => "icl",
        }
    }
}

/// Step-1 result for one pair of consecutive clouds.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TransitionDraft {
    /// `(from, to)` flights of lit FLSs, sorted by source then destination.
    pub moves: Vec<(Point, Point)>,
    pub gamma: Vec<ColorChange>,
    pub unchanged: usize,
    /// Freed FLSs left without a destination, by cell.
    pub delta: Vec<Point>,
    /// Vacant cells left without an FLS, by cell.
    pub mu: Vec<Point>,
}

impl TransitionDraft {
    fn finish(mut moves: Vec<(Point, Point)>, mut gamma: Vec<ColorChange>, unchanged: usize, mut delta: Vec<Point>, mut mu: Vec<Point>) -> Self {
        moves.sort_by_key(|(a, b)| (a.cell, b.cell));
        gamma.sort_by_key(|g| g.cell);
        delta.sort_by_key(|p| p.cell);
        mu.sort_by_key(|p| p.cell);
        TransitionDraft {
            moves,
            gamma,
            unchanged,
            delta,
            mu,
        }
    }

    pub fn distance(&self) -> f64 {
        self.moves.iter().map(|(a, b)| a.cell.distance(&b.cell)).fold(0.0, |s, d| s + d)
    }

    /// Turns the moves into flight paths leaving at `launch_time`.
    pub fn to_plan(&self, launch_time: f64, speed: f64) -> TransitionPlan {
        TransitionPlan {
            epsilon: self
                .moves
                .iter()
                .map(|(a, b)| FlightPath::new(a.cell.to_vec3(), *b, launch_time, speed, PathOrigin::Lit))
                .collect(),
            gamma: self.gamma.clone(),
            delta: self.delta.clone(),
            mu: self.mu.clone(),
            unchanged: self.unchanged,
            ..TransitionPlan::default()
        }
    }
}

/// Diff of the two clouds followed by one greedy pass over all freed FLSs
/// and vacant cells.
pub fn simple_transition(current: &PointCloud, next: &PointCloud) -> TransitionDraft {
    let CloudDiff {
        unchanged,
        gamma,
        delta,
        mu,
    } = diff_points(current.points(), next.points());
    let g = greedy_match(&delta, &mu);
    TransitionDraft::finish(g.pairs, gamma, unchanged.len(), g.delta_left, g.mu_left)
}

/// Working state of one cuboid pair during a Motill transition.
#[derive(Debug, Clone, Default)]
struct CuboidPair {
    before: usize,
    after: usize,
    delta: Vec<Point>,
    mu: Vec<Point>,
}

/// Step 1 restricted by the grid. Both clouds must already be populated into
/// `grid` (`cur_occ`, `next_occ`). `Variant::Simple` is treated as ICF, which
/// is what a one-cuboid grid reduces to anyway.
pub fn motill_transition(
    current: &PointCloud,
    next: &PointCloud,
    grid: &Grid,
    cur_occ: &Occupancy,
    next_occ: &Occupancy,
    variant: Variant,
) -> TransitionDraft {
    let gather = |cloud: &PointCloud, idx: &[usize]| -> Vec<Point> { idx.iter().map(|&i| cloud.points()[i]).collect() };
    let locals: Vec<(CuboidPair, Vec<ColorChange>, usize)> = (0..grid.len())
        .into_par_iter()
        .map(|j| {
            let a = gather(current, &cur_occ.members[j]);
            let b = gather(next, &next_occ.members[j]);
            let d = diff_points(&a, &b);
            let pair = CuboidPair {
                before: a.len(),
                after: b.len(),
                delta: d.delta,
                mu: d.mu,
            };
            (pair, d.gamma, d.unchanged.len())
        })
        .collect();
    let mut gamma = Vec::new();
    let mut unchanged = 0;
    let mut pairs = Vec::with_capacity(locals.len());
    for (p, g, u) in locals {
        gamma.extend(g);
        unchanged += u;
        pairs.push(p);
    }

    let mut moves = Vec::new();
    match variant {
        Variant::Icl => {
            inter_cuboid(grid, &mut pairs, &mut moves);
            intra_cuboid(&mut pairs, &mut moves);
        }
        Variant::Icf | Variant::Simple => {
            intra_cuboid(&mut pairs, &mut moves);
            inter_cuboid(grid, &mut pairs, &mut moves);
        }
    }

    // Final pass over whatever is still unmatched anywhere in the grid.
    let delta: Vec<Point> = pairs.iter_mut().flat_map(|p| std::mem::take(&mut p.delta)).collect();
    let mu: Vec<Point> = pairs.iter_mut().flat_map(|p| std::mem::take(&mut p.mu)).collect();
    let g = greedy_match(&delta, &mu);
    moves.extend(g.pairs);
    TransitionDraft::finish(moves, gamma, unchanged, g.delta_left, g.mu_left)
}

fn intra_cuboid(pairs: &mut [CuboidPair], moves: &mut Vec<(Point, Point)>) {
    let matched: Vec<Vec<(Point, Point)>> = pairs
        .par_iter_mut()
        .map(|p| {
            let g = greedy_match(&p.delta, &p.mu);
            p.delta = g.delta_left;
            p.mu = g.mu_left;
            g.pairs
        })
        .collect();
    moves.extend(matched.into_iter().flatten());
}

/// Vacant cells of every growing cuboid are matched against freed FLSs of
/// its shrinking neighbors. Growing cuboids are handled in id order; those
/// that share no shrinking neighbor with an earlier one still waiting run
/// together, which yields exactly the sequential result.
fn inter_cuboid(grid: &Grid, pairs: &mut [CuboidPair], moves: &mut Vec<(Point, Point)>) {
    let shrinking: Vec<bool> = pairs.iter().map(|p| p.after < p.before).collect();
    let growing: Vec<usize> = (0..pairs.len()).filter(|&j| pairs[j].after > pairs[j].before).collect();

    // wave[k]: growing cuboids processed in round k
    let mut last_round = vec![None::<usize>; pairs.len()];
    let mut waves: Vec<Vec<(usize, Vec<usize>)>> = Vec::new();
    for &j in &growing {
        let sources: Vec<usize> = grid.neighbors[j].iter().copied().filter(|&n| shrinking[n]).collect();
        if sources.is_empty() {
            continue;
        }
        let round = sources
            .iter()
            .filter_map(|&n| last_round[n].map(|r| r + 1))
            .max()
            .unwrap_or(0);
        for &n in &sources {
            last_round[n] = Some(round);
        }
        if waves.len() <= round {
            waves.resize_with(round + 1, Vec::new);
        }
        waves[round].push((j, sources));
    }

    for wave in waves {
        let snapshot: &[CuboidPair] = pairs;
        let results: Vec<_> = wave
            .into_par_iter()
            .map(|(j, sources)| {
                let delta: Vec<Point> = sources.iter().flat_map(|&n| snapshot[n].delta.iter().copied()).collect();
                let g = greedy_match(&delta, &snapshot[j].mu);
                (j, sources, g.pairs)
            })
            .collect();
        for (j, sources, matched) in results {
            let used_from: std::collections::HashSet<Cell> = matched.iter().map(|(a, _)| a.cell).collect();
            let used_to: std::collections::HashSet<Cell> = matched.iter().map(|(_, b)| b.cell).collect();
            for n in sources {
                pairs[n].delta.retain(|p| !used_from.contains(&p.cell));
            }
            pairs[j].mu.retain(|p| !used_to.contains(&p.cell));
            moves.extend(matched);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Dims;
    use crate::motion::grid::{build_grid, populate_grid};

    fn cloud(cells: &[(u32, u32, u32)]) -> PointCloud {
        PointCloud::new(cells.iter().map(|&(x, y, z)| Point::white(x, y, z)).collect()).unwrap()
    }

    fn run(a: &PointCloud, b: &PointCloud, theta: Option<usize>, v: Variant) -> TransitionDraft {
        let g = build_grid(a, Dims::new(20, 20, 20), theta).unwrap();
        let oa = populate_grid(&g, a).unwrap();
        let ob = populate_grid(&g, b).unwrap();
        motill_transition(a, b, &g, &oa, &ob, v)
    }

    #[test]
    fn identical_clouds_have_no_moves() {
        let a = cloud(&[(0, 0, 0), (5, 5, 5), (10, 0, 3)]);
        for v in [Variant::Icf, Variant::Icl] {
            let d = run(&a, &a, Some(1), v);
            assert!(d.moves.is_empty());
            assert_eq!(d.unchanged, 3);
        }
    }

    #[test]
    fn single_cuboid_matches_simple() {
        let a = cloud(&[(0, 0, 0), (5, 5, 5), (10, 0, 3), (1, 2, 3)]);
        let b = cloud(&[(0, 1, 0), (6, 5, 5), (12, 0, 3), (1, 2, 3), (19, 19, 19)]);
        let s = simple_transition(&a, &b);
        for v in [Variant::Icf, Variant::Icl] {
            assert_eq!(run(&a, &b, None, v), s);
        }
        assert_eq!(s.mu.len(), 1);
    }

    #[test]
    fn inter_first_can_steal_a_local_match() {
        // Grid splits at x=16: A=[0,16) shrinks by one, B=[16,20) grows by one.
        // A frees p=(13,0) and q=(13,4) and needs a=(12,0); B needs b=(16,0).
        // ICF: p->a (1), q->b (5) = 6. ICL: b takes p (3), then q->a (sqrt 17).
        let a = cloud(&[(13, 0, 0), (13, 4, 0), (16, 5, 0), (17, 5, 0)]);
        let b = cloud(&[(12, 0, 0), (16, 5, 0), (17, 5, 0), (16, 0, 0)]);
        let g = build_grid(&a, Dims::new(20, 20, 20), Some(2)).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g.cuboids[0].hi[0], 16);
        let icf = run(&a, &b, Some(2), Variant::Icf);
        let icl = run(&a, &b, Some(2), Variant::Icl);
        assert_eq!(icf.distance(), 6.0);
        assert!((icl.distance() - (3.0 + 17f64.sqrt())).abs() < 1e-12);
        assert_eq!(simple_transition(&a, &b).distance(), 6.0);
    }
}
