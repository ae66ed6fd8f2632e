//! Step 2: what to do with FLSs and vacant cells that Step 1 could not pair
//! inside their own transition.
//!
//! A freed FLS left over at transition `t` may go dark in place and fly to a
//! vacant cell of a later transition `t' > t`, provided its cell is not lit
//! by any cloud in between. That flight is taken only when it is shorter
//! than recalling the FLS to its nearest charging station plus deploying a
//! new one from the dispatcher nearest the vacant cell. Candidate pairings
//! are taken greedily, shortest first, like Step 1.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::greedy::greedy_by;
use super::motill::TransitionDraft;
use crate::error::{PlanError, Result};
use crate::model::{nearest_by, Cell, DisplayConfig, FreshDeploy, Point, PointCloud, Recall};

/// Step-2 additions for one transition.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Step2Outcome {
    /// Lit FLSs that go dark in place at this transition.
    pub parked: Vec<Cell>,
    /// Dark FLSs leaving their parking cell for a point of the next cloud.
    pub dark_moves: Vec<(Cell, Point)>,
    pub recalls: Vec<Recall>,
    pub fresh_deploys: Vec<FreshDeploy>,
}

/// `drafts[t]` is Step 1 of the transition from `clouds[t]` to
/// `clouds[t + 1]`. `used[k]` counts FLSs dispatcher `k` has already handed
/// out (the initial deployment); fresh deploys draw from what is left.
pub fn step2_resolve(
    clouds: &[PointCloud],
    drafts: &[TransitionDraft],
    display: &DisplayConfig,
    used: &[u64],
) -> Result<Vec<Step2Outcome>> {
    let mut out = vec![Step2Outcome::default(); drafts.len()];
    if drafts.iter().all(|d| d.delta.is_empty() && d.mu.is_empty()) {
        return Ok(out);
    }
    let lit: Vec<HashSet<Cell>> = clouds.iter().map(|c| c.iter().map(|p| p.cell).collect()).collect();

    // Left side: (transition, point, last transition it may leave at).
    let left: Vec<(usize, Point, usize)> = drafts
        .iter()
        .enumerate()
        .flat_map(|(t, d)| d.delta.iter().map(move |p| (t, *p)))
        .map(|(t, p)| {
            // The cell is free during clouds t+1.. until some cloud k lights
            // it again; the FLS must be gone by transition k-1.
            let k = (t + 2..clouds.len()).find(|&k| lit[k].contains(&p.cell)).unwrap_or(clouds.len());
            (t, p, k - 1)
        })
        .collect();
    let right: Vec<(usize, Point)> = drafts
        .iter()
        .enumerate()
        .flat_map(|(t, d)| d.mu.iter().map(move |p| (t, *p)))
        .collect();

    let station = |c: Cell| display.nearest_dispatcher(c.to_vec3());
    let station_cost: Vec<f64> = left
        .iter()
        .map(|(_, p, _)| (display.dispatchers[station(p.cell)].position - p.cell.to_vec3()).norm())
        .collect();
    let deploy_cost: Vec<f64> = right
        .iter()
        .map(|(_, p)| (display.dispatchers[station(p.cell)].position - p.cell.to_vec3()).norm())
        .collect();

    let pairs = greedy_by(left.len(), right.len(), |i, j| {
        let (t, a, last) = left[i];
        let (t2, b) = right[j];
        if t2 <= t || t2 > last {
            return None;
        }
        let sq = a.cell.sq_dist(&b.cell);
        if station_cost[i] + deploy_cost[j] < (sq as f64).sqrt() {
            return None;
        }
        Some((sq, t, a.cell, t2, b.cell))
    });

    let mut left_used = vec![false; left.len()];
    let mut right_used = vec![false; right.len()];
    for (i, j) in pairs {
        left_used[i] = true;
        right_used[j] = true;
        let (t, a, _) = left[i];
        let (t2, b) = right[j];
        out[t].parked.push(a.cell);
        out[t2].dark_moves.push((a.cell, b));
    }

    for (i, &(t, p, _)) in left.iter().enumerate() {
        if !left_used[i] {
            let s = station(p.cell);
            out[t].recalls.push(Recall {
                point: p,
                station: display.dispatchers[s].id,
                distance: station_cost[i],
            });
        }
    }

    let mut remaining: Vec<Option<u64>> = display
        .dispatchers
        .iter()
        .zip(used)
        .map(|(d, &u)| d.inventory.limit().map(|l| l.saturating_sub(u)))
        .collect();
    for (j, &(t, p)) in right.iter().enumerate() {
        if right_used[j] {
            continue;
        }
        let k = nearest_by(&display.dispatchers, p.cell.to_vec3(), |k| remaining[k] != Some(0))
            .ok_or(PlanError::InventoryExhausted(p.cell))?;
        if let Some(r) = remaining[k].as_mut() {
            *r -= 1;
        }
        let d = &display.dispatchers[k];
        out[t].fresh_deploys.push(FreshDeploy {
            dispatcher: d.id,
            point: p,
            distance: (d.position - p.cell.to_vec3()).norm(),
        });
    }

    for o in &mut out {
        o.parked.sort();
        o.dark_moves.sort_by_key(|(c, p)| (*c, p.cell));
        o.recalls.sort_by_key(|r| r.point.cell);
        o.fresh_deploys.sort_by_key(|f| f.point.cell);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{corners8, Dims, Inventory};
    use crate::motion::motill::simple_transition;

    fn cloud(cells: &[(u32, u32, u32)]) -> PointCloud {
        PointCloud::new(cells.iter().map(|&(x, y, z)| Point::white(x, y, z)).collect()).unwrap()
    }

    fn display(inv: Inventory) -> DisplayConfig {
        let dims = Dims::new(100, 100, 100);
        DisplayConfig::new(dims, corners8(dims, inv), 10.0, 4.0, 0.2).unwrap()
    }

    fn resolve(clouds: &[PointCloud], inv: Inventory) -> Result<Vec<Step2Outcome>> {
        let drafts: Vec<_> = clouds.windows(2).map(|w| simple_transition(&w[0], &w[1])).collect();
        step2_resolve(clouds, &drafts, &display(inv), &[0; 8])
    }

    #[test]
    fn equal_counts_skip_step2() {
        let c = [cloud(&[(1, 1, 1), (2, 2, 2)]), cloud(&[(5, 5, 5), (6, 6, 6)])];
        assert_eq!(resolve(&c, Inventory::Unbounded).unwrap(), vec![Step2Outcome::default()]);
    }

    #[test]
    fn shrinking_scene_recalls_everything() {
        let c = [cloud(&[(50, 50, 50), (50, 51, 50), (10, 10, 10)]), cloud(&[(50, 50, 50)]), cloud(&[(50, 50, 50)])];
        let out = resolve(&c, Inventory::Unbounded).unwrap();
        assert_eq!(out[0].recalls.len(), 2);
        assert_eq!(out[0].recalls[0].station, 1);
        assert!(out[1] == Step2Outcome::default());
    }

    #[test]
    fn nearby_later_vacancy_reuses_a_dark_fls() {
        // (50,50,50) is freed at t=0 and (50,51,50) is needed at t=1; the
        // station round trip is ~170 cells against a 1-cell flight.
        let c = [
            cloud(&[(50, 50, 50), (0, 0, 1)]),
            cloud(&[(0, 0, 1)]),
            cloud(&[(0, 0, 1), (50, 51, 50)]),
        ];
        let out = resolve(&c, Inventory::Unbounded).unwrap();
        assert_eq!(out[0].parked, vec![Cell::new(50, 50, 50)]);
        assert_eq!(out[1].dark_moves, vec![(Cell::new(50, 50, 50), Point::white(50, 51, 50))]);
        assert!(out[0].recalls.is_empty() && out[1].fresh_deploys.is_empty());
    }

    #[test]
    fn vacancy_next_to_a_station_is_freshly_deployed() {
        let c = [cloud(&[(99, 99, 99), (0, 0, 1)]), cloud(&[(0, 0, 1)]), cloud(&[(0, 0, 1), (1, 0, 0)])];
        let out = resolve(&c, Inventory::Unbounded).unwrap();
        assert!(out[0].parked.is_empty());
        assert_eq!(out[0].recalls[0].station, 8);
        assert_eq!(out[1].fresh_deploys[0].dispatcher, 1);
        assert_eq!(out[1].fresh_deploys[0].distance, 1.0);
    }

    #[test]
    fn parking_cell_lit_again_blocks_reuse() {
        // (50,50,50) leaves at t=0 but is lit again in cloud 2, so it cannot
        // wait there for the vacancy of transition 2.
        let c = [
            cloud(&[(50, 50, 50), (0, 0, 1)]),
            cloud(&[(0, 0, 1)]),
            cloud(&[(0, 0, 1), (50, 50, 50)]),
            cloud(&[(0, 0, 1), (50, 50, 50), (50, 52, 50)]),
        ];
        let out = resolve(&c, Inventory::Unbounded).unwrap();
        assert_eq!(out[0].parked.len(), 1);
        assert_eq!(out[1].dark_moves[0].1.cell, Cell::new(50, 50, 50));
        assert_eq!(out[2].fresh_deploys.len(), 1);
    }

    #[test]
    fn exhausted_inventory_is_an_error() {
        let c = [cloud(&[(1, 1, 1)]), cloud(&[(1, 1, 1), (2, 2, 2)])];
        let drafts: Vec<_> = c.windows(2).map(|w| simple_transition(&w[0], &w[1])).collect();
        let err = step2_resolve(&c, &drafts, &display(Inventory::Finite(1)), &[1; 8]).unwrap_err();
        assert!(matches!(err, PlanError::InventoryExhausted(_)));
        assert!(step2_resolve(&c, &drafts, &display(Inventory::Finite(2)), &[1; 8]).is_ok());
    }
}
