//! Simulates an encoding cell by cell and checks it against the scene.

use std::collections::HashMap;

use crate::error::{PlanError, Result};
use crate::model::{Cell, PathOrigin, Point, PointCloud, Rgb, Scene, TransitionPlan};

use super::encode::SceneEncoding;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    Lit(Rgb),
    Dark,
}

/// Display state: which cells hold an FLS, and whether it is lit.
#[derive(Debug, Clone, Default)]
pub struct Replayer {
    cells: HashMap<Cell, Slot>,
    /// Index of the cloud currently shown.
    cloud: usize,
}

impl Replayer {
    pub fn new(encoding: &SceneEncoding) -> Result<Self> {
        let mut r = Replayer::default();
        for p in &encoding.initial_plan.paths {
            if !matches!(p.origin, PathOrigin::Dispatcher(_)) {
                return Err(r.fail(Some(p.destination.cell), "initial flight does not start at a dispatcher"));
            }
            r.arrive(p.destination)?;
        }
        Ok(r)
    }

    fn fail(&self, cell: Option<Cell>, message: impl Into<String>) -> PlanError {
        PlanError::Replay {
            cloud: self.cloud,
            cell,
            message: message.into(),
        }
    }

    fn arrive(&mut self, p: Point) -> Result<()> {
        if self.cells.insert(p.cell, Slot::Lit(p.color)).is_some() {
            return Err(self.fail(Some(p.cell), "arrival at an occupied cell"));
        }
        Ok(())
    }

    fn leave(&mut self, c: Cell, dark: bool) -> Result<()> {
        match (self.cells.remove(&c), dark) {
            (Some(Slot::Lit(_)), false) | (Some(Slot::Dark), true) => Ok(()),
            (Some(_), _) => Err(self.fail(Some(c), if dark { "no dark FLS parked here" } else { "FLS here is dark" })),
            (None, _) => Err(self.fail(Some(c), "departure from an empty cell")),
        }
    }

    /// Departures, then color changes, then arrivals.
    pub fn apply(&mut self, plan: &TransitionPlan) -> Result<()> {
        self.cloud += 1;
        for p in &plan.epsilon {
            let Some(c) = p.source_cell() else {
                return Err(self.fail(Some(p.destination.cell), "flight does not start inside the display"));
            };
            self.leave(c, p.origin == PathOrigin::Dark)?;
        }
        for r in &plan.recalls {
            self.leave(r.point.cell, false)?;
        }
        for &c in &plan.parked {
            match self.cells.get_mut(&c) {
                Some(s @ Slot::Lit(_)) => *s = Slot::Dark,
                _ => return Err(self.fail(Some(c), "only a lit FLS can go dark")),
            }
        }
        for g in &plan.gamma {
            match self.cells.get_mut(&g.cell) {
                Some(Slot::Lit(color)) if *color == g.from => *color = g.to,
                _ => return Err(self.fail(Some(g.cell), "color change without a matching lit FLS")),
            }
        }
        for p in &plan.epsilon {
            self.arrive(p.destination)?;
        }
        for f in &plan.fresh_deploys {
            self.arrive(f.point)?;
        }
        Ok(())
    }

    /// Lit points, by cell.
    pub fn lit_points(&self) -> Vec<Point> {
        let mut v: Vec<Point> = self
            .cells
            .iter()
            .filter_map(|(c, s)| match s {
                Slot::Lit(color) => Some(Point::new(*c, *color)),
                Slot::Dark => None,
            })
            .collect();
        v.sort_by_key(|p| p.cell);
        v
    }

    pub fn dark_count(&self) -> usize {
        self.cells.values().filter(|s| **s == Slot::Dark).count()
    }

    /// Compares the lit state with `cloud`, naming the smallest cell that
    /// differs.
    pub fn check(&self, cloud: &PointCloud) -> Result<()> {
        let got = self.lit_points();
        let mut want = cloud.points().to_vec();
        want.sort_by_key(|p| p.cell);
        let (mut i, mut j) = (0, 0);
        while i < got.len() || j < want.len() {
            let (g, w) = (got.get(i), want.get(j));
            match (g, w) {
                (Some(g), Some(w)) if g.cell == w.cell => {
                    if g.color != w.color {
                        return Err(self.fail(Some(g.cell), "wrong color"));
                    }
                    i += 1;
                    j += 1;
                }
                (Some(g), Some(w)) if g.cell < w.cell => return Err(self.fail(Some(g.cell), "lit cell not in the cloud")),
                (Some(g), None) => return Err(self.fail(Some(g.cell), "lit cell not in the cloud")),
                (_, Some(w)) => return Err(self.fail(Some(w.cell), "point of the cloud is not lit")),
                (None, None) => unreachable!(),
            }
        }
        Ok(())
    }
}

/// Replays `encoding` and checks every intermediate display against the
/// corresponding cloud of `scene`.
pub fn verify_replay(encoding: &SceneEncoding, scene: &Scene) -> Result<()> {
    if encoding.transitions.len() + 1 != scene.clouds.len() {
        return Err(PlanError::Replay {
            cloud: 0,
            cell: None,
            message: format!(
                "encoding has {} transitions for {} clouds",
                encoding.transitions.len(),
                scene.clouds.len()
            ),
        });
    }
    let mut r = Replayer::new(encoding)?;
    r.check(&scene.clouds[0])?;
    for (t, cloud) in encoding.transitions.iter().zip(&scene.clouds[1..]) {
        r.apply(t)?;
        r.check(cloud)?;
    }
    if r.dark_count() > 0 {
        return Err(PlanError::Replay {
            cloud: scene.clouds.len() - 1,
            cell: None,
            message: format!("{} dark FLSs never leave the display", r.dark_count()),
        });
    }
    Ok(())
}

/// Lit points once every transition has been applied.
pub fn final_points(encoding: &SceneEncoding) -> Result<Vec<Point>> {
    let mut r = Replayer::new(encoding)?;
    for t in &encoding.transitions {
        r.apply(t)?;
    }
    Ok(r.lit_points())
}

/// Per transition `t`: every FLS lit in cloud `t` departs or stays, and every
/// point of cloud `t + 1` is reached by an arrival or a stay.
pub fn check_conservation(encoding: &SceneEncoding, scene: &Scene) -> Result<()> {
    for (t, plan) in encoding.transitions.iter().enumerate() {
        let (before, after) = (scene.clouds[t].len(), scene.clouds[t + 1].len());
        let fail = |message: String| PlanError::Replay {
            cloud: t + 1,
            cell: None,
            message,
        };
        if plan.lit_departures() + plan.stays() != before {
            return Err(fail(format!(
                "{} departures + {} stays != {before} points",
                plan.lit_departures(),
                plan.stays()
            )));
        }
        if plan.arrivals() + plan.stays() != after {
            return Err(fail(format!("{} arrivals + {} stays != {after} points", plan.arrivals(), plan.stays())));
        }
    }
    Ok(())
}
