//! Whole-scene encoding: initial deployment, Step 1 per group of point
//! clouds (GPC), Step 2 across the scene.

use std::ops::RangeInclusive;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{build_grid, populate_grid, Theta};
use super::motill::{motill_transition, simple_transition, TransitionDraft, Variant};
use super::replay::final_points;
use super::step2::{step2_resolve, Step2Outcome};
use crate::deploy::{assign, order_deployments, Algorithm, DeploymentSchedule};
use crate::error::{PlanError, Result};
use crate::model::{DisplayConfig, FlightPath, PathOrigin, PointCloud, Scene, TransitionPlan};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GpcConfig {
    /// Clouds per GPC; `None` puts the whole scene in one GPC.
    pub omega: Option<usize>,
    /// Cuboid capacity; `None` is unbounded (a single cuboid).
    pub theta: Theta,
    pub variant: Variant,
}

impl GpcConfig {
    pub fn simple() -> Self {
        GpcConfig {
            omega: None,
            theta: None,
            variant: Variant::Simple,
        }
    }

    pub fn motill(variant: Variant, theta: Theta) -> Self {
        GpcConfig {
            omega: None,
            theta,
            variant,
        }
    }

    pub fn with_omega(mut self, omega: usize) -> Self {
        self.omega = Some(omega);
        self
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.theta == Some(0) {
            return Err(PlanError::InvalidConfig("cuboid capacity must be at least 1".into()));
        }
        if self.variant == Variant::Simple && self.theta.is_some() {
            return Err(PlanError::InvalidConfig("the simple variant uses an unbounded cuboid capacity".into()));
        }
        match self.omega {
            Some(0) => Err(PlanError::InvalidConfig("GPC size must be positive".into())),
            Some(w) if w > n => Err(PlanError::InvalidConfig(format!("GPC size {w} exceeds the {n} clouds of the scene"))),
            Some(1) if n > 1 => Err(PlanError::InvalidConfig("GPC size 1 leaves no transitions inside a group".into())),
            _ => Ok(()),
        }
    }

    /// The variant an encoding is labelled with: with one cuboid every
    /// variant is Simple.
    pub fn effective_variant(&self) -> Variant {
        if self.theta.is_none() {
            Variant::Simple
        } else {
            self.variant
        }
    }
}

/// Consecutive GPCs share their boundary cloud.
pub fn split_gpcs(n: usize, omega: usize) -> Vec<RangeInclusive<usize>> {
    if n <= 1 || omega < 2 {
        return vec![0..=n.saturating_sub(1)];
    }
    let mut out = Vec::new();
    let mut start = 0;
    while start < n - 1 {
        let end = (start + omega - 1).min(n - 1);
        out.push(start..=end);
        start = end;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneEncoding {
    pub algorithm: Algorithm,
    pub variant: Variant,
    pub theta: Theta,
    pub omega: usize,
    pub frame_rate: f64,
    pub initial_plan: DeploymentSchedule,
    /// `transitions[t]` moves the display from cloud `t` to cloud `t + 1`.
    pub transitions: Vec<TransitionPlan>,
}

impl SceneEncoding {
    pub fn total_distance(&self) -> f64 {
        self.transitions.iter().map(TransitionPlan::total_distance).fold(0.0, |s, d| s + d)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionMetrics {
    pub index: usize,
    pub flights: usize,
    pub distance: f64,
    /// Wall-clock time of Step 1 for this transition.
    pub step1_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncodeOutput {
    pub encoding: SceneEncoding,
    pub metrics: Vec<TransitionMetrics>,
}

/// Runs `f` on a dedicated pool of `workers` threads.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| PlanError::InvalidConfig(format!("cannot start {workers} workers: {e}")))?;
    Ok(pool.install(f))
}

fn step1(clouds: &[PointCloud], display: &DisplayConfig, gpc: &GpcConfig) -> Result<Vec<(TransitionDraft, f64)>> {
    let timed = |f: &dyn Fn() -> TransitionDraft| {
        let start = Instant::now();
        let d = f();
        (d, start.elapsed().as_secs_f64() * 1e3)
    };
    if gpc.variant == Variant::Simple {
        return Ok(clouds
            .par_windows(2)
            .map(|w| timed(&|| simple_transition(&w[0], &w[1])))
            .collect());
    }
    let grid = build_grid(&clouds[0], display.dims, gpc.theta)?;
    let occ = clouds.par_iter().map(|c| populate_grid(&grid, c)).collect::<Result<Vec<_>>>()?;
    Ok((0..clouds.len() - 1)
        .into_par_iter()
        .map(|i| timed(&|| motill_transition(&clouds[i], &clouds[i + 1], &grid, &occ[i], &occ[i + 1], gpc.variant)))
        .collect())
}

fn assemble(draft: &TransitionDraft, extra: Step2Outcome, launch: f64, speed: f64) -> TransitionPlan {
    let mut plan = draft.to_plan(launch, speed);
    plan.epsilon.extend(
        extra
            .dark_moves
            .iter()
            .map(|(from, to)| FlightPath::new(from.to_vec3(), *to, launch, speed, PathOrigin::Dark)),
    );
    plan.epsilon.sort_by_key(|p| (p.source_cell(), p.origin, p.destination.cell));
    plan.parked = extra.parked;
    plan.recalls = extra.recalls;
    plan.fresh_deploys = extra.fresh_deploys;
    plan
}

/// Encodes `scene` as an initial deployment of its first cloud followed by
/// one transition per pair of consecutive clouds. Transition `t` launches
/// when cloud `t + 1` is due, at `(t + 1) / frame_rate`.
pub fn encode_scene(scene: &Scene, display: &DisplayConfig, gpc: &GpcConfig, algorithm: Algorithm) -> Result<EncodeOutput> {
    display.validate()?;
    let n = scene.clouds.len();
    if n == 0 {
        return Err(PlanError::EmptyScene);
    }
    gpc.validate(n)?;
    for c in &scene.clouds {
        c.check_within(display.dims)?;
    }
    let plan = assign(algorithm, &scene.clouds[0], display)?;
    let initial_plan = order_deployments(&plan, display);

    let omega = gpc.omega.unwrap_or(n);
    let per_gpc: Vec<Vec<(TransitionDraft, f64)>> = split_gpcs(n, omega)
        .into_par_iter()
        .map(|r| step1(&scene.clouds[r], display, gpc))
        .collect::<Result<_>>()?;
    let (drafts, times): (Vec<TransitionDraft>, Vec<f64>) = per_gpc.into_iter().flatten().unzip();

    let used: Vec<u64> = plan.counts().into_iter().map(|c| c as u64).collect();
    let extras = step2_resolve(&scene.clouds, &drafts, display, &used)?;
    let transitions: Vec<TransitionPlan> = drafts
        .iter()
        .zip(extras)
        .enumerate()
        .map(|(t, (d, e))| assemble(d, e, (t + 1) as f64 / scene.frame_rate, display.fls_speed))
        .collect();
    let metrics = transitions
        .iter()
        .zip(times)
        .enumerate()
        .map(|(index, (p, step1_ms))| TransitionMetrics {
            index,
            flights: p.epsilon.len(),
            distance: p.total_distance(),
            step1_ms,
        })
        .collect();
    Ok(EncodeOutput {
        encoding: SceneEncoding {
            algorithm,
            variant: gpc.effective_variant(),
            theta: gpc.theta,
            omega,
            frame_rate: scene.frame_rate,
            initial_plan,
            transitions,
        },
        metrics,
    })
}

/// Encodes every GPC of the scene on its own, as a scene that starts with
/// its boundary cloud. Fold the result with [`fuse_gpcs`].
pub fn encode_gpcs(scene: &Scene, display: &DisplayConfig, gpc: &GpcConfig, algorithm: Algorithm) -> Result<Vec<SceneEncoding>> {
    let n = scene.clouds.len();
    if n == 0 {
        return Err(PlanError::EmptyScene);
    }
    gpc.validate(n)?;
    let omega = gpc.omega.unwrap_or(n);
    split_gpcs(n, omega)
        .into_par_iter()
        .map(|r| {
            let sub = Scene::new(scene.clouds[r].to_vec(), scene.frame_rate)?;
            let cfg = GpcConfig { omega: None, ..*gpc };
            let mut enc = encode_scene(&sub, display, &cfg, algorithm)?.encoding;
            enc.omega = omega;
            Ok(enc)
        })
        .collect()
}

/// Appends `second` to `first`. The boundary cloud is shown by both, so
/// `second`'s initial deployment is dropped and its transitions are shifted
/// to follow `first`'s.
pub fn fuse_gpcs(first: &SceneEncoding, second: &SceneEncoding) -> Result<SceneEncoding> {
    if first.frame_rate != second.frame_rate {
        return Err(PlanError::BoundaryMismatch("frame rates differ".into()));
    }
    let mut end = final_points(first)?;
    let mut start: Vec<_> = second.initial_plan.paths.iter().map(|p| p.destination).collect();
    end.sort_by_key(|p| p.cell);
    start.sort_by_key(|p| p.cell);
    if let Some(i) = (0..end.len().max(start.len())).find(|&i| end.get(i) != start.get(i)) {
        let at = end.get(i).or(start.get(i)).map(|p| p.cell);
        return Err(PlanError::BoundaryMismatch(format!(
            "last cloud of the first encoding and first cloud of the second differ at {}",
            at.map(|c| c.to_string()).unwrap_or_default()
        )));
    }
    let shift = first.transitions.len() as f64 / first.frame_rate;
    let mut out = first.clone();
    out.transitions.extend(second.transitions.iter().map(|t| {
        let mut t = t.clone();
        for p in &mut t.epsilon {
            p.launch_time += shift;
        }
        t
    }));
    Ok(out)
}
