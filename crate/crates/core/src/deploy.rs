//! Static illumination: assigning every point of a cloud to a dispatcher and
//! turning the assignment into a launch schedule.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{PlanError, Result};
use crate::model::{
    euclidean_distance, nearest_by, DisplayConfig, FlightPath, PathOrigin, Point, PointCloud,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    MinDist,
    QuotaBalanced,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::MinDist => "mindist",
            Algorithm::QuotaBalanced => "quota",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispatcherLoad {
    pub dispatcher: u32,
    pub points: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeploymentPlan {
    pub algorithm: Algorithm,
    /// One entry per dispatcher, in id order.
    pub assignments: Vec<DispatcherLoad>,
    /// Times every active quota ran out with points still unassigned.
    pub quota_resets: usize,
    /// Points that did not go to their nearest dispatcher because its
    /// inventory was exhausted (MinDist only).
    pub inventory_fallbacks: usize,
}

impl DeploymentPlan {
    fn empty(algorithm: Algorithm, config: &DisplayConfig) -> Self {
        DeploymentPlan {
            algorithm,
            assignments: config
                .dispatchers
                .iter()
                .map(|d| DispatcherLoad {
                    dispatcher: d.id,
                    points: Vec::new(),
                })
                .collect(),
            quota_resets: 0,
            inventory_fallbacks: 0,
        }
    }

    pub fn counts(&self) -> Vec<usize> {
        self.assignments.iter().map(|a| a.points.len()).collect()
    }

    pub fn len(&self) -> usize {
        self.assignments.iter().map(|a| a.points.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dispatchers_used(&self) -> usize {
        self.assignments.iter().filter(|a| !a.points.is_empty()).count()
    }

    pub fn points(&self) -> impl Iterator<Item = &Point> {
        self.assignments.iter().flat_map(|a| a.points.iter())
    }
}

fn check_inventory(cloud: &PointCloud, config: &DisplayConfig) -> Result<()> {
    config.validate()?;
    if let Some(available) = config.total_inventory() {
        if (cloud.len() as u64) > available {
            return Err(PlanError::InsufficientInventory {
                required: cloud.len(),
                available,
            });
        }
    }
    Ok(())
}

/// Each point goes to its nearest dispatcher (lowest id on ties). A
/// dispatcher whose finite inventory is used up is skipped and the point
/// goes to the nearest one that still has FLSs.
pub fn min_dist_assign(cloud: &PointCloud, config: &DisplayConfig) -> Result<DeploymentPlan> {
    check_inventory(cloud, config)?;
    let mut plan = DeploymentPlan::empty(Algorithm::MinDist, config);
    let mut remaining: Vec<Option<u64>> = config.dispatchers.iter().map(|d| d.inventory.limit()).collect();
    for p in cloud {
        let target = p.cell.to_vec3();
        let nearest = config.nearest_dispatcher(target);
        let tgt = if remaining[nearest] != Some(0) {
            nearest
        } else {
            plan.inventory_fallbacks += 1;
            nearest_by(&config.dispatchers, target, |j| remaining[j] != Some(0))
                .expect("total inventory covers the cloud")
        };
        if let Some(n) = remaining[tgt].as_mut() {
            *n -= 1;
        }
        plan.assignments[tgt].points.push(*p);
    }
    Ok(plan)
}

/// Per-dispatcher quota bookkeeping for [`quota_balanced_assign`].
#[derive(Debug, Clone, PartialEq)]
pub struct QuotaState {
    /// Seconds of travel time each dispatcher may still spend.
    pub quota: Vec<f64>,
    /// Remaining FLSs, `None` when unbounded.
    pub inventory: Vec<Option<u64>>,
}

impl QuotaState {
    fn new(config: &DisplayConfig, alpha: usize) -> Self {
        let psi = config.psi();
        QuotaState {
            quota: vec![alpha as f64 / (psi as f64 * config.deploy_rate); psi],
            inventory: config.dispatchers.iter().map(|d| d.inventory.limit()).collect(),
        }
    }

    pub fn has_fls(&self, j: usize) -> bool {
        self.inventory[j] != Some(0)
    }

    pub fn is_active(&self, j: usize) -> bool {
        self.quota[j] > 0.0 && self.has_fls(j)
    }

    /// Spreads the remaining points over the dispatchers that still have FLSs.
    fn reset(&mut self, remaining_points: usize, rate: f64) {
        let stocked = (0..self.quota.len()).filter(|&j| self.has_fls(j)).count();
        let share = remaining_points as f64 / (stocked as f64 * rate);
        for j in 0..self.quota.len() {
            self.quota[j] = if self.has_fls(j) { share } else { 0.0 };
        }
    }
}

/// Assigns points in cloud order to the nearest dispatcher whose travel-time
/// quota is not used up. Each assignment costs the dispatcher `distance / S`
/// seconds of quota and one FLS. When no dispatcher is active the quotas are
/// recomputed from the points still unassigned.
pub fn quota_balanced_assign(cloud: &PointCloud, config: &DisplayConfig) -> Result<DeploymentPlan> {
    check_inventory(cloud, config)?;
    let mut plan = DeploymentPlan::empty(Algorithm::QuotaBalanced, config);
    let mut state = QuotaState::new(config, cloud.len());
    for (i, p) in cloud.iter().enumerate() {
        let target = p.cell.to_vec3();
        let mut tgt = nearest_by(&config.dispatchers, target, |j| state.is_active(j));
        if tgt.is_none() {
            state.reset(cloud.len() - i, config.deploy_rate);
            plan.quota_resets += 1;
            tgt = nearest_by(&config.dispatchers, target, |j| state.is_active(j));
        }
        let tgt = tgt.expect("a stocked dispatcher exists after a reset");
        let dist = euclidean_distance(config.dispatchers[tgt].position, target);
        state.quota[tgt] -= dist / config.fls_speed;
        if let Some(n) = state.inventory[tgt].as_mut() {
            *n -= 1;
        }
        plan.assignments[tgt].points.push(*p);
    }
    Ok(plan)
}

pub fn assign(algorithm: Algorithm, cloud: &PointCloud, config: &DisplayConfig) -> Result<DeploymentPlan> {
    match algorithm {
        Algorithm::MinDist => min_dist_assign(cloud, config),
        Algorithm::QuotaBalanced => quota_balanced_assign(cloud, config),
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DeploymentSchedule {
    /// Grouped by dispatcher, each group in launch order.
    pub paths: Vec<FlightPath>,
}

impl DeploymentSchedule {
    pub fn latency(&self) -> f64 {
        compute_latency(self)
    }
}

/// Farthest point first; the k-th launch of a dispatcher leaves at `k / f`.
/// Equal distances launch in ascending cell order.
pub fn order_deployments(plan: &DeploymentPlan, config: &DisplayConfig) -> DeploymentSchedule {
    let mut paths = Vec::with_capacity(plan.len());
    for load in &plan.assignments {
        let d = &config.dispatchers[load.dispatcher as usize - 1];
        let mut legs: Vec<(f64, Point)> = load
            .points
            .iter()
            .map(|p| (euclidean_distance(d.position, p.cell.to_vec3()), *p))
            .collect();
        legs.sort_by(|a, b| {
            b.0.partial_cmp(&a.0)
                .unwrap_or(Ordering::Equal)
                .then_with(|| a.1.cell.cmp(&b.1.cell))
        });
        for (k, (_, p)) in legs.into_iter().enumerate() {
            paths.push(FlightPath::new(
                d.position,
                p,
                k as f64 / config.deploy_rate,
                config.fls_speed,
                PathOrigin::Dispatcher(d.id),
            ));
        }
    }
    DeploymentSchedule { paths }
}

/// Time until the last FLS reaches its cell.
pub fn compute_latency(schedule: &DeploymentSchedule) -> f64 {
    schedule.paths.iter().map(FlightPath::arrival_time).fold(0.0, f64::max)
}

pub fn total_distance(plan: &DeploymentPlan, config: &DisplayConfig) -> f64 {
    plan.assignments
        .iter()
        .map(|load| {
            let pos = config.dispatchers[load.dispatcher as usize - 1].position;
            load.points
                .iter()
                .map(|p| euclidean_distance(pos, p.cell.to_vec3()))
                .fold(0.0, |s, d| s + d)
        })
        .fold(0.0, |s, d| s + d)
}
