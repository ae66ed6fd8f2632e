//! Domain types shared by the planners: display cells, colored points,
//! point clouds, dispatchers and the display configuration, plus the flight
//! and color-change records every plan is made of.

use std::collections::HashSet;
use std::fmt;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{PlanError, Result};

/// Integer address of a display cell. Ordering is lexicographic on `(x, y, z)`.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default,
)]
pub struct Cell {
    pub x: u32,
    pub y: u32,
    pub z: u32,
}

impl Cell {
    pub const fn new(x: u32, y: u32, z: u32) -> Self {
        Cell { x, y, z }
    }

    pub fn axis(&self, axis: usize) -> u32 {
        match axis {
            0 => self.x,
            1 => self.y,
            _ => self.z,
        }
    }

    /// Exact squared distance; every ordering of cell pairs goes through this.
    pub fn sq_dist(&self, other: &Cell) -> u64 {
        let dx = self.x.abs_diff(other.x) as u64;
        let dy = self.y.abs_diff(other.y) as u64;
        let dz = self.z.abs_diff(other.z) as u64;
        dx * dx + dy * dy + dz * dz
    }

    pub fn distance(&self, other: &Cell) -> f64 {
        (self.sq_dist(other) as f64).sqrt()
    }

    pub fn to_vec3(self) -> Vec3 {
        Vec3::new(self.x as f64, self.y as f64, self.z as f64)
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct Rgb(pub [u8; 3]);

impl Rgb {
    pub const WHITE: Rgb = Rgb([255, 255, 255]);

    pub const fn new(r: u8, g: u8, b: u8) -> Self {
        Rgb([r, g, b])
    }
}

/// A colored display cell: the unit of illumination.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Point {
    pub cell: Cell,
    pub color: Rgb,
}

impl Point {
    pub const fn new(cell: Cell, color: Rgb) -> Self {
        Point { cell, color }
    }

    pub const fn white(x: u32, y: u32, z: u32) -> Self {
        Point {
            cell: Cell::new(x, y, z),
            color: Rgb::WHITE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, k: f64) -> Vec3 {
        Vec3::new(self.x * k, self.y * k, self.z * k)
    }
}

impl From<Cell> for Vec3 {
    fn from(c: Cell) -> Self {
        c.to_vec3()
    }
}

/// Straight-line distance in cells.
pub fn euclidean_distance(a: Vec3, b: Vec3) -> f64 {
    (a - b).norm()
}

/// A point cloud with unique coordinates and at least one point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct PointCloud {
    points: Vec<Point>,
}

impl PointCloud {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(PlanError::EmptyCloud);
        }
        let mut seen = HashSet::with_capacity(points.len());
        for p in &points {
            if !seen.insert(p.cell) {
                return Err(PlanError::DuplicateCell(p.cell));
            }
        }
        Ok(PointCloud { points })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Point> {
        self.points.iter()
    }

    pub fn into_points(self) -> Vec<Point> {
        self.points
    }

    pub fn check_within(&self, dims: Dims) -> Result<()> {
        match self.points.iter().find(|p| !dims.contains(p.cell)) {
            Some(p) => Err(PlanError::OutOfBounds {
                cell: p.cell,
                dims: dims.to_string(),
            }),
            None => Ok(()),
        }
    }
}

impl<'de> Deserialize<'de> for PointCloud {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let points = Vec::<Point>::deserialize(d)?;
        PointCloud::new(points).map_err(serde::de::Error::custom)
    }
}

impl<'a> IntoIterator for &'a PointCloud {
    type Item = &'a Point;
    type IntoIter = std::slice::Iter<'a, Point>;
    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}

/// An ordered sequence of clouds shown at `frame_rate` clouds per second.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub clouds: Vec<PointCloud>,
    pub frame_rate: f64,
}

impl Scene {
    pub fn new(clouds: Vec<PointCloud>, frame_rate: f64) -> Result<Self> {
        if clouds.is_empty() {
            return Err(PlanError::EmptyScene);
        }
        if !(frame_rate.is_finite() && frame_rate > 0.0) {
            return Err(PlanError::InvalidConfig(format!(
                "frame rate must be positive, got {frame_rate}"
            )));
        }
        Ok(Scene { clouds, frame_rate })
    }

    pub fn len(&self) -> usize {
        self.clouds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clouds.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Inventory {
    Unbounded,
    Finite(u64),
}

impl Inventory {
    pub fn limit(self) -> Option<u64> {
        match self {
            Inventory::Unbounded => None,
            Inventory::Finite(n) => Some(n),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dispatcher {
    pub id: u32,
    pub position: Vec3,
    pub inventory: Inventory,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dims {
    pub l: u32,
    pub h: u32,
    pub d: u32,
}

impl Dims {
    pub const fn new(l: u32, h: u32, d: u32) -> Self {
        Dims { l, h, d }
    }

    pub fn axis(&self, axis: usize) -> u32 {
        match axis {
            0 => self.l,
            1 => self.h,
            _ => self.d,
        }
    }

    pub fn contains(&self, c: Cell) -> bool {
        c.x < self.l && c.y < self.h && c.z < self.d
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}", self.l, self.h, self.d)
    }
}

/// Dispatchers on the eight corners of the display volume. Ids follow the
/// bit pattern `1 + x + 2y + 4z` where each bit selects the far face.
pub fn corners8(dims: Dims, inventory: Inventory) -> Vec<Dispatcher> {
    (0..8u32)
        .map(|bits| Dispatcher {
            id: bits + 1,
            position: corner(dims, bits),
            inventory,
        })
        .collect()
}

/// The four corners on the `y = 0` face.
pub fn corners4_bottom(dims: Dims, inventory: Inventory) -> Vec<Dispatcher> {
    [0u32, 1, 4, 5]
        .iter()
        .enumerate()
        .map(|(i, &bits)| Dispatcher {
            id: i as u32 + 1,
            position: corner(dims, bits),
            inventory,
        })
        .collect()
}

fn corner(dims: Dims, bits: u32) -> Vec3 {
    let pick = |bit: u32, extent: u32| if bits & bit != 0 { extent as f64 } else { 0.0 };
    Vec3::new(pick(1, dims.l), pick(2, dims.h), pick(4, dims.d))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisplayConfig {
    pub dims: Dims,
    pub dispatchers: Vec<Dispatcher>,
    /// FLSs each dispatcher launches per second.
    pub deploy_rate: f64,
    /// Cells per second.
    pub fls_speed: f64,
    /// Cells.
    pub conflict_threshold: f64,
}

impl DisplayConfig {
    pub const DEFAULT_THRESHOLD: f64 = 0.2;

    pub fn new(
        dims: Dims,
        dispatchers: Vec<Dispatcher>,
        deploy_rate: f64,
        fls_speed: f64,
        conflict_threshold: f64,
    ) -> Result<Self> {
        let cfg = DisplayConfig {
            dims,
            dispatchers,
            deploy_rate,
            fls_speed,
            conflict_threshold,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// 100 cells per side, a dispatcher on every corner, 10 launches per
    /// second and 4 cells per second.
    pub fn reference() -> Self {
        let dims = Dims::new(100, 100, 100);
        DisplayConfig {
            dims,
            dispatchers: corners8(dims, Inventory::Unbounded),
            deploy_rate: 10.0,
            fls_speed: 4.0,
            conflict_threshold: Self::DEFAULT_THRESHOLD,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dims.l == 0 || self.dims.h == 0 || self.dims.d == 0 {
            return Err(PlanError::InvalidConfig(format!(
                "display dimensions must be positive, got {}",
                self.dims
            )));
        }
        if self.dispatchers.is_empty() {
            return Err(PlanError::NoDispatchers);
        }
        for (i, d) in self.dispatchers.iter().enumerate() {
            if d.id as usize != i + 1 {
                return Err(PlanError::InvalidConfig(format!(
                    "dispatcher ids must be dense 1..={}, found {} at position {}",
                    self.dispatchers.len(),
                    d.id,
                    i + 1
                )));
            }
        }
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.deploy_rate) {
            return Err(PlanError::InvalidConfig("deploy rate must be positive".into()));
        }
        if !positive(self.fls_speed) {
            return Err(PlanError::InvalidConfig("FLS speed must be positive".into()));
        }
        if !positive(self.conflict_threshold) {
            return Err(PlanError::InvalidConfig(
                "conflict threshold must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn psi(&self) -> usize {
        self.dispatchers.len()
    }

    /// Sum of finite inventories, or `None` when any dispatcher is unbounded.
    pub fn total_inventory(&self) -> Option<u64> {
        self.dispatchers
            .iter()
            .map(|d| d.inventory.limit())
            .sum::<Option<u64>>()
    }

    /// Index (not id) of the nearest dispatcher; ties go to the lowest id.
    pub fn nearest_dispatcher(&self, target: Vec3) -> usize {
        nearest_by(&self.dispatchers, target, |_| true).expect("config has dispatchers")
    }
}

/// Index of the nearest dispatcher accepted by `allow`, comparing squared
/// distances with a strict `<` so the lowest index wins ties.
pub(crate) fn nearest_by(
    dispatchers: &[Dispatcher],
    target: Vec3,
    mut allow: impl FnMut(usize) -> bool,
) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (j, d) in dispatchers.iter().enumerate() {
        if !allow(j) {
            continue;
        }
        let sq = (d.position - target).norm_sq();
        if best.is_none_or(|(_, b)| sq < b) {
            best = Some((j, sq));
        }
    }
    best.map(|(j, _)| j)
}

/// Where an FLS starts a flight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathOrigin {
    /// Launched from the dispatcher with this id.
    Dispatcher(u32),
    /// An FLS that was lit in the previous cloud.
    Lit,
    /// A dark FLS parked in the display by an earlier transition.
    Dark,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlightPath {
    #[serde(rename = "src")]
    pub source: Vec3,
    #[serde(rename = "dst")]
    pub destination: Point,
    #[serde(rename = "launch")]
    pub launch_time: f64,
    pub distance: f64,
    pub travel_time: f64,
    pub origin: PathOrigin,
}

impl FlightPath {
    pub fn new(source: Vec3, destination: Point, launch_time: f64, speed: f64, origin: PathOrigin) -> Self {
        let distance = euclidean_distance(source, destination.cell.to_vec3());
        FlightPath {
            source,
            destination,
            launch_time,
            distance,
            travel_time: distance / speed,
            origin,
        }
    }

    pub fn arrival_time(&self) -> f64 {
        self.launch_time + self.travel_time
    }

    pub fn dispatcher(&self) -> Option<u32> {
        match self.origin {
            PathOrigin::Dispatcher(id) => Some(id),
            _ => None,
        }
    }

    pub fn target(&self) -> Vec3 {
        self.destination.cell.to_vec3()
    }

    /// Source as a display cell, for paths that start inside the display.
    pub fn source_cell(&self) -> Option<Cell> {
        let s = self.source;
        let whole = |v: f64| v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64;
        (whole(s.x) && whole(s.y) && whole(s.z)).then(|| Cell::new(s.x as u32, s.y as u32, s.z as u32))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ColorChange {
    pub cell: Cell,
    pub from: Rgb,
    pub to: Rgb,
}

/// An FLS leaving the display for the charging station co-located with a
/// dispatcher.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Recall {
    pub point: Point,
    pub station: u32,
    pub distance: f64,
}

/// A new FLS launched mid-scene to fill a point no existing FLS covers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreshDeploy {
    pub dispatcher: u32,
    pub point: Point,
    pub distance: f64,
}

/// Everything needed to move the display from cloud `i` to cloud `i + 1`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TransitionPlan {
    /// Flights: lit FLSs of cloud `i`, or parked dark FLSs, moving to a cell
    /// of cloud `i + 1`.
    pub epsilon: Vec<FlightPath>,
    /// FLSs that stay in place and switch color.
    pub gamma: Vec<ColorChange>,
    /// Freed FLSs left over once local flights were matched.
    pub delta: Vec<Point>,
    /// Cells of cloud `i + 1` still vacant once local flights were matched.
    pub mu: Vec<Point>,
    pub recalls: Vec<Recall>,
    pub fresh_deploys: Vec<FreshDeploy>,
    /// Lit FLSs of cloud `i` that go dark in place, to be flown to a later
    /// cloud by a subsequent transition.
    pub parked: Vec<Cell>,
    /// FLSs that stay in place with the same color.
    pub unchanged: usize,
}

impl TransitionPlan {
    pub fn total_distance(&self) -> f64 {
        self.epsilon.iter().map(|p| p.distance).fold(0.0, |s, d| s + d)
            + self.recalls.iter().map(|r| r.distance).fold(0.0, |s, d| s + d)
            + self.fresh_deploys.iter().map(|f| f.distance).fold(0.0, |s, d| s + d)
    }

    pub fn lit_departures(&self) -> usize {
        self.epsilon.iter().filter(|p| p.origin != PathOrigin::Dark).count()
            + self.recalls.len()
            + self.parked.len()
    }

    pub fn arrivals(&self) -> usize {
        self.epsilon.len() + self.fresh_deploys.len()
    }

    pub fn stays(&self) -> usize {
        self.unchanged + self.gamma.len()
    }

    pub fn is_identity(&self) -> bool {
        self.epsilon.is_empty()
            && self.gamma.is_empty()
            && self.recalls.is_empty()
            && self.fresh_deploys.is_empty()
            && self.parked.is_empty()
    }
}
