//! Flight path intersections and in-flight conflicts.
//!
//! Two paths *intersect* when their segments come within the threshold of
//! each other anywhere. They *conflict* when the two FLSs, each flying at
//! constant speed during `[launch, arrival]`, are within the threshold at the
//! same instant. Both tests are closed form.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::deploy::DeploymentSchedule;
use crate::error::{PlanError, Result};
use crate::model::{FlightPath, Vec3};

/// Above this many paths candidate pairs come from a spatial hash instead of
/// the full pair list.
pub const BROAD_PHASE_MIN_PATHS: usize = 5000;
const HASH_CELL: f64 = 8.0;
/// Lower bound on a resolution delay so zero-length flights still make progress.
const MIN_DELAY: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Intersection {
    pub a: usize,
    pub b: usize,
    /// Midpoint of the closest points of the two segments.
    pub closest: Vec3,
    pub distance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Conflict {
    pub a: usize,
    pub b: usize,
    /// Instant of closest approach.
    pub time: f64,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ConflictReport {
    pub threshold: f64,
    pub intersecting: Vec<Intersection>,
    /// Always a subset of `intersecting`, by pair.
    pub conflicts: Vec<Conflict>,
}

impl ConflictReport {
    pub fn intersection_count(&self) -> usize {
        self.intersecting.len()
    }

    pub fn conflict_count(&self) -> usize {
        self.conflicts.len()
    }
}

/// Parameters `(s, t)` of the closest points on segments `p1 + s d1` and
/// `p2 + t d2`, `s, t` in `[0, 1]`.
pub fn closest_segment_params(p1: Vec3, q1: Vec3, p2: Vec3, q2: Vec3) -> (f64, f64) {
    let d1 = q1 - p1;
    let d2 = q2 - p2;
    let r = p1 - p2;
    let a = d1.norm_sq();
    let e = d2.norm_sq();
    let f = d2.dot(r);
    if a == 0.0 && e == 0.0 {
        return (0.0, 0.0);
    }
    if a == 0.0 {
        return (0.0, (f / e).clamp(0.0, 1.0));
    }
    let c = d1.dot(r);
    if e == 0.0 {
        return ((-c / a).clamp(0.0, 1.0), 0.0);
    }
    let b = d1.dot(d2);
    let denom = a * e - b * b;
    let mut s = if denom > 0.0 {
        ((b * f - c * e) / denom).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let mut t = (b * s + f) / e;
    if t < 0.0 {
        t = 0.0;
        s = (-c / a).clamp(0.0, 1.0);
    } else if t > 1.0 {
        t = 1.0;
        s = ((b - c) / a).clamp(0.0, 1.0);
    }
    (s, t)
}

/// Minimum distance between segments `[p1, q1]` and `[p2, q2]`, with the
/// midpoint of the closest points.
pub fn segment_distance(p1: Vec3, q1: Vec3, p2: Vec3, q2: Vec3) -> (f64, Vec3) {
    let (s, t) = closest_segment_params(p1, q1, p2, q2);
    let c1 = p1 + (q1 - p1) * s;
    let c2 = p2 + (q2 - p2) * t;
    ((c1 - c2).norm(), (c1 + c2) * 0.5)
}

fn point_segment_distance(p: Vec3, a: Vec3, b: Vec3) -> f64 {
    let ab = b - a;
    let len = ab.norm_sq();
    let t = if len == 0.0 {
        0.0
    } else {
        ((p - a).dot(ab) / len).clamp(0.0, 1.0)
    };
    (p - (a + ab * t)).norm()
}

/// Geometric test for one pair. Paths launched from the same point only
/// intersect when they overlap away from it: the shorter path must end
/// within the threshold of the longer one.
pub fn path_intersection(a: &FlightPath, b: &FlightPath, threshold: f64) -> Option<(f64, Vec3)> {
    let (ta, tb) = (a.target(), b.target());
    if a.source == b.source {
        let (short, long) = if a.distance <= b.distance { (a, b) } else { (b, a) };
        let d = point_segment_distance(short.target(), long.source, long.target());
        return (d <= threshold).then(|| (d, short.target()));
    }
    let (d, mid) = segment_distance(a.source, ta, b.source, tb);
    (d <= threshold).then_some((d, mid))
}

fn velocity(p: &FlightPath) -> Vec3 {
    if p.travel_time > 0.0 {
        (p.target() - p.source) * (1.0 / p.travel_time)
    } else {
        Vec3::ZERO
    }
}

/// Position of an FLS at time `t`, clamped to its flight.
pub fn position_at(p: &FlightPath, t: f64) -> Vec3 {
    let dt = (t - p.launch_time).clamp(0.0, p.travel_time);
    p.source + velocity(p) * dt
}

/// Closest approach of two FLSs while both are in flight, as
/// `(time, distance)`. `None` when their flights do not overlap in time.
pub fn closest_approach(a: &FlightPath, b: &FlightPath) -> Option<(f64, f64)> {
    let t0 = a.launch_time.max(b.launch_time);
    let t1 = a.arrival_time().min(b.arrival_time());
    if t0 > t1 {
        return None;
    }
    let r0 = position_at(a, t0) - position_at(b, t0);
    let u = velocity(a) - velocity(b);
    let uu = u.norm_sq();
    let dt = if uu > 0.0 {
        (-r0.dot(u) / uu).clamp(0.0, t1 - t0)
    } else {
        0.0
    };
    Some((t0 + dt, (r0 + u * dt).norm()))
}

/// Candidate pairs `(i, j)` with `i < j`, sorted. Small inputs get every
/// pair. Larger ones use two spatial hashes: segments against segments from
/// other launch points, and segments against the targets of shorter paths
/// from the same launch point, since those fan out from one spot and would
/// otherwise all share its bucket.
fn candidate_pairs(paths: &[FlightPath], threshold: f64) -> Vec<(usize, usize)> {
    let m = paths.len();
    if m <= BROAD_PHASE_MIN_PATHS {
        return (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
    }
    let mut sources: HashMap<[u64; 3], u32> = HashMap::new();
    let group: Vec<u32> = paths
        .iter()
        .map(|p| {
            let key = [p.source.x.to_bits(), p.source.y.to_bits(), p.source.z.to_bits()];
            let next = sources.len() as u32;
            *sources.entry(key).or_insert(next)
        })
        .collect();

    let coarse: Vec<Vec<HashCell>> = paths.par_iter().map(|p| hash_cells(p, threshold, HASH_CELL)).collect();
    let mut segments: HashMap<HashCell, Vec<(u32, Vec<usize>)>> = HashMap::new();
    for (i, cs) in coarse.iter().enumerate() {
        for &c in cs {
            let runs = segments.entry(c).or_default();
            match runs.iter_mut().find(|(g, _)| *g == group[i]) {
                Some((_, v)) => v.push(i),
                None => runs.push((group[i], vec![i])),
            }
        }
    }
    let mut targets: HashMap<(u32, HashCell), Vec<usize>> = HashMap::new();
    for (i, p) in paths.iter().enumerate() {
        targets.entry((group[i], cell_of(p.target(), 1.0))).or_default().push(i);
    }
    let longer = |a: usize, b: usize| (paths[a].distance, a) > (paths[b].distance, b);

    let mut pairs: Vec<(usize, usize)> = (0..m)
        .into_par_iter()
        .flat_map_iter(|i| {
            let mut js: Vec<usize> = coarse[i]
                .iter()
                .flat_map(|c| segments[c].iter())
                .filter(|(g, _)| *g != group[i])
                .flat_map(|(_, v)| v.iter().copied().filter(|&j| j > i))
                .collect();
            for c in hash_cells(&paths[i], threshold, 1.0) {
                if let Some(v) = targets.get(&(group[i], c)) {
                    js.extend(v.iter().copied().filter(|&j| longer(i, j)));
                }
            }
            js.into_iter().map(move |j| (i.min(j), i.max(j)))
        })
        .collect();
    pairs.par_sort_unstable();
    pairs.dedup();
    pairs
}

type HashCell = (i64, i64, i64);

fn cell_of(p: Vec3, size: f64) -> HashCell {
    ((p.x / size).floor() as i64, (p.y / size).floor() as i64, (p.z / size).floor() as i64)
}

/// Hash cells covered by the path, inflated by the threshold. The segment is
/// cut into pieces no longer than a hash cell before taking bounding boxes.
fn hash_cells(p: &FlightPath, threshold: f64, size: f64) -> Vec<HashCell> {
    let (src, dst) = (p.source, p.target());
    let pieces = ((dst - src).norm() / size).ceil().max(1.0) as usize;
    let mut out = Vec::new();
    for k in 0..pieces {
        let a = src + (dst - src) * (k as f64 / pieces as f64);
        let b = src + (dst - src) * ((k + 1) as f64 / pieces as f64);
        let lo = |u: f64, v: f64| ((u.min(v) - threshold) / size).floor() as i64;
        let hi = |u: f64, v: f64| ((u.max(v) + threshold) / size).floor() as i64;
        for x in lo(a.x, b.x)..=hi(a.x, b.x) {
            for y in lo(a.y, b.y)..=hi(a.y, b.y) {
                for z in lo(a.z, b.z)..=hi(a.z, b.z) {
                    out.push((x, y, z));
                }
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// All path pairs whose segments come within `threshold`, sorted by pair.
pub fn intersections_among(paths: &[FlightPath], threshold: f64) -> Vec<Intersection> {
    candidate_pairs(paths, threshold)
        .par_iter()
        .filter_map(|&(a, b)| {
            path_intersection(&paths[a], &paths[b], threshold).map(|(distance, closest)| Intersection {
                a,
                b,
                closest,
                distance,
            })
        })
        .collect()
}

pub fn conflicts_among(paths: &[FlightPath], threshold: f64) -> ConflictReport {
    let intersecting = intersections_among(paths, threshold);
    let conflicts = intersecting
        .iter()
        .filter_map(|x| {
            let (time, distance) = closest_approach(&paths[x.a], &paths[x.b])?;
            (distance <= threshold).then_some(Conflict {
                a: x.a,
                b: x.b,
                time,
                distance,
            })
        })
        .collect();
    ConflictReport {
        threshold,
        intersecting,
        conflicts,
    }
}

/// Geometric part only; `conflicts` is left empty.
pub fn detect_intersections(schedule: &DeploymentSchedule, threshold: f64) -> ConflictReport {
    ConflictReport {
        threshold,
        intersecting: intersections_among(&schedule.paths, threshold),
        conflicts: Vec::new(),
    }
}

pub fn detect_conflicts(schedule: &DeploymentSchedule, threshold: f64) -> ConflictReport {
    conflicts_among(&schedule.paths, threshold)
}

/// Delays the later FLS of each conflict, together with every later launch
/// of its dispatcher, by the travel time of the other FLS. Repeats until no
/// conflict remains, for at most one round per path.
pub fn resolve_by_delay(schedule: &DeploymentSchedule, report: &ConflictReport) -> Result<DeploymentSchedule> {
    let mut paths = schedule.paths.clone();
    let threshold = report.threshold;
    let mut conflicts = report.conflicts.clone();
    let max_rounds = paths.len().max(1);
    for _ in 0..max_rounds {
        if conflicts.is_empty() {
            return Ok(DeploymentSchedule { paths });
        }
        // (dispatcher, delayed path, launch time it shifts from, delay)
        let mut shifts: Vec<(Option<u32>, usize, f64, f64)> = Vec::new();
        for c in &conflicts {
            let (pa, pb) = (&paths[c.a], &paths[c.b]);
            let (early, late) = if (pb.launch_time, c.b) > (pa.launch_time, c.a) {
                (c.a, c.b)
            } else {
                (c.b, c.a)
            };
            let group = paths[late].dispatcher();
            let taken = shifts.iter().any(|s| match (s.0, group) {
                (Some(g), Some(h)) => g == h,
                _ => s.1 == late,
            });
            if taken {
                continue;
            }
            let delay = paths[early].travel_time.max(MIN_DELAY);
            shifts.push((group, late, paths[late].launch_time, delay));
        }
        for (group, idx, from, delay) in shifts {
            match group {
                Some(g) => {
                    for p in paths.iter_mut().filter(|p| p.dispatcher() == Some(g) && p.launch_time >= from) {
                        p.launch_time += delay;
                    }
                }
                None => paths[idx].launch_time += delay,
            }
        }
        conflicts = conflicts_among(&paths, threshold).conflicts;
    }
    if conflicts.is_empty() {
        Ok(DeploymentSchedule { paths })
    } else {
        Err(PlanError::ResolutionDiverged {
            rounds: max_rounds,
            remaining: conflicts.len(),
        })
    }
}
