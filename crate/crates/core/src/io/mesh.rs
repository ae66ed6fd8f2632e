//! Turning a triangle mesh into a display-sized point cloud.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{PlanError, Result};
use crate::model::{Cell, Dims, Point, PointCloud};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Mesh {
    pub vertices: Vec<[f64; 3]>,
    /// Polygons as vertex indices; polygons with more than three corners are
    /// fanned into triangles when sampling.
    pub faces: Vec<Vec<usize>>,
}

impl Mesh {
    pub fn new(vertices: Vec<[f64; 3]>, faces: Vec<Vec<usize>>) -> Result<Self> {
        for (f, face) in faces.iter().enumerate() {
            if let Some(&v) = face.iter().find(|&&v| v >= vertices.len()) {
                return Err(PlanError::BadFace {
                    face: f,
                    vertex: v,
                    count: vertices.len(),
                });
            }
        }
        Ok(Mesh { vertices, faces })
    }

    fn triangles(&self) -> impl Iterator<Item = [[f64; 3]; 3]> + '_ {
        self.faces.iter().filter(|f| f.len() >= 3).flat_map(move |f| {
            (1..f.len() - 1).map(move |k| [self.vertices[f[0]], self.vertices[f[k]], self.vertices[f[k + 1]]])
        })
    }
}

fn area(t: &[[f64; 3]; 3]) -> f64 {
    let u = [t[1][0] - t[0][0], t[1][1] - t[0][1], t[1][2] - t[0][2]];
    let v = [t[2][0] - t[0][0], t[2][1] - t[0][1], t[2][2] - t[0][2]];
    let c = [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
    0.5 * (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt()
}

/// Scales the mesh's bounding box into `dims` (same factor on every axis,
/// largest that fits) and floors to cells. When the mesh has fewer than
/// `density` vertices, the rest are sampled uniformly over the surface with
/// a ChaCha8 stream seeded by `seed`. Points landing in the same cell are
/// merged, first one wins.
pub fn sample_mesh_to_cloud(mesh: &Mesh, dims: Dims, density: usize, seed: u64) -> Result<PointCloud> {
    if mesh.faces.is_empty() || mesh.vertices.is_empty() {
        return Err(PlanError::EmptyMesh);
    }
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for v in &mesh.vertices {
        for a in 0..3 {
            lo[a] = lo[a].min(v[a]);
            hi[a] = hi[a].max(v[a]);
        }
    }
    let scale = (0..3)
        .filter(|&a| hi[a] > lo[a])
        .map(|a| f64::from(dims.axis(a).saturating_sub(1)) / (hi[a] - lo[a]))
        .fold(f64::INFINITY, f64::min);
    let scale = if scale.is_finite() { scale } else { 0.0 };
    let quantize = |v: [f64; 3]| {
        let q = |a: usize| {
            let x = ((v[a] - lo[a]) * scale + 1e-9).floor();
            x.clamp(0.0, f64::from(dims.axis(a).saturating_sub(1))) as u32
        };
        Cell::new(q(0), q(1), q(2))
    };

    let mut seen = HashSet::new();
    let mut points = Vec::new();
    let mut push = |c: Cell| {
        if seen.insert(c) {
            points.push(Point::new(c, crate::model::Rgb::WHITE));
        }
    };
    for &v in &mesh.vertices {
        push(quantize(v));
    }

    let extra = density.saturating_sub(mesh.vertices.len());
    if extra > 0 {
        let tris: Vec<[[f64; 3]; 3]> = mesh.triangles().collect();
        let mut cumulative = Vec::with_capacity(tris.len());
        let mut total = 0.0;
        for t in &tris {
            total += area(t);
            cumulative.push(total);
        }
        if total > 0.0 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..extra {
                let pick = rng.random::<f64>() * total;
                let k = cumulative.partition_point(|&c| c <= pick).min(tris.len() - 1);
                let t = &tris[k];
                let (r1, r2): (f64, f64) = (rng.random(), rng.random());
                let s = r1.sqrt();
                let (a, b, c) = (1.0 - s, s * (1.0 - r2), s * r2);
                let p = [0, 1, 2].map(|i| a * t[0][i] + b * t[1][i] + c * t[2][i]);
                push(quantize(p));
            }
        }
    }
    PointCloud::new(points)
}
