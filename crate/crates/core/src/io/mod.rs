//! Reading clouds, meshes and scenes; writing metrics and encodings.

mod mesh;
mod off;
mod ply;
mod report;
mod scene;
mod xyz;

use std::path::Path;

pub use mesh::{sample_mesh_to_cloud, Mesh};
pub use off::parse_off;
pub use ply::{parse_ply, parse_ply_cloud, parse_ply_mesh, write_ply_cloud, PlyData};
pub use report::{read_metrics_json, write_metrics, write_series, Format, MetricsReport, CSV_HEADER};
pub use scene::{load_manifest, load_scene, parse_dispatchers, parse_encoding, write_encoding, SceneManifest};
pub use xyz::{parse_xyz, write_xyz};

use crate::error::Result;
use crate::model::PointCloud;

/// Reads a whole file, naming it in the error.
pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| crate::PlanError::Read {
        path: path.to_path_buf(),
        source,
    })
}

fn extension(path: &Path) -> String {
    path.extension()
        .and_then(|e| e.to_str())
        .unwrap_or_default()
        .to_ascii_lowercase()
}

/// `.ply` files are read as ASCII PLY, anything else as xyz text.
pub fn load_cloud(path: &Path) -> Result<PointCloud> {
    let text = read_text(path)?;
    let parsed = match extension(path).as_str() {
        "ply" => parse_ply_cloud(&text),
        _ => parse_xyz(&text),
    };
    parsed.map_err(|e| e.with_path(path))
}

/// `.off` or `.ply` meshes.
pub fn load_mesh(path: &Path) -> Result<Mesh> {
    let text = read_text(path)?;
    let parsed = match extension(path).as_str() {
        "off" => parse_off(&text),
        _ => parse_ply_mesh(&text),
    };
    parsed.map_err(|e| e.with_path(path))
}

pub fn load_dispatchers(path: &Path) -> Result<Vec<crate::model::Dispatcher>> {
    parse_dispatchers(&read_text(path)?).map_err(|e| e.with_path(path))
}
