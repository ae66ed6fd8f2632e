//! Scene manifests, dispatcher layouts and serialized encodings.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{PlanError, Result};
use crate::model::{Dispatcher, Inventory, Scene, Vec3};
use crate::motion::SceneEncoding;

/// `{"clouds": [...], "frame_rate": r, "gpc_size": w}`. Cloud paths are
/// relative to the manifest's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneManifest {
    pub clouds: Vec<PathBuf>,
    pub frame_rate: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gpc_size: Option<usize>,
}

impl SceneManifest {
    /// Parses and checks the document itself; file existence is checked by
    /// [`load_manifest`].
    pub fn parse(text: &str) -> Result<Self> {
        let m: SceneManifest = serde_json::from_str(text).map_err(|e| PlanError::Manifest(e.to_string()))?;
        if m.clouds.is_empty() {
            return Err(PlanError::Manifest("no clouds listed".into()));
        }
        if !(m.frame_rate.is_finite() && m.frame_rate > 0.0) {
            return Err(PlanError::Manifest(format!("frame rate {} is not positive", m.frame_rate)));
        }
        if m.gpc_size == Some(0) {
            return Err(PlanError::Manifest("gpc_size must be positive".into()));
        }
        Ok(m)
    }
}

pub fn load_manifest(path: &Path) -> Result<SceneManifest> {
    let mut m = SceneManifest::parse(&super::read_text(path)?)?;
    let base = path.parent().unwrap_or(Path::new(""));
    for c in &mut m.clouds {
        if c.is_relative() {
            *c = base.join(&*c);
        }
        if !c.is_file() {
            return Err(PlanError::Manifest(format!("cloud file {} does not exist", c.display())));
        }
    }
    Ok(m)
}

/// Loads every cloud of the manifest, concurrently.
pub fn load_scene(manifest: &SceneManifest) -> Result<Scene> {
    let clouds = manifest
        .clouds
        .par_iter()
        .map(|p| super::load_cloud(p))
        .collect::<Result<Vec<_>>>()?;
    Scene::new(clouds, manifest.frame_rate)
}

/// One dispatcher per line: `x y z` or `x y z inventory`. Ids follow line
/// order starting at 1.
pub fn parse_dispatchers(text: &str) -> Result<Vec<Dispatcher>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        let f: Vec<&str> = raw.split('#').next().unwrap_or_default().split_whitespace().collect();
        if f.is_empty() {
            continue;
        }
        if f.len() != 3 && f.len() != 4 {
            return Err(PlanError::parse(n, "expected x y z [inventory]"));
        }
        let num = |s: &str| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| PlanError::parse(n, format!("bad coordinate {s:?}")))
        };
        let inventory = match f.get(3) {
            Some(s) => Inventory::Finite(s.parse().map_err(|_| PlanError::parse(n, format!("bad inventory {s:?}")))?),
            None => Inventory::Unbounded,
        };
        out.push(Dispatcher {
            id: out.len() as u32 + 1,
            position: Vec3::new(num(f[0])?, num(f[1])?, num(f[2])?),
            inventory,
        });
    }
    if out.is_empty() {
        return Err(PlanError::NoDispatchers);
    }
    Ok(out)
}

pub fn write_encoding<W: std::io::Write>(encoding: &SceneEncoding, mut w: W) -> Result<()> {
    serde_json::to_writer(&mut w, encoding)?;
    writeln!(w)?;
    Ok(())
}

pub fn parse_encoding(text: &str) -> Result<SceneEncoding> {
    Ok(serde_json::from_str(text)?)
}
