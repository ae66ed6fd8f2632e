use std::path::PathBuf;

use thiserror::Error;

use crate::model::Cell;

pub type Result<T, E = PlanError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("point cloud is empty")]
    EmptyCloud,

    #[error("duplicate coordinate {0} in point cloud")]
    DuplicateCell(Cell),

    #[error("cell {cell} lies outside the {dims} display")]
    OutOfBounds { cell: Cell, dims: String },

    #[error("invalid display configuration: {0}")]
    InvalidConfig(String),

    #[error("scene contains no point clouds")]
    EmptyScene,

    #[error("no dispatchers configured")]
    NoDispatchers,

    #[error("insufficient FLS inventory: {required} points but only {available} FLSs available")]
    InsufficientInventory { required: usize, available: u64 },

    #[error("fresh deploy to {0} requested but every dispatcher inventory is exhausted")]
    InventoryExhausted(Cell),

    #[error("{}: line {line}: {message}", path.as_ref().map(|p| p.display().to_string()).unwrap_or_else(|| "<input>".into()))]
    Parse {
        path: Option<PathBuf>,
        line: usize,
        message: String,
    },

    #[error("mesh has no faces")]
    EmptyMesh,

    #[error("face {face} references vertex {vertex} but the mesh has {count} vertices")]
    BadFace { face: usize, vertex: usize, count: usize },

    #[error("invalid scene manifest: {0}")]
    Manifest(String),

    #[error("cuboid {cuboid} holds {count} points that cannot be separated along any axis")]
    UnsplittableCuboid { cuboid: usize, count: usize },

    #[error("cannot fuse encodings: {0}")]
    BoundaryMismatch(String),

    #[error("replay diverged at cloud {cloud}{}: {message}", cell.map(|c| format!(" cell {c}")).unwrap_or_default())]
    Replay {
        cloud: usize,
        cell: Option<Cell>,
        message: String,
    },

    #[error("matching instance is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("instance of size {len} exceeds the exhaustive limit of {max}")]
    TooLarge { len: usize, max: usize },

    #[error("conflict resolution did not converge after {rounds} rounds ({remaining} conflicts left)")]
    ResolutionDiverged { rounds: usize, remaining: usize },

    #[error("cannot read {}: {source}", path.display())]
    Read { path: PathBuf, source: std::io::Error },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl PlanError {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        PlanError::Parse {
            path: None,
            line,
            message: message.into(),
        }
    }

    pub(crate) fn with_path(self, p: impl Into<PathBuf>) -> Self {
        match self {
            PlanError::Parse { line, message, .. } => PlanError::Parse {
                path: Some(p.into()),
                line,
                message,
            },
            other => other,
        }
    }

    /// True for errors caused by a well-formed request that cannot be
    /// satisfied with the configured dispatchers.
    pub fn is_infeasible(&self) -> bool {
        matches!(
            self,
            PlanError::InsufficientInventory { .. }
                | PlanError::InventoryExhausted(_)
                | PlanError::NoDispatchers
                | PlanError::ResolutionDiverged { .. }
                | PlanError::UnsplittableCuboid { .. }
        )
    }
}
