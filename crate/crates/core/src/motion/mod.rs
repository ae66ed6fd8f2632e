//! Motion illuminations: turning a scene of point clouds into per-transition
//! flight plans.

pub mod diff;
pub mod encode;
pub mod greedy;
pub mod grid;
pub mod motill;
pub mod replay;
pub mod step2;

pub use diff::{diff_clouds, diff_points, CloudDiff};
pub use encode::{encode_gpcs, encode_scene, fuse_gpcs, split_gpcs, with_workers, EncodeOutput, GpcConfig, SceneEncoding, TransitionMetrics};
pub use greedy::{greedy_match, GreedyMatch};
pub use grid::{are_neighbors, build_grid, populate_grid, Cuboid, Grid, Occupancy, Theta};
pub use motill::{motill_transition, simple_transition, TransitionDraft, Variant};
pub use replay::{check_conservation, final_points, verify_replay, Replayer};
pub use step2::{step2_resolve, Step2Outcome};
