use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use flsplan::deploy::Algorithm;
use flsplan::io::Format;
use flsplan::model::{corners4_bottom, corners8, Dims, DisplayConfig, Inventory};
use flsplan::motion::Variant;
use flsplan::{PlanError, Result};

#[derive(Debug, Parser)]
#[command(name = "flsplan", version, about = "Plan FLS deployments and motion encodings for a drone display")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Assign a cloud to dispatchers and report latency, distance and conflicts.
    Deploy(DeployArgs),
    /// Encode a scene of point clouds into per-transition flight plans.
    Encode(EncodeArgs),
    /// Replay an encoding against its scene.
    Verify(VerifyArgs),
    /// List intersecting and conflicting flight paths of a deployment.
    Conflicts(ConflictArgs),
}

#[derive(Debug, Args)]
pub struct DisplayArgs {
    /// Display size in cells.
    #[arg(long, value_parser = parse_dims, default_value = "100,100,100")]
    pub dims: Dims,
    /// `corners8`, `corners4-bottom`, or a file of `x y z [inventory]` lines.
    #[arg(long, default_value = "corners8")]
    pub dispatchers: String,
    /// FLSs stocked per dispatcher for the corner layouts (unbounded if unset).
    #[arg(long)]
    pub inventory: Option<u64>,
    /// FLSs launched per second by each dispatcher.
    #[arg(long, default_value_t = 10.0)]
    pub rate: f64,
    /// FLS speed in cells per second.
    #[arg(long, default_value_t = 4.0)]
    pub speed: f64,
    /// Distance in cells under which two FLSs conflict.
    #[arg(long, default_value_t = DisplayConfig::DEFAULT_THRESHOLD)]
    pub threshold: f64,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

impl DisplayArgs {
    pub fn config(&self) -> Result<DisplayConfig> {
        let inv = self.inventory.map_or(Inventory::Unbounded, Inventory::Finite);
        let dispatchers = match self.dispatchers.as_str() {
            "corners8" => corners8(self.dims, inv),
            "corners4-bottom" => corners4_bottom(self.dims, inv),
            path => flsplan::io::load_dispatchers(path.as_ref())?,
        };
        DisplayConfig::new(self.dims, dispatchers, self.rate, self.speed, self.threshold)
    }
}

#[derive(Debug, Args)]
pub struct CloudInput {
    /// Point cloud (`.xyz` text or ASCII `.ply`), or a mesh with `--mesh`.
    pub cloud: PathBuf,
    /// Treat the input as a mesh (`.off` or `.ply`) and sample it into the display.
    #[arg(long)]
    pub mesh: bool,
    /// Points to sample from the mesh surface when it has fewer vertices.
    #[arg(long, default_value_t = 0)]
    pub density: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgoChoice {
    Mindist,
    Quota,
    Both,
}

impl AlgoChoice {
    pub fn algorithms(self) -> Vec<Algorithm> {
        match self {
            AlgoChoice::Mindist => vec![Algorithm::MinDist],
            AlgoChoice::Quota => vec![Algorithm::QuotaBalanced],
            AlgoChoice::Both => vec![Algorithm::MinDist, Algorithm::QuotaBalanced],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatChoice {
    Csv,
    Json,
}

impl From<FormatChoice> for Format {
    fn from(f: FormatChoice) -> Self {
        match f {
            FormatChoice::Csv => Format::Csv,
            FormatChoice::Json => Format::Json,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantChoice {
    Simple,
    Icf,
    Icl,
}

impl From<VariantChoice> for Variant {
    fn from(v: VariantChoice) -> Self {
        match v {
            VariantChoice::Simple => Variant::Simple,
            VariantChoice::Icf => Variant::Icf,
            VariantChoice::Icl => Variant::Icl,
        }
    }
}

#[derive(Debug, Args)]
pub struct DeployArgs {
    #[command(flatten)]
    pub input: CloudInput,
    #[command(flatten)]
    pub display: DisplayArgs,
    #[arg(long, value_enum, default_value = "both")]
    pub algo: AlgoChoice,
    /// Delay conflicting launches until no conflicts remain.
    #[arg(long)]
    pub resolve: bool,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatChoice,
    /// Also write metrics and schedules into this directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    /// Scene manifest (JSON).
    pub manifest: PathBuf,
    #[command(flatten)]
    pub display: DisplayArgs,
    /// Static algorithm for the first cloud.
    #[arg(long, value_enum, default_value = "mindist")]
    pub algo: AlgoChoice,
    #[arg(long, value_enum, default_value = "simple")]
    pub variant: VariantChoice,
    /// Cuboid capacity, or `inf`.
    #[arg(long, value_parser = parse_theta, default_value = "inf")]
    pub theta: Capacity,
    /// Clouds per GPC; overrides the manifest's `gpc_size`.
    #[arg(long)]
    pub omega: Option<usize>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatChoice,
    /// Output directory for the encoding and the per-transition series.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub encoding: PathBuf,
    pub manifest: PathBuf,
}

#[derive(Debug, Args)]
pub struct ConflictArgs {
    #[command(flatten)]
    pub input: CloudInput,
    #[command(flatten)]
    pub display: DisplayArgs,
    #[arg(long, value_enum, default_value = "quota")]
    pub algo: AlgoChoice,
    #[arg(long)]
    pub resolve: bool,
}

fn parse_dims(s: &str) -> std::result::Result<Dims, String> {
    let v: Vec<u32> = s
        .split(',')
        .map(|p| p.trim().parse::<u32>().map_err(|_| format!("bad dimension {p:?}")))
        .collect::<std::result::Result<_, _>>()?;
    match v.as_slice() {
        [l, h, d] if *l > 0 && *h > 0 && *d > 0 => Ok(Dims::new(*l, *h, *d)),
        _ => Err("expected three positive sizes L,H,D".into()),
    }
}

/// Cuboid capacity; `None` is unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Capacity(pub Option<usize>);

fn parse_theta(s: &str) -> std::result::Result<Capacity, String> {
    match s {
        "inf" | "unbounded" => Ok(Capacity(None)),
        _ => match s.parse::<usize>() {
            Ok(0) | Err(_) => Err(format!("expected a positive capacity or `inf`, got {s:?}")),
            Ok(n) => Ok(Capacity(Some(n))),
        },
    }
}

pub fn seed() -> Result<u64> {
    match std::env::var("FLSPLAN_SEED") {
        Ok(s) => s
            .parse()
            .map_err(|_| PlanError::InvalidConfig(format!("FLSPLAN_SEED={s:?} is not an unsigned integer"))),
        Err(_) => Ok(0),
    }
}
