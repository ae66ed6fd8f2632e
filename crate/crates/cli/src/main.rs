mod args;

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use flsplan::conflict::{detect_conflicts, resolve_by_delay};
use flsplan::deploy::{assign, compute_latency, order_deployments, total_distance, Algorithm};
use flsplan::io::{self as fio, MetricsReport};
use flsplan::model::{DisplayConfig, PointCloud, Scene};
use flsplan::motion::{check_conservation, encode_scene, verify_replay, with_workers, GpcConfig};
use flsplan::{PlanError, Result};

use args::{AlgoChoice, Cli, CloudInput, Command, ConflictArgs, DeployArgs, EncodeArgs, VerifyArgs};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let run = match cli.command {
        Command::Deploy(a) => deploy(a),
        Command::Encode(a) => encode(a),
        Command::Verify(a) => verify(a),
        Command::Conflicts(a) => conflicts(a),
    };
    match run {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("flsplan: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &PlanError) -> u8 {
    if e.is_infeasible() {
        2
    } else if matches!(e, PlanError::Replay { .. }) {
        3
    } else {
        1
    }
}

fn load_input(input: &CloudInput, config: &DisplayConfig) -> Result<PointCloud> {
    let is_mesh = input.mesh || input.cloud.extension().is_some_and(|e| e.eq_ignore_ascii_case("off"));
    let cloud = if is_mesh {
        let mesh = fio::load_mesh(&input.cloud)?;
        fio::sample_mesh_to_cloud(&mesh, config.dims, input.density, args::seed()?)?
    } else {
        fio::load_cloud(&input.cloud)?
    };
    cloud.check_within(config.dims)?;
    Ok(cloud)
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn run_deploy(cloud: &PointCloud, config: &DisplayConfig, algorithm: Algorithm, resolve: bool) -> Result<(MetricsReport, flsplan::deploy::DeploymentSchedule)> {
    // Only planning is timed; the cloud is already in memory.
    let start = Instant::now();
    let plan = assign(algorithm, cloud, config)?;
    let mut schedule = order_deployments(&plan, config);
    let execution_time_ms = start.elapsed().as_secs_f64() * 1e3;
    let mut report = detect_conflicts(&schedule, config.conflict_threshold);
    if resolve && report.conflict_count() > 0 {
        schedule = resolve_by_delay(&schedule, &report)?;
        report = detect_conflicts(&schedule, config.conflict_threshold);
    }
    let metrics = MetricsReport {
        latency_seconds: compute_latency(&schedule),
        total_distance_cells: total_distance(&plan, config),
        intersecting_paths: report.intersection_count(),
        conflicts: report.conflict_count(),
        execution_time_ms,
        quota_resets: plan.quota_resets,
        dispatcher_counts: plan.counts(),
        algorithm: algorithm.name().into(),
    };
    Ok((metrics, schedule))
}

fn deploy(a: DeployArgs) -> Result<()> {
    let config = a.display.config()?;
    let cloud = load_input(&a.input, &config)?;
    let results = with_workers(a.display.workers, || {
        a.algo
            .algorithms()
            .into_iter()
            .map(|alg| run_deploy(&cloud, &config, alg, a.resolve))
            .collect::<Result<Vec<_>>>()
    })??;
    let reports: Vec<MetricsReport> = results.iter().map(|(m, _)| m.clone()).collect();
    fio::write_metrics(&reports, a.format.into(), io::stdout().lock())?;
    if let Some(dir) = &a.out {
        fs::create_dir_all(dir)?;
        let ext = match a.format {
            args::FormatChoice::Csv => "csv",
            args::FormatChoice::Json => "json",
        };
        fio::write_metrics(&reports, a.format.into(), create(dir, &format!("metrics.{ext}"))?)?;
        for (m, schedule) in &results {
            let mut w = create(dir, &format!("schedule_{}.json", m.algorithm))?;
            serde_json::to_writer(&mut w, schedule)?;
            writeln!(w)?;
        }
    }
    Ok(())
}

fn single_algorithm(choice: AlgoChoice) -> Result<Algorithm> {
    match choice.algorithms().as_slice() {
        [a] => Ok(*a),
        _ => Err(PlanError::InvalidConfig("choose one of mindist or quota".into())),
    }
}

fn encode(a: EncodeArgs) -> Result<()> {
    let config = a.display.config()?;
    let manifest = fio::load_manifest(&a.manifest)?;
    let scene = fio::load_scene(&manifest)?;
    let algorithm = single_algorithm(a.algo)?;
    let gpc = GpcConfig {
        omega: a.omega.or(manifest.gpc_size),
        theta: a.theta.0,
        variant: a.variant.into(),
    };
    let out = with_workers(a.display.workers, || encode_scene(&scene, &config, &gpc, algorithm))??;

    fs::create_dir_all(&a.out)?;
    fio::write_encoding(&out.encoding, create(&a.out, "encoding.json")?)?;
    let series = |f: &dyn Fn(&flsplan::motion::TransitionMetrics) -> f64| -> Vec<(usize, f64)> {
        out.metrics.iter().map(|m| (m.index + 1, f(m))).collect()
    };
    fio::write_series("distance", &series(&|m| m.distance), create(&a.out, "distance.csv")?)?;
    fio::write_series("flights", &series(&|m| m.flights as f64), create(&a.out, "flights.csv")?)?;
    fio::write_series("step1_ms", &series(&|m| m.step1_ms), create(&a.out, "time.csv")?)?;
    if matches!(a.format, args::FormatChoice::Json) {
        let mut w = create(&a.out, "metrics.json")?;
        serde_json::to_writer_pretty(&mut w, &out.metrics)?;
        writeln!(w)?;
    }

    let e = &out.encoding;
    let mut stdout = io::stdout().lock();
    writeln!(
        stdout,
        "variant={} theta={} omega={} clouds={} transitions={} total_distance={}",
        e.variant.name(),
        e.theta.map_or("inf".to_string(), |t| t.to_string()),
        e.omega,
        scene.clouds.len(),
        e.transitions.len(),
        e.total_distance()
    )?;
    Ok(())
}

fn verify(a: VerifyArgs) -> Result<()> {
    let text = fio::read_text(&a.encoding)?;
    let encoding = fio::parse_encoding(&text)?;
    let manifest = fio::load_manifest(&a.manifest)?;
    let scene: Scene = fio::load_scene(&manifest)?;
    verify_replay(&encoding, &scene)?;
    check_conservation(&encoding, &scene)?;
    println!("replay ok: {} clouds, {} transitions", scene.clouds.len(), encoding.transitions.len());
    Ok(())
}

fn conflicts(a: ConflictArgs) -> Result<()> {
    let config = a.display.config()?;
    let cloud = load_input(&a.input, &config)?;
    let mut out = io::stdout().lock();
    for algorithm in a.algo.algorithms() {
        let report = with_workers(a.display.workers, || -> Result<_> {
            let plan = assign(algorithm, &cloud, &config)?;
            let mut schedule = order_deployments(&plan, &config);
            let mut report = detect_conflicts(&schedule, config.conflict_threshold);
            if a.resolve && report.conflict_count() > 0 {
                schedule = resolve_by_delay(&schedule, &report)?;
                report = detect_conflicts(&schedule, config.conflict_threshold);
            }
            Ok(report)
        })??;
        let doc = serde_json::json!({
            "algorithm": algorithm.name(),
            "intersecting_paths": report.intersection_count(),
            "conflicts": report.conflict_count(),
            "report": report,
        });
        serde_json::to_writer(&mut out, &doc)?;
        writeln!(out)?;
    }
    Ok(())
}
