use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::builder::{PossibleValuesParser, TypedValueParser};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use ubiloc_core::eval::{parse_sweep_values, SweepConfig};
use ubiloc_core::{
    cdf, compute_errors, run_trajectory, summarize, sweep, Scenario, SelectionKind, SelectionPolicy, SweepAxis,
};

#[derive(Parser)]
#[command(
    name = "ubiloc",
    version,
    about = "Simulate anchor-based indoor localization runs and sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one walk and write per-pose errors, their CDF and a summary.
    Run(RunArgs),
    /// Run a Monte-Carlo sweep over one parameter.
    Sweep(SweepArgs),
    /// Parse and check a scenario file without running it.
    Validate {
        #[arg(long)]
        scenario: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    /// Scenario JSON file.
    #[arg(long)]
    scenario: PathBuf,
    /// Anchor selection policy.
    #[arg(long, default_value = "nearest", value_parser = one_of::<SelectionKind>(&["all", "nearest", "farthest", "least-variance", "strongest"]))]
    selection: SelectionKind,
    /// Number of anchors to keep.
    #[arg(long, default_value_t = 6)]
    k: usize,
    /// Overrides the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// Parameter to vary.
    #[arg(long, value_parser = one_of::<SweepAxis>(&["selection", "k", "density", "sigma"]))]
    axis: SweepAxis,
    /// Comma list, or a..b for k and density.
    #[arg(long)]
    values: String,
    /// Replications per value; seeds are seed, seed+1, ...
    #[arg(long, default_value_t = 20)]
    reps: usize,
    /// Worker threads.
    #[arg(long, env = "UBILOC_THREADS")]
    threads: Option<usize>,
}

fn one_of<T>(names: &'static [&'static str]) -> impl TypedValueParser<Value = T>
where
    T: std::str::FromStr + Clone + Send + Sync + 'static,
    T::Err: std::fmt::Debug,
{
    PossibleValuesParser::new(names).map(|s| s.parse().expect("listed values parse"))
}

#[derive(Serialize)]
struct RunSummary<'a> {
    median_m: f64,
    p90_m: f64,
    mean_m: f64,
    n_poses: usize,
    scenario: &'a str,
    policy: &'a str,
    k: usize,
    seed: u64,
}

#[derive(Serialize)]
struct PoseRow {
    t: f64,
    truth_x: f64,
    truth_y: f64,
    est_x: f64,
    est_y: f64,
    error_m: f64,
    method: &'static str,
    n_anchors: usize,
}

fn load(path: &Path, seed: Option<u64>) -> Result<Scenario> {
    let mut scenario = Scenario::load(path)?;
    for w in scenario.validate()? {
        eprintln!("warning: {}: {w}", path.display());
    }
    if let Some(seed) = seed {
        scenario.seed = seed;
    }
    Ok(scenario)
}

fn csv_bytes<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    w.into_inner().context("flushing csv")
}

/// Writes every file to a temporary name first, then renames them all.
fn write_outputs(dir: &Path, files: &[(&str, Vec<u8>)]) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut staged = Vec::new();
    let result = (|| -> Result<()> {
        for (name, bytes) in files {
            let tmp = dir.join(format!(".{name}.tmp"));
            staged.push(tmp.clone());
            let mut f = fs::File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?;
            f.write_all(bytes)?;
            f.sync_all()?;
        }
        for (tmp, (name, _)) in staged.iter().zip(files) {
            fs::rename(tmp, dir.join(name)).with_context(|| format!("writing {name}"))?;
        }
        Ok(())
    })();
    if result.is_err() {
        for tmp in &staged {
            let _ = fs::remove_file(tmp);
        }
    }
    result
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let c = args.common;
    let scenario = load(&c.scenario, c.seed)?;
    let policy = SelectionPolicy::new(c.selection, c.k)?;
    let run = run_trajectory(&scenario, policy)?;
    if run.points.is_empty() {
        bail!("no poses were localized (indoor detection never fired)");
    }
    let errors = compute_errors(&run.points)?.errors();
    let summary = summarize(&errors)?;

    let poses = csv_bytes(run.points.iter().zip(&errors).map(|(p, &e)| PoseRow {
        t: p.truth.timestamp,
        truth_x: p.truth.position.x,
        truth_y: p.truth.position.y,
        est_x: p.fix.position.x,
        est_y: p.fix.position.y,
        error_m: e,
        method: p.fix.method.as_str(),
        n_anchors: p.fix.anchors_used.len(),
    }))?;
    let curve = csv_bytes(
        cdf(&errors)?
            .into_iter()
            .map(|(error_m, fraction)| CdfRow { error_m, fraction }),
    )?;
    let mut json = serde_json::to_vec_pretty(&RunSummary {
        median_m: summary.median_m,
        p90_m: summary.p90_m,
        mean_m: summary.mean_m,
        n_poses: summary.n_poses,
        scenario: &scenario.name,
        policy: c.selection.as_str(),
        k: c.k,
        seed: scenario.seed,
    })?;
    json.push(b'\n');
    write_outputs(
        &c.out,
        &[("poses.csv", poses), ("cdf.csv", curve), ("summary.json", json)],
    )?;
    println!("median_m {:.4}", summary.median_m);
    println!("p90_m {:.4}", summary.p90_m);
    Ok(())
}

#[derive(Serialize)]
struct CdfRow {
    error_m: f64,
    fraction: f64,
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let c = args.common;
    let scenario = load(&c.scenario, c.seed)?;
    let values = parse_sweep_values(args.axis, &args.values)?;
    let config = SweepConfig {
        replications: args.reps,
        policy: SelectionPolicy::new(c.selection, c.k)?,
        threads: args.threads,
    };
    let rows = sweep(&scenario, &values, &config)?;
    let name = format!("sweep_{}.csv", args.axis);
    write_outputs(&c.out, &[(&name, csv_bytes(&rows)?)])?;
    for r in &rows {
        println!(
            "{} {}: median_m {:.4} p90_m {:.4}",
            args.axis, r.axis_value, r.median_m, r.p90_m
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let result = match Cli::parse().command {
        Command::Run(args) => cmd_run(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Validate { scenario } => load(&scenario, None).map(|s| {
            println!(
                "{}: ok ({} anchors, {} walls, {} waypoints)",
                s.name,
                s.anchors.len(),
                s.walls.len(),
                s.waypoints.len()
            );
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
