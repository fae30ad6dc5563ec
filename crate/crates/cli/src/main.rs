//! Command-line driver for the cavity teleportation simulator.
//!
//! One binary, four experiments:
//!
//! * `run` — a single teleportation at the configured parameters, with the
//!   full report in the manifest.
//! * `sweep` — fidelity and success probability over Bob's motional phase.
//! * `mc` — Monte Carlo click sampling at finite detector efficiency.
//! * `validate` — the built-in self-checks.
//!
//! Without a subcommand the experiment comes from the config file's
//! `experiment` key (default `single`). Orchestration stays on one thread;
//! `--threads` is handed to the Monte Carlo sampler, which splits work into
//! fixed blocks so results are byte-identical for any worker count.
//!
//! Exit codes: 0 on success, 2 for a rejected configuration, 3 for an
//! integration failure, 4 for a failed validation check, 1 otherwise.

mod config;
mod output;
mod validate;

use anyhow::Context;
use cavity_teleport::experiments::{
    monte_carlo_threaded, run_teleportation, sweep_phi_b, SweepResult, SweepRow,
};
use cavity_teleport::Error as SimError;
use clap::{Parser, Subcommand};
use config::{ExperimentKind, Resolved};
use output::{Conventional, Manifest};
use std::f64::consts::TAU;
use std::fmt;
use std::path::{Path, PathBuf};

/// I/O or any other failure without a more specific class.
const EXIT_OTHER: i32 = 1;
/// The configuration file or flags were rejected.
const EXIT_CONFIG: i32 = 2;
/// The conditional evolution failed to integrate.
const EXIT_INTEGRATION: i32 = 3;
/// One or more built-in validation checks failed.
const EXIT_CHECK: i32 = 4;

#[derive(Parser)]
#[command(
    name = "cavity-teleport",
    version,
    about = "Simulates photon-mediated teleportation between two atom-cavity sites"
)]
struct Cli {
    /// Path to a TOML run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory for result files (overrides the config).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// RNG seed (overrides the config).
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Worker threads for Monte Carlo sampling.
    #[arg(long, global = true, value_name = "N", default_value_t = 1)]
    threads: usize,
    /// Integrator relative tolerance (overrides the config).
    #[arg(long, global = true, value_name = "X")]
    tolerance: Option<f64>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one teleportation and write the full report.
    Run,
    /// Sweep Bob's motional phase and write the fidelity curve.
    Sweep,
    /// Sample detection statistics at the configured efficiencies.
    Mc,
    /// Run the built-in self-checks.
    Validate,
}

impl Command {
    fn kind(&self) -> ExperimentKind {
        match self {
            Command::Run => ExperimentKind::Single,
            Command::Sweep => ExperimentKind::Sweep,
            Command::Mc => ExperimentKind::MonteCarlo,
            Command::Validate => ExperimentKind::Validate,
        }
    }
}

/// One failure class per documented exit code.
enum CliError {
    Config(anyhow::Error),
    Integration(SimError),
    Check(usize),
    Other(anyhow::Error),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Integration(_) => EXIT_INTEGRATION,
            CliError::Check(_) => EXIT_CHECK,
            CliError::Other(_) => EXIT_OTHER,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "configuration rejected: {e:#}"),
            CliError::Integration(e) => write!(f, "integration failed: {e}"),
            CliError::Check(n) => write!(f, "{n} validation check(s) failed"),
            CliError::Other(e) => write!(f, "{e:#}"),
        }
    }
}

/// Integration failures keep their own exit code, even inside a sweep.
fn is_integration(err: &SimError) -> bool {
    match err {
        SimError::IntegrationFailure { .. } | SimError::StepLimitExceeded { .. } => true,
        SimError::SweepPoint { source, .. } => is_integration(source),
        _ => false,
    }
}

/// Classifies a simulator error raised while running an experiment.
fn classify(err: SimError) -> CliError {
    if is_integration(&err) {
        CliError::Integration(err)
    } else {
        CliError::Other(anyhow::Error::new(err))
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(err.code());
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if cli.threads == 0 {
        return Err(CliError::Config(anyhow::anyhow!(
            "invalid parameter `threads`: at least one worker is required"
        )));
    }
    let mut resolved = match &cli.config {
        Some(path) => config::load(path).map_err(CliError::Config)?,
        None => config::resolve(&config::FileConfig::default()).map_err(CliError::Config)?,
    };
    if let Some(seed) = cli.seed {
        resolved.seed = seed;
    }
    if let Some(tol) = cli.tolerance {
        if !tol.is_finite() || tol <= 0.0 {
            return Err(CliError::Config(anyhow::anyhow!(
                "invalid parameter `tolerance`: {tol} must be positive"
            )));
        }
        resolved.tolerance = tol;
    }
    let kind = cli
        .command
        .as_ref()
        .map(Command::kind)
        .unwrap_or(resolved.kind);

    if kind == ExperimentKind::Validate {
        return run_validate();
    }

    let out_dir = cli
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(&resolved.out_dir));
    std::fs::create_dir_all(&out_dir)
        .with_context(|| format!("cannot create output directory `{}`", out_dir.display()))
        .map_err(CliError::Other)?;

    match kind {
        ExperimentKind::Single => run_single(&resolved, cli.threads, &out_dir),
        ExperimentKind::Sweep => run_sweep(&resolved, cli.threads, &out_dir),
        ExperimentKind::MonteCarlo => run_mc(&resolved, cli.threads, &out_dir),
        ExperimentKind::Validate => unreachable!("handled above"),
    }
}

/// The motional-phase grid: `n` points uniform over [0, 2π).
fn phi_grid(n: usize) -> Vec<f64> {
    (0..n).map(|k| TAU * k as f64 / n as f64).collect()
}

fn manifest(resolved: &Resolved, kind: ExperimentKind, threads: usize) -> Manifest {
    Manifest {
        tool: "cavity-teleport",
        version: env!("CARGO_PKG_VERSION"),
        experiment: kind.to_string(),
        seed: resolved.seed,
        samples: resolved.samples,
        threads,
        tolerance: resolved.tolerance,
        phi_points: resolved.phi_points,
        etas: resolved.etas.clone(),
        preset: resolved.preset.clone(),
        conventional: Conventional::new(&resolved.preset),
        report: None,
    }
}

fn write_manifest(out_dir: &Path, manifest: &Manifest) -> Result<(), CliError> {
    let text = output::manifest_toml(manifest).map_err(CliError::Other)?;
    output::write_file(&out_dir.join("run_manifest.toml"), &text).map_err(CliError::Other)
}

fn run_single(resolved: &Resolved, threads: usize, out_dir: &Path) -> Result<(), CliError> {
    let report =
        run_teleportation(&resolved.preset, resolved.tolerance).map_err(classify)?;
    let sweep = SweepResult {
        preset: resolved.preset.name.clone(),
        rows: vec![SweepRow {
            phi_b: resolved.preset.bob.phi,
            fidelity: report.fidelity,
            success_probability: report.success_probability,
            abs_chi: report.abs_chi,
        }],
    };
    output::write_file(&out_dir.join("sweep.csv"), &output::sweep_csv(&sweep))
        .map_err(CliError::Other)?;
    let mut m = manifest(resolved, ExperimentKind::Single, threads);
    m.report = Some(report.clone());
    write_manifest(out_dir, &m)?;

    println!("preset               : {}", resolved.preset.name);
    println!("fidelity F           : {:.6}", report.fidelity);
    println!("success probability P: {:.6}", report.success_probability);
    println!("|chi|                : {:.6}", report.abs_chi);
    println!(
        "99% emission time    : {:.4} us",
        report.emission_time * 1.0e6
    );
    println!(
        "mode match A / B     : {:.4} / {:.4}",
        report.mode_match_alice, report.mode_match_bob
    );
    for w in &report.patterns {
        println!("  P[{}] = {:.6}", w.pattern, w.probability);
    }
    println!("wrote sweep.csv and run_manifest.toml to {}", out_dir.display());
    Ok(())
}

fn run_sweep(resolved: &Resolved, threads: usize, out_dir: &Path) -> Result<(), CliError> {
    let phis = phi_grid(resolved.phi_points);
    let sweep = sweep_phi_b(&resolved.preset, &phis).map_err(classify)?;
    output::write_file(&out_dir.join("sweep.csv"), &output::sweep_csv(&sweep))
        .map_err(CliError::Other)?;
    let fid: Vec<(f64, f64)> = sweep.rows.iter().map(|r| (r.phi_b, r.fidelity)).collect();
    let suc: Vec<(f64, f64)> = sweep
        .rows
        .iter()
        .map(|r| (r.phi_b, r.success_probability))
        .collect();
    output::write_file(
        &out_dir.join("plot_fidelity.dat"),
        &output::plot_data("phi_B", "F", &fid),
    )
    .map_err(CliError::Other)?;
    output::write_file(
        &out_dir.join("plot_success.dat"),
        &output::plot_data("phi_B", "P", &suc),
    )
    .map_err(CliError::Other)?;
    write_manifest(out_dir, &manifest(resolved, ExperimentKind::Sweep, threads))?;

    let f_min = sweep.rows.iter().map(|r| r.fidelity).fold(f64::INFINITY, f64::min);
    let f_mean =
        sweep.rows.iter().map(|r| r.fidelity).sum::<f64>() / sweep.rows.len() as f64;
    let p_min = sweep
        .rows
        .iter()
        .map(|r| r.success_probability)
        .fold(f64::INFINITY, f64::min);
    println!(
        "swept {} phases on preset {}: min F = {:.6}, mean F = {:.6}, min P = {:.6}",
        sweep.rows.len(),
        resolved.preset.name,
        f_min,
        f_mean,
        p_min
    );
    println!(
        "wrote sweep.csv, plot_fidelity.dat, plot_success.dat, run_manifest.toml to {}",
        out_dir.display()
    );
    Ok(())
}

fn run_mc(resolved: &Resolved, threads: usize, out_dir: &Path) -> Result<(), CliError> {
    let mut rows = Vec::with_capacity(resolved.etas.len());
    for &eta in &resolved.etas {
        // Every efficiency reuses the seed, so rows differ only through η.
        let row = monte_carlo_threaded(
            &resolved.preset,
            resolved.samples,
            eta,
            resolved.seed,
            threads,
        )
        .map_err(classify)?;
        println!(
            "eta = {:.3}: success rate {:.6} (predicted {:.6}), mean fidelity {}",
            row.eta,
            row.success_rate,
            row.predicted_rate,
            row.mean_fidelity
                .map_or_else(|| "n/a".into(), |f| format!("{f:.6}")),
        );
        rows.push(row);
    }
    output::write_file(&out_dir.join("mc.csv"), &output::mc_csv(&rows))
        .map_err(CliError::Other)?;
    write_manifest(
        out_dir,
        &manifest(resolved, ExperimentKind::MonteCarlo, threads),
    )?;
    println!("wrote mc.csv and run_manifest.toml to {}", out_dir.display());
    Ok(())
}

fn run_validate() -> Result<(), CliError> {
    let results = validate::run_all();
    let mut failures = 0;
    for r in &results {
        match &r.detail {
            None => println!("ok   — {}", r.name),
            Some(detail) => {
                failures += 1;
                println!("FAIL — {}: {}", r.name, detail);
            }
        }
    }
    println!("validation: {} checks, {} failures", results.len(), failures);
    if failures == 0 {
        Ok(())
    } else {
        Err(CliError::Check(failures))
    }
}
