//! Command-line surface for the predator-prey branching process simulator.
//!
//! Exit codes: 0 success, 1 model validation failure (or failed checks),
//! 2 parse errors, 3 I/O errors.

mod config;
mod output;

use clap::{Parser, Subcommand};
use config::ConfigFile;
use output::RunManifest;
use ppbranch_core::model::{validate_config, ModelConfig};
use ppbranch_core::montecarlo::{estimate_fate_curve, moment_check};
use ppbranch_core::oracle::{
    distribution_distance, exact_step_distribution, JointHistogram, MAX_ORACLE_STATE,
};
use ppbranch_core::sampling::SeedStream;
use ppbranch_core::simulator::{advance, simulate, PopulationState, RecordMode};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

/// Environment variable consulted when `--seed` is not given.
const SEED_ENV: &str = "PPBRANCH_SEED";

#[derive(Parser)]
#[command(
    name = "ppbranch",
    version,
    about = "Predator-prey density-dependent branching process simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a configuration file against the standing model assumptions
    Validate {
        /// Path to a JSON model configuration
        config: PathBuf,
    },
    /// Simulate a single trajectory and write it as CSV
    Simulate {
        config: PathBuf,
        /// Number of generations to simulate
        #[arg(long, default_value_t = 100)]
        horizon: u32,
        /// Root seed (default: $PPBRANCH_SEED, then 0)
        #[arg(long)]
        seed: Option<u64>,
        /// Output CSV path
        #[arg(long)]
        out: PathBuf,
    },
    /// Estimate per-generation fate probabilities over many replicates
    Montecarlo {
        config: PathBuf,
        #[arg(long, default_value_t = 100)]
        horizon: u32,
        /// Number of independent replicates
        #[arg(long, default_value_t = 10_000)]
        replicates: u64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads; results are identical for every value
        #[arg(long, default_value_t = 1)]
        parallel: usize,
    },
    /// Compare analytic one-step moments against simulation from one state
    Moments {
        config: PathBuf,
        /// State as `predators,preys`
        #[arg(long)]
        state: String,
        /// Draws used for the empirical moments
        #[arg(long, default_value_t = 1_000_000)]
        draws: u64,
        #[arg(long)]
        seed: Option<u64>,
    },
}

enum CliError {
    /// Invalid model or failed checks (exit 1).
    Validation(String),
    /// Malformed input (exit 2).
    Parse(String),
    /// Filesystem failure (exit 3).
    Io(String),
}

impl CliError {
    fn report(&self) -> ExitCode {
        let (label, message, code) = match self {
            CliError::Validation(m) => ("validation", m, 1),
            CliError::Parse(m) => ("parse", m, 2),
            CliError::Io(m) => ("io", m, 3),
        };
        eprintln!("error ({label}): {message}");
        ExitCode::from(code)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => err.report(),
    }
}

fn run(command: Command) -> Result<ExitCode, CliError> {
    match command {
        Command::Validate { config } => cmd_validate(&config),
        Command::Simulate {
            config,
            horizon,
            seed,
            out,
        } => cmd_simulate(&config, horizon, resolve_seed(seed), &out),
        Command::Montecarlo {
            config,
            horizon,
            replicates,
            seed,
            out,
            parallel,
        } => cmd_montecarlo(
            &config,
            horizon,
            replicates,
            resolve_seed(seed),
            &out,
            parallel,
        ),
        Command::Moments {
            config,
            state,
            draws,
            seed,
        } => cmd_moments(&config, &state, draws, resolve_seed(seed)),
    }
}

fn resolve_seed(flag: Option<u64>) -> u64 {
    flag.or_else(|| {
        std::env::var(SEED_ENV)
            .ok()
            .and_then(|v| v.parse::<u64>().ok())
    })
    .unwrap_or(0)
}

fn load_config(path: &Path) -> Result<ModelConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    let spec: ConfigFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    spec.build()
        .map_err(|e| CliError::Validation(e.to_string()))
}

fn create_output(path: &Path) -> Result<std::io::BufWriter<std::fs::File>, CliError> {
    let file = std::fs::File::create(path)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", path.display())))?;
    Ok(std::io::BufWriter::new(file))
}

fn cmd_validate(config: &Path) -> Result<ExitCode, CliError> {
    let cfg = load_config(config)?;
    let report = validate_config(&cfg);
    print!("{report}");
    if report.is_valid() {
        println!();
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}

fn cmd_simulate(config: &Path, horizon: u32, seed: u64, out: &Path) -> Result<ExitCode, CliError> {
    let started = Instant::now();
    let cfg = load_config(config)?;
    let mut stream = SeedStream::derive(seed, 0);
    let trajectory = simulate(&cfg, horizon, &mut stream, RecordMode::Full);
    let mut writer = create_output(out)?;
    output::write_trajectory_csv(&mut writer, &trajectory)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", out.display())))?;
    use std::io::Write;
    writer
        .flush()
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", out.display())))?;
    println!(
        "simulated {} generation(s), fate {:?}, final state ({}, {})",
        trajectory.generations,
        trajectory.fate,
        trajectory.final_state.predators,
        trajectory.final_state.preys
    );
    manifest("simulate", config, seed, horizon, None, None, out, started)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_montecarlo(
    config: &Path,
    horizon: u32,
    replicates: u64,
    seed: u64,
    out: &Path,
    parallel: usize,
) -> Result<ExitCode, CliError> {
    let started = Instant::now();
    let cfg = load_config(config)?;
    let curve = estimate_fate_curve(&cfg, horizon, replicates, seed, parallel);
    let mut writer = create_output(out)?;
    output::write_fate_curve_csv(&mut writer, &curve)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", out.display())))?;
    use std::io::Write;
    writer
        .flush()
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", out.display())))?;
    println!(
        "{} replicates over {} generations: p_both_alive({}) = {:.6}, p_extinct({}) = {:.6}",
        replicates,
        horizon,
        horizon,
        curve.p_both_alive(horizon),
        horizon,
        curve.p_extinct(horizon)
    );
    manifest(
        "montecarlo",
        config,
        seed,
        horizon,
        Some(replicates),
        Some(parallel),
        out,
        started,
    )?;
    Ok(ExitCode::SUCCESS)
}

fn parse_state(state: &str) -> Result<(u64, u64), CliError> {
    let parts: Vec<&str> = state.split(',').collect();
    if parts.len() != 2 {
        return Err(CliError::Parse(format!(
            "state must be `predators,preys`, got `{state}`"
        )));
    }
    let z = parts[0]
        .trim()
        .parse::<u64>()
        .map_err(|e| CliError::Parse(format!("bad predator count: {e}")))?;
    let zq = parts[1]
        .trim()
        .parse::<u64>()
        .map_err(|e| CliError::Parse(format!("bad prey count: {e}")))?;
    Ok((z, zq))
}

/// Total-variation acceptance threshold: 0.01 at 10^6 draws, scaled by the
/// sampling-noise factor for smaller draw counts.
fn tv_threshold(draws: u64) -> f64 {
    0.01 * (1_000_000.0 / draws as f64).sqrt().max(1.0)
}

fn cmd_moments(config: &Path, state: &str, draws: u64, seed: u64) -> Result<ExitCode, CliError> {
    let cfg = load_config(config)?;
    let (z, zq) = parse_state(state)?;
    let report = moment_check(&cfg, &[(z, zq)], draws, seed)
        .map_err(|e| CliError::Validation(e.to_string()))?;
    println!("state ({z}, {zq}), {draws} draws:");
    let mut all_ok = report.all_ok();
    for entry in &report.entries {
        println!(
            "  {:<8} mean {:>12.6} vs analytic {:>12.6} [{}]   variance {:>14.6} vs {:>14.6} [{}]",
            entry.species.to_string(),
            entry.empirical.mean,
            entry.analytic.mean,
            verdict(entry.mean_ok),
            entry.empirical.variance,
            entry.analytic.variance,
            verdict(entry.variance_ok),
        );
    }
    if report.explosions > 0 {
        println!("  {} draw(s) signalled explosion", report.explosions);
    }

    // Oracle comparison for desk-sized states in the unconstrained model.
    if z <= MAX_ORACLE_STATE && zq <= MAX_ORACLE_STATE && cfg.carrying.is_none() {
        let exact =
            exact_step_distribution(&cfg, (z, zq), 1e-9).expect("state bounds already checked");
        let mut histogram = JointHistogram::default();
        // An independent replicate index keeps this sample disjoint from
        // the moment-check draws.
        let mut stream = SeedStream::derive(seed, 1 << 32);
        let from = PopulationState::new(z, zq);
        for _ in 0..draws {
            if let Ok((next, _)) = advance(&cfg, from, &mut stream, 0) {
                histogram.record((next.predators, next.preys));
            }
        }
        let tv = distribution_distance(&histogram, &exact);
        let threshold = tv_threshold(draws);
        let tv_ok = tv < threshold;
        all_ok &= tv_ok;
        println!(
            "  oracle   total variation {tv:.6} vs threshold {threshold:.6} [{}] (truncation tail {:.2e})",
            verdict(tv_ok),
            exact.truncation_tail_mass(),
        );
    }

    Ok(if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

#[allow(clippy::too_many_arguments)]
fn manifest(
    command: &str,
    config: &Path,
    root_seed: u64,
    horizon: u32,
    replicates: Option<u64>,
    parallel: Option<usize>,
    out: &Path,
    started: Instant,
) -> Result<(), CliError> {
    RunManifest {
        command: command.to_string(),
        config: config.to_path_buf(),
        root_seed,
        horizon,
        replicates,
        parallel,
        outputs: vec![out.to_path_buf()],
        version: env!("CARGO_PKG_VERSION").to_string(),
        duration_seconds: started.elapsed().as_secs_f64(),
    }
    .write_next_to(out)
    .map_err(|e| CliError::Io(format!("cannot write manifest: {e}")))
}
