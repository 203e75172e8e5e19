//! Command-line front end for the relay selection simulator.
//!
//! Three subcommands share one configuration model: `sweep` runs Monte
//! Carlo over an SNR grid, `analytic` evaluates the closed-form curves on
//! the same record schema, and `compare` checks a sweep file against its
//! own analytic columns. Settings resolve in three layers: built-in
//! defaults, then a TOML file, then command-line flags.
//!
//! Exit codes: 0 success, 1 invalid input, 2 runtime failure, 3 comparison
//! failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, ensure, Context};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use relaysim_core::engine::{analytic_curves, run_sweep, SimulationConfig, SweepRecord};
use relaysim_core::noise::ChannelMode;
use relaysim_core::record::{records_from_csv, records_to_csv};
use relaysim_core::selector::FallbackRule;

#[derive(Parser)]
#[command(
    name = "relaysim",
    version,
    about = "Relay selection over bursty impulsive noise: simulation and closed forms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo sweep over the SNR grid; writes CSV records.
    Sweep(SweepArgs),
    /// Closed-form curves only, on the same CSV schema (no simulation).
    Analytic(SweepArgs),
    /// Check a sweep CSV against its own analytic columns.
    Compare(CompareArgs),
}

#[derive(Args)]
struct SweepArgs {
    /// TOML settings file; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV path; stdout when omitted. A `<out>.manifest.json`
    /// sidecar records the resolved settings and the producing command.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Selection protocol; repeat for several (one sweep each, shared
    /// noise and channel randomness).
    #[arg(long)]
    protocol: Vec<String>,
    #[arg(long)]
    relays: Option<usize>,
    #[arg(long)]
    frames: Option<u64>,
    #[arg(long)]
    symbols: Option<usize>,
    /// Grid start in dB; requires --snr-stop and --snr-step.
    #[arg(long)]
    snr_start: Option<f64>,
    #[arg(long)]
    snr_stop: Option<f64>,
    #[arg(long)]
    snr_step: Option<f64>,
    /// Target rate in bit/s/Hz for the outage threshold.
    #[arg(long)]
    rate: Option<f64>,
    /// Stationary impulsive-state probability.
    #[arg(long)]
    p_b: Option<f64>,
    /// Noise memory in epochs.
    #[arg(long)]
    mu: Option<f64>,
    /// Impulsive-to-quiet noise variance ratio.
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    lambda_sd: Option<f64>,
    #[arg(long)]
    lambda_sr: Option<f64>,
    #[arg(long)]
    lambda_rd: Option<f64>,
    /// Path-loss exponent.
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Fading evolution: per_symbol or quasi_static.
    #[arg(long)]
    channel_mode: Option<String>,
    /// All-impulsive fallback rule: source_hop_only or max_min_scaled.
    #[arg(long)]
    fallback: Option<String>,
    /// Force the relay to forward correct bits (diagnostic).
    #[arg(long)]
    no_error_propagation: bool,
    /// Rayon worker threads; defaults to the number of cores. Results do
    /// not depend on this.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct CompareArgs {
    /// Sweep CSV produced by the sweep subcommand.
    records: PathBuf,
    /// Largest acceptable |estimate - reference| in units of the
    /// estimate's half-interval.
    #[arg(long, default_value_t = 3.5)]
    tolerance: f64,
}

/// Optional mirror of the engine configuration for TOML files. Unknown
/// keys are rejected so typos fail loudly instead of silently defaulting.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    relays: Option<usize>,
    lambda_sd: Option<f64>,
    lambda_sr: Option<f64>,
    lambda_rd: Option<f64>,
    eta: Option<f64>,
    p_b: Option<f64>,
    mu: Option<f64>,
    rho: Option<f64>,
    protocols: Option<Vec<String>>,
    symbols: Option<usize>,
    frames: Option<u64>,
    snr_db: Option<Vec<f64>>,
    snr_start: Option<f64>,
    snr_stop: Option<f64>,
    snr_step: Option<f64>,
    rate: Option<f64>,
    seed: Option<u64>,
    channel_mode: Option<ChannelMode>,
    fallback: Option<FallbackRule>,
    error_propagation: Option<bool>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    created_unix: u64,
    output: &'a Path,
    protocols: &'a [String],
    config: &'a SimulationConfig,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Sweep(args) => cmd_sweep(&args, false),
        Command::Analytic(args) => cmd_sweep(&args, true),
        Command::Compare(args) => cmd_compare(&args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(classify(&err))
        }
    }
}

fn classify(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(core) = cause.downcast_ref::<relaysim_core::Error>() {
            return if core.is_validation() { 1 } else { 2 };
        }
        if cause.downcast_ref::<toml::de::Error>().is_some() {
            return 1;
        }
    }
    2
}

fn build_grid(start: f64, stop: f64, step: f64) -> anyhow::Result<Vec<f64>> {
    ensure!(
        start.is_finite() && stop.is_finite() && step.is_finite() && step > 0.0 && stop >= start,
        "grid requires finite start <= stop and step > 0 (got {start}..={stop} by {step})"
    );
    let mut grid = Vec::new();
    for k in 0.. {
        let v = start + step * k as f64;
        if v > stop + 1e-9 {
            break;
        }
        grid.push(v);
    }
    Ok(grid)
}

fn parse_channel_mode(s: &str) -> anyhow::Result<ChannelMode> {
    match s {
        "per_symbol" => Ok(ChannelMode::PerSymbol),
        "quasi_static" => Ok(ChannelMode::QuasiStatic),
        other => bail!("unknown channel mode {other:?}; expected per_symbol or quasi_static"),
    }
}

fn parse_fallback(s: &str) -> anyhow::Result<FallbackRule> {
    match s {
        "source_hop_only" => Ok(FallbackRule::SourceHopOnly),
        "max_min_scaled" => Ok(FallbackRule::MaxMinScaled),
        other => {
            bail!("unknown fallback rule {other:?}; expected source_hop_only or max_min_scaled")
        }
    }
}

/// Defaults, then file, then flags. Returns the shared settings (protocol
/// field left at its default) and the protocol list to sweep.
fn resolve(args: &SweepArgs) -> anyhow::Result<(SimulationConfig, Vec<String>)> {
    let file: FileConfig = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => FileConfig::default(),
    };

    let mut config = SimulationConfig::default();
    macro_rules! layer {
        ($field:ident, $flag:expr) => {
            if let Some(v) = file.$field {
                config.$field = v;
            }
            if let Some(v) = $flag {
                config.$field = v;
            }
        };
    }
    layer!(relays, args.relays);
    layer!(lambda_sd, args.lambda_sd);
    layer!(lambda_sr, args.lambda_sr);
    layer!(eta, args.eta);
    layer!(p_b, args.p_b);
    layer!(mu, args.mu);
    layer!(rho, args.rho);
    layer!(symbols, args.symbols);
    layer!(frames, args.frames);
    layer!(rate, args.rate);
    layer!(seed, args.seed);
    if file.lambda_rd.is_some() {
        config.lambda_rd = file.lambda_rd;
    }
    if args.lambda_rd.is_some() {
        config.lambda_rd = args.lambda_rd;
    }
    if let Some(mode) = file.channel_mode {
        config.mode = mode;
    }
    if let Some(mode) = &args.channel_mode {
        config.mode = parse_channel_mode(mode)?;
    }
    if let Some(rule) = file.fallback {
        config.fallback = rule;
    }
    if let Some(rule) = &args.fallback {
        config.fallback = parse_fallback(rule)?;
    }
    if let Some(ep) = file.error_propagation {
        config.error_propagation = ep;
    }
    if args.no_error_propagation {
        config.error_propagation = false;
    }

    let flag_grid = [args.snr_start, args.snr_stop, args.snr_step];
    if flag_grid.iter().any(Option::is_some) {
        ensure!(
            flag_grid.iter().all(Option::is_some),
            "--snr-start, --snr-stop and --snr-step must be given together"
        );
        config.snr_db = build_grid(
            args.snr_start.unwrap(),
            args.snr_stop.unwrap(),
            args.snr_step.unwrap(),
        )?;
    } else if let Some(grid) = file.snr_db {
        ensure!(
            file.snr_start.is_none() && file.snr_stop.is_none() && file.snr_step.is_none(),
            "config sets both snr_db and snr_start/stop/step; use one"
        );
        config.snr_db = grid;
    } else if [file.snr_start, file.snr_stop, file.snr_step]
        .iter()
        .any(Option::is_some)
    {
        ensure!(
            file.snr_start.is_some() && file.snr_stop.is_some() && file.snr_step.is_some(),
            "config must set snr_start, snr_stop and snr_step together"
        );
        config.snr_db = build_grid(
            file.snr_start.unwrap(),
            file.snr_stop.unwrap(),
            file.snr_step.unwrap(),
        )?;
    }

    let protocols = if !args.protocol.is_empty() {
        args.protocol.clone()
    } else if let Some(list) = file.protocols {
        ensure!(!list.is_empty(), "config key `protocols` is empty");
        list
    } else {
        vec![config.protocol.clone()]
    };
    Ok((config, protocols))
}

fn cmd_sweep(args: &SweepArgs, analytic_only: bool) -> anyhow::Result<u8> {
    let (base, protocols) = resolve(args)?;
    if let Some(n) = args.workers {
        ensure!(n >= 1, "--workers must be at least 1");
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring worker pool")?;
    }

    let mut records: Vec<SweepRecord> = Vec::new();
    for name in &protocols {
        let config = SimulationConfig {
            protocol: name.clone(),
            ..base.clone()
        };
        let batch = if analytic_only {
            analytic_curves(&config)?
        } else {
            run_sweep(&config)?
        };
        eprintln!(
            "{}: {} points for {name}",
            if analytic_only { "analytic" } else { "sweep" },
            batch.len()
        );
        records.extend(batch);
    }

    let csv = records_to_csv(&records);
    match &args.out {
        None => print!("{csv}"),
        Some(path) => {
            std::fs::write(path, &csv).with_context(|| format!("writing {}", path.display()))?;
            let manifest = Manifest {
                tool: "relaysim",
                version: env!("CARGO_PKG_VERSION"),
                command: if analytic_only { "analytic" } else { "sweep" },
                created_unix: SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0),
                output: path,
                protocols: &protocols,
                config: &base,
            };
            let sidecar = manifest_path(path);
            std::fs::write(&sidecar, serde_json::to_string_pretty(&manifest)?)
                .with_context(|| format!("writing {}", sidecar.display()))?;
            eprintln!("wrote {} and {}", path.display(), sidecar.display());
        }
    }
    Ok(0)
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    out.with_file_name(name)
}

fn cmd_compare(args: &CompareArgs) -> anyhow::Result<u8> {
    ensure!(
        args.tolerance.is_finite() && args.tolerance > 0.0,
        "--tolerance must be positive"
    );
    let text = std::fs::read_to_string(&args.records)
        .with_context(|| format!("reading {}", args.records.display()))?;
    let records = records_from_csv(&text)?;
    ensure!(
        !records.is_empty(),
        "no records in {}",
        args.records.display()
    );

    let mut checked = 0u32;
    let mut failures = 0u32;
    for r in &records {
        if r.analytic_ber.is_nan() || r.analytic_pout.is_nan() {
            println!(
                "snr_db={} protocol={} SKIP (no closed-form reference)",
                r.snr_db, r.protocol
            );
            continue;
        }
        if r.ber_dest.is_nan() || r.p_out.is_nan() {
            println!(
                "snr_db={} protocol={} SKIP (no Monte Carlo estimate)",
                r.snr_db, r.protocol
            );
            continue;
        }
        let z_ber = (r.ber_dest - r.analytic_ber).abs() / r.ber_dest_ci;
        let z_pout = (r.p_out - r.analytic_pout).abs() / r.p_out_ci;
        let ok = z_ber <= args.tolerance && z_pout <= args.tolerance;
        checked += 1;
        if !ok {
            failures += 1;
        }
        println!(
            "snr_db={} protocol={} ber_z={:.2} pout_z={:.2} {}",
            r.snr_db,
            r.protocol,
            z_ber,
            z_pout,
            if ok { "PASS" } else { "FAIL" }
        );
    }
    ensure!(
        checked > 0,
        "no comparable rows (all lacked references or estimates)"
    );
    if failures > 0 {
        println!(
            "compare: {failures}/{checked} points outside {} intervals",
            args.tolerance
        );
        Ok(3)
    } else {
        println!(
            "compare: {checked}/{checked} points within {} intervals",
            args.tolerance
        );
        Ok(0)
    }
}
