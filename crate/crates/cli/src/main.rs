mod commands;
mod config;
mod error;
mod output;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{FileConfig, Format, GlobalOverrides, RunConfig, OUTPUT_DIR_ENV};
use error::{CliError, CliResult};
use output::Emitter;

/// Spectral traces, TE/TM equivalence and parallel-plate finite parts for a
/// conducting slab on a square lateral torus.
#[derive(Debug, Parser)]
#[command(name = "casimir-slab", version, about, allow_negative_numbers = true)]
struct Cli {
    /// `key = value` configuration file with optional per-subcommand sections.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Caps the worker thread count.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true)]
    hbar_c: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Mediator coupling κ; the source coupling is g = κ/(6π²).
    #[arg(long, global = true, conflicts_with = "g")]
    kappa: Option<f64>,
    #[arg(long, global = true)]
    g: Option<f64>,
    /// Lateral period L.
    #[arg(long = "L", global = true, value_name = "L")]
    lateral_size: Option<f64>,
    /// Plate separation a.
    #[arg(long = "a", global = true, value_name = "A")]
    plate_gap: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Enumerate an operator spectrum up to a cutoff.
    #[command(allow_negative_numbers = true)]
    Spectrum(commands::SpectrumArgs),
    /// Certified heat-regulated trace Tr(L^p e^{-τL}).
    #[command(allow_negative_numbers = true)]
    Trace(commands::TraceArgs),
    /// Check Maxwell = Dirichlet ⊔ reduced Neumann up to a cutoff.
    #[command(allow_negative_numbers = true)]
    Equivalence(commands::EquivalenceArgs),
    /// Transverse Riesz integral against its closed form.
    #[command(allow_negative_numbers = true)]
    Riesz(commands::RieszArgs),
    /// Monte Carlo check of the Gaussian-source trace identity.
    #[command(allow_negative_numbers = true)]
    Mc(commands::McArgs),
    /// Large-area regulated energy density of one channel.
    #[command(allow_negative_numbers = true)]
    Density(commands::DensityArgs),
    /// Richardson extraction of the interaction finite part.
    #[command(name = "finite-part", allow_negative_numbers = true)]
    FinitePart(commands::FinitePartArgs),
    /// Reproduce the headline numbers.
    Report(report::ReportArgs),
}

fn run(cli: Cli) -> CliResult<()> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let flags = GlobalOverrides {
        lateral_size: cli.lateral_size,
        plate_gap: cli.plate_gap,
        hbar_c: cli.hbar_c,
        g: cli.g,
        kappa: cli.kappa,
        seed: cli.seed,
        output_dir: cli.output_dir.clone(),
        format: cli.format,
        threads: cli.threads,
    };
    let env_dir = std::env::var_os(OUTPUT_DIR_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from);
    let cfg = RunConfig::resolve(file, &flags, env_dir)?;
    if let Some(n) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Internal(e.to_string()))?;
    }
    let out = Emitter::new(&cfg);
    match &cli.command {
        Command::Spectrum(args) => commands::spectrum(args, &cfg, &out),
        Command::Trace(args) => commands::trace(args, &cfg, &out),
        Command::Equivalence(args) => commands::equivalence(args, &cfg, &out),
        Command::Riesz(args) => commands::riesz(args, &cfg, &out),
        Command::Mc(args) => commands::mc(args, &cfg, &out),
        Command::Density(args) => commands::density(args, &cfg, &out),
        Command::FinitePart(args) => commands::finite_part(args, &cfg, &out),
        Command::Report(args) => report::report(args, &cfg, &out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let text = e.to_string();
            let first = text.lines().next().unwrap_or_default();
            let err = CliError::Usage(first.trim_start_matches("error: ").to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(err.exit_code());
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", err.to_json());
            ExitCode::from(err.exit_code())
        }
    }
}
