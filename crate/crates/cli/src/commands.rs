use std::fs::File;
use std::path::PathBuf;

use casimir_slab::heat_trace::HeatTraceResult;
use casimir_slab::large_area::{in_expansion_regime, FinitePartRow};
use casimir_slab::riesz::{riesz_compare, RieszComparison};
use casimir_slab::source::{exact_moments, sample_energies, summarize};
use casimir_slab::spectrum::read_weighted_csv;
use casimir_slab::*;
use clap::Args;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::{csv_table, Emitter};

fn parse_enum<T: std::str::FromStr<Err = Error>>(text: Option<&str>, default: T) -> CliResult<T> {
    match text {
        Some(t) => Ok(t.parse()?),
        None => Ok(default),
    }
}

fn pick<T: Copy>(flag: Option<T>, file: Option<T>, fallback: T) -> T {
    flag.or(file).unwrap_or(fallback)
}

fn require<T: Copy>(flag: Option<T>, file: Option<T>, name: &str) -> CliResult<T> {
    flag.or(file)
        .ok_or_else(|| CliError::Usage(format!("missing required parameter --{name}")))
}

fn open(path: &PathBuf) -> CliResult<File> {
    File::open(path).map_err(|e| CliError::io(format!("opening {}", path.display()), e))
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    /// Spectral cutoff Λ (inclusive).
    #[arg(long)]
    pub lambda_max: Option<f64>,
    /// maxwell, dirichlet, neumann or neumann-reduced.
    #[arg(long)]
    pub operator: Option<String>,
}

pub fn spectrum(args: &SpectrumArgs, cfg: &RunConfig, out: &Emitter) -> CliResult<()> {
    let section = &cfg.file.spectrum;
    let lambda_max = require(args.lambda_max, section.lambda_max, "lambda-max")?;
    let kind = parse_enum(
        args.operator.as_deref().or(section.operator.as_deref()),
        OperatorKind::Maxwell,
    )?;
    let spec = enumerate_spectrum(&cfg.geometry, kind, lambda_max)?;
    let mut table = Vec::new();
    spec.write_csv(&mut table)?;
    let table = String::from_utf8(table).map_err(|e| CliError::Internal(e.to_string()))?;
    out.emit("spectrum", &spec, Some(table))
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    /// Absolute tolerance on the certified tail.
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub operator: Option<String>,
    /// CSV file with columns `p,tau`; one trace per row.
    #[arg(long)]
    pub batch: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceOutput {
    pub operator: OperatorKind,
    pub p: f64,
    pub tau: f64,
    pub tolerance: f64,
    pub result: HeatTraceResult<f64>,
}

#[derive(Deserialize)]
struct BatchRow {
    p: f64,
    tau: f64,
}

pub fn trace(args: &TraceArgs, cfg: &RunConfig, out: &Emitter) -> CliResult<()> {
    let section = &cfg.file.trace;
    let kind = parse_enum(
        args.operator.as_deref().or(section.operator.as_deref()),
        OperatorKind::Maxwell,
    )?;
    let tolerance = pick(args.tolerance, section.tolerance, 1e-10);
    let run = |p: f64, tau: f64| -> CliResult<TraceOutput> {
        let result = heat_trace(&HeatTraceRequest::new(
            cfg.geometry,
            kind,
            p,
            tau,
            tolerance,
        ))?;
        Ok(TraceOutput {
            operator: kind,
            p,
            tau,
            tolerance,
            result,
        })
    };
    let rows = match &args.batch {
        Some(path) => {
            let mut reader = csv::ReaderBuilder::new()
                .trim(csv::Trim::All)
                .from_reader(open(path)?);
            let pairs: Vec<BatchRow> = reader
                .deserialize()
                .collect::<Result<_, _>>()
                .map_err(|e| CliError::Usage(format!("batch file: {e}")))?;
            pairs
                .iter()
                .map(|r| run(r.p, r.tau))
                .collect::<CliResult<Vec<_>>>()?
        }
        None => vec![run(
            require(args.p, section.p, "p")?,
            require(args.tau, section.tau, "tau")?,
        )?],
    };
    let table = csv_table(
        &[
            "p",
            "tau",
            "value",
            "tail_bound",
            "cutoff_used",
            "term_count",
        ],
        rows.iter().map(|r| {
            vec![
                r.p.to_string(),
                r.tau.to_string(),
                r.result.value.to_string(),
                r.result.tail_bound.to_string(),
                r.result.cutoff_used.to_string(),
                r.result.term_count.to_string(),
            ]
        }),
    )?;
    if args.batch.is_some() {
        out.emit("trace", &rows, Some(table))
    } else {
        out.emit("trace", &rows[0], Some(table))
    }
}

#[derive(Debug, Args)]
pub struct EquivalenceArgs {
    #[arg(long)]
    pub lambda_max: Option<f64>,
}

pub fn equivalence(args: &EquivalenceArgs, cfg: &RunConfig, out: &Emitter) -> CliResult<()> {
    let lambda_max = pick(args.lambda_max, cfg.file.equivalence.lambda_max, 100.0);
    let report = verify_te_tm_equivalence(&cfg.geometry, lambda_max)?;
    out.emit("equivalence", &report, None)
}

#[derive(Debug, Args)]
pub struct RieszArgs {
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Exponent, s > 3/2 (default 5/2).
    #[arg(long)]
    pub s: Option<f64>,
    /// Gaussian mollifier width; omitted means the unmollified integral.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Quadrature relative tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
}

pub fn riesz(args: &RieszArgs, cfg: &RunConfig, out: &Emitter) -> CliResult<()> {
    let section = &cfg.file.riesz;
    let lambda = require(args.lambda, section.lambda, "lambda")?;
    let s = pick(args.s, section.s, 2.5);
    let tol = pick(args.tol, section.tol, 1e-12);
    let quad = QuadratureSettings::with_tolerance(tol);
    let cmp: RieszComparison<f64> =
        riesz_compare(lambda, s, args.epsilon.or(section.epsilon), &quad)?;
    out.emit("riesz", &cmp, None)
}

#[derive(Debug, Args)]
pub struct McArgs {
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// complex (default) or real.
    #[arg(long)]
    pub convention: Option<String>,
    /// CSV spectrum with columns `lambda,mult` instead of the slab geometry.
    #[arg(long)]
    pub synthetic: Option<PathBuf>,
    /// Tail tolerance used to truncate the slab spectrum.
    #[arg(long)]
    pub truncation: Option<f64>,
    /// Archive the per-sample energies as CSV.
    #[arg(long)]
    pub dump: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McOutput {
    pub tau: f64,
    pub seed: u64,
    pub convention: GaussianConvention,
    pub mode_count: usize,
    /// Spectral cutoff of the truncated slab spectrum; absent for synthetic input.
    pub cutoff: Option<f64>,
    pub tail_bound: Option<f64>,
    pub estimate: McEstimate<f64>,
}

pub fn mc(args: &McArgs, cfg: &RunConfig, out: &Emitter) -> CliResult<()> {
    let section = &cfg.file.mc;
    let tau = require(args.tau, section.tau, "tau")?;
    let samples = pick(args.samples, section.samples, 100_000);
    let convention = parse_enum(
        args.convention.as_deref().or(section.convention.as_deref()),
        GaussianConvention::ComplexCircular,
    )?;
    let (modes, cutoff, tail) = match &args.synthetic {
        Some(path) => (read_weighted_csv(open(path)?)?, None, None),
        None => {
            let truncation = pick(args.truncation, section.truncation, 1e-10);
            let trace = heat_trace(&HeatTraceRequest::new(
                cfg.geometry,
                OperatorKind::Maxwell,
                0.5,
                tau,
                truncation,
            ))?;
            let modes = enumerate_maxwell_spectrum(&cfg.geometry, trace.cutoff_used)?.weighted();
            (
                modes,
                Some(trace.cutoff_used),
                Some(0.5 * cfg.hbar_c * trace.tail_bound),
            )
        }
    };
    let source = SourceConfig::new(modes, tau)
        .with_seed(cfg.seed)
        .with_samples(samples)
        .with_convention(convention)
        .with_hbar_c(cfg.hbar_c)
        .with_coupling(cfg.g);
    let energies = sample_energies(&source)?;
    let (mean, var) = exact_moments(&source.modes, tau, cfg.hbar_c, convention);
    let output = McOutput {
        tau,
        seed: cfg.seed,
        convention,
        mode_count: source.modes.len(),
        cutoff,
        tail_bound: tail,
        estimate: summarize(&energies, mean, var),
    };
    let table = if args.dump {
        Some(csv_table(
            &["sample", "energy"],
            energies
                .iter()
                .enumerate()
                .map(|(i, u)| vec![i.to_string(), u.to_string()]),
        )?)
    } else {
        None
    };
    out.emit("mc", &output, table)
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    /// dirichlet, neumann-reduced, branch or maxwell.
    #[arg(long)]
    pub channel: Option<String>,
    #[arg(long)]
    pub tau: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityOutput {
    pub channel: DensityChannel,
    pub plate_gap: f64,
    pub tau: f64,
    pub hbar_c: f64,
    pub density: f64,
    pub subtracted: f64,
    pub closed_form_finite_part: f64,
    pub in_expansion_regime: bool,
}

pub fn density(args: &DensityArgs, cfg: &RunConfig, out: &Emitter) -> CliResult<()> {
    let section = &cfg.file.density;
    let channel = parse_enum(
        args.channel.as_deref().or(section.channel.as_deref()),
        DensityChannel::MaxwellDensity,
    )?;
    let tau = require(args.tau, section.tau, "tau")?;
    let a = cfg.geometry.plate_gap();
    let density = channel_density(&DensityRequest::new(channel, a, tau).with_hbar_c(cfg.hbar_c))?;
    let regime = in_expansion_regime(a, tau);
    if !regime {
        eprintln!(
            "warning: tau = {tau} exceeds a^2 = {}; the short-time expansion is not accurate here",
            a * a
        );
    }
    let output = DensityOutput {
        channel,
        plate_gap: a,
        tau,
        hbar_c: cfg.hbar_c,
        density,
        subtracted: subtract_divergences(channel, a, tau, cfg.hbar_c)?,
        closed_form_finite_part: zeta_finite_part(channel, a, cfg.hbar_c),
        in_expansion_regime: regime,
    };
    out.emit("density", &output, None)
}

#[derive(Debug, Args)]
pub struct FinitePartArgs {
    #[arg(long)]
    pub channel: Option<String>,
    /// Largest τ of the halving grid.
    #[arg(long)]
    pub tau_start: Option<f64>,
    /// Number of grid points.
    #[arg(long)]
    pub levels: Option<usize>,
}

pub fn finite_part(args: &FinitePartArgs, cfg: &RunConfig, out: &Emitter) -> CliResult<()> {
    let section = &cfg.file.finite_part;
    let channel = parse_enum(
        args.channel.as_deref().or(section.channel.as_deref()),
        DensityChannel::MaxwellDensity,
    )?;
    let tau_start = pick(args.tau_start, section.tau_start, 1e-2);
    let levels = pick(args.levels, section.levels, 3);
    let a = cfg.geometry.plate_gap();
    if !in_expansion_regime(a, tau_start) {
        eprintln!("warning: tau-start = {tau_start} exceeds a^2 = {}", a * a);
    }
    let grid = large_area::halving_grid(tau_start, levels);
    let result = finite_part_extrapolate(channel, a, &grid, cfg.hbar_c)?;
    if !result.converging {
        eprintln!("warning: successive extrapolants are not shrinking; refine the tau grid");
    }
    let table = csv_table(
        &["tau", "raw_density", "remainder", "extrapolant"],
        result.rows.iter().map(|r: &FinitePartRow<f64>| {
            vec![
                r.tau.to_string(),
                r.raw_density.to_string(),
                r.remainder.to_string(),
                r.extrapolant.to_string(),
            ]
        }),
    )?;
    out.emit("finite-part", &result, Some(table))
}
