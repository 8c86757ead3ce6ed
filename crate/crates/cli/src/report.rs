//! One-shot reproduction report of the headline numbers.

use std::f64::consts::PI;
use std::path::PathBuf;

use casimir_slab::large_area::zero_vertical_branch_lattice_sum;
use casimir_slab::source::{exact_moments, sample_energies, summarize};
use casimir_slab::*;
use clap::Args;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::Emitter;

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Deterministic checks only (the default).
    #[arg(long, conflicts_with = "full")]
    pub quick: bool,
    /// Adds the Monte Carlo checks.
    #[arg(long)]
    pub full: bool,
    /// Replaces the built-in expected-values table (JSON list).
    #[arg(long)]
    pub expected_table: Option<PathBuf>,
    /// Samples per Monte Carlo check.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Records this string as the bundle timestamp (omitted by default so output is reproducible).
    #[arg(long)]
    pub timestamp: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Quick,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Relative,
    Absolute,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectedValue {
    pub name: String,
    pub expected: f64,
    pub tolerance: f64,
    pub metric: Metric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub expected: f64,
    pub computed: f64,
    pub tolerance: f64,
    pub metric: Metric,
    pub pass: bool,
    /// Set when the computation itself failed.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentStamp {
    pub version: String,
    pub seed: u64,
    pub timestamp: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub level: Level,
    pub checks: Vec<CheckRecord>,
    pub all_passed: bool,
    pub environment: EnvironmentStamp,
}

fn rel_riesz(s: f64, lambda: f64) -> f64 {
    (4.0 * PI).powf(-1.5) * special::gamma(s - 1.5) / special::gamma(s) * lambda.powf(1.5 - s)
}

/// Closed forms behind every table entry; the table must agree with them.
fn closed_form(name: &str) -> Option<f64> {
    let riesz = |lambda: f64| 1.0 / (6.0 * PI * PI * lambda);
    Some(match name {
        "riesz_s2.5_lambda0.5" => riesz(0.5),
        "riesz_s2.5_lambda1" => riesz(1.0),
        "riesz_s2.5_lambda10" => riesz(10.0),
        "riesz_s2.5_lambda100" => riesz(100.0),
        "riesz_s3_lambda7" => rel_riesz(3.0, 7.0),
        "te_tm_mismatches_unit_lattice" => 0.0,
        "trace_decomposition_residual" => 0.0,
        "dirichlet_finite_part" => -PI * PI / 1440.0,
        "maxwell_finite_part" => -PI * PI / 720.0,
        "dirichlet_bulk_coefficient" => 1.0 / (8.0 * PI * PI),
        "dirichlet_surface_coefficient" => -1.0 / (32.0 * PI.sqrt()),
        "zero_vertical_branch_L200" => 1.0 / (16.0 * PI.sqrt()),
        "branch_finite_part" => 0.0,
        "mc_z_unit_lattice" => 0.0,
        "mc_single_mode_exact_mean" => 0.5 * (-1.0f64).exp(),
        "mc_z_single_mode" => 0.0,
        _ => return None,
    })
}

fn entry(name: &str, tolerance: f64, metric: Metric) -> ExpectedValue {
    ExpectedValue {
        name: name.to_string(),
        expected: closed_form(name).unwrap_or(f64::NAN),
        tolerance,
        metric,
    }
}

pub fn builtin_table() -> Vec<ExpectedValue> {
    use Metric::*;
    vec![
        entry("riesz_s2.5_lambda0.5", 1e-8, Relative),
        entry("riesz_s2.5_lambda1", 1e-8, Relative),
        entry("riesz_s2.5_lambda10", 1e-8, Relative),
        entry("riesz_s2.5_lambda100", 1e-8, Relative),
        entry("riesz_s3_lambda7", 1e-8, Relative),
        entry("te_tm_mismatches_unit_lattice", 0.0, Absolute),
        entry("trace_decomposition_residual", 1e-12, Absolute),
        entry("dirichlet_finite_part", 1e-5, Relative),
        entry("maxwell_finite_part", 1e-5, Relative),
        entry("dirichlet_bulk_coefficient", 1e-3, Relative),
        entry("dirichlet_surface_coefficient", 1e-3, Relative),
        entry("zero_vertical_branch_L200", 1e-3, Relative),
        entry("branch_finite_part", 0.0, Absolute),
        entry("mc_z_unit_lattice", 4.0, Absolute),
        entry("mc_single_mode_exact_mean", 1e-12, Relative),
        entry("mc_z_single_mode", 4.0, Absolute),
    ]
}

const MC_CHECKS: [&str; 3] = [
    "mc_z_unit_lattice",
    "mc_single_mode_exact_mean",
    "mc_z_single_mode",
];

/// Rejects tables whose entries are unknown, duplicated, missing, or disagree with the closed forms.
pub fn verify_table(table: &[ExpectedValue]) -> CliResult<()> {
    let mut seen = std::collections::BTreeSet::new();
    for e in table {
        let Some(exact) = closed_form(&e.name) else {
            return Err(CliError::Internal(format!(
                "expected-values table: unknown check `{}`",
                e.name
            )));
        };
        if !seen.insert(e.name.as_str()) {
            return Err(CliError::Internal(format!(
                "expected-values table: duplicate check `{}`",
                e.name
            )));
        }
        let consistent = (e.expected - exact).abs() <= 1e-15 * exact.abs() && e.tolerance >= 0.0;
        if !consistent {
            return Err(CliError::Internal(format!(
                "expected-values table is corrupted at `{}`: {} vs closed form {exact}",
                e.name, e.expected
            )));
        }
    }
    for e in builtin_table() {
        if !seen.contains(e.name.as_str()) {
            return Err(CliError::Internal(format!(
                "expected-values table: missing check `{}`",
                e.name
            )));
        }
    }
    Ok(())
}

fn load_table(path: &Option<PathBuf>) -> CliResult<Vec<ExpectedValue>> {
    let table = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::io(format!("reading {}", p.display()), e))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Internal(format!("expected-values table: {e}")))?
        }
        None => builtin_table(),
    };
    verify_table(&table)?;
    Ok(table)
}

struct Context {
    seed: u64,
    samples: usize,
}

fn compute(name: &str, ctx: &Context) -> Result<f64> {
    let quad = QuadratureSettings::with_tolerance(1e-12);
    let riesz = |lambda: f64, s: f64| riesz_integral_numeric(&RieszRequest::new(lambda, s, quad));
    let grid = [1e-2, 5e-3, 2.5e-3];
    let unit = SlabGeometry64::unit_lattice();
    Ok(match name {
        "riesz_s2.5_lambda0.5" => riesz(0.5, 2.5)?,
        "riesz_s2.5_lambda1" => riesz(1.0, 2.5)?,
        "riesz_s2.5_lambda10" => riesz(10.0, 2.5)?,
        "riesz_s2.5_lambda100" => riesz(100.0, 2.5)?,
        "riesz_s3_lambda7" => riesz(7.0, 3.0)?,
        "te_tm_mismatches_unit_lattice" => {
            let r = verify_te_tm_equivalence(&unit, 100.0)?;
            (r.maxwell_total.abs_diff(r.scalar_total) + u64::from(!r.equal)) as f64
        }
        "trace_decomposition_residual" => {
            let mut worst: f64 = 0.0;
            for p in [0.0, 0.5, 1.5] {
                for tau in [0.2, 1.0] {
                    let d = trace_decomposition(&unit, p, tau, 1e-12)?;
                    worst = worst.max(d.residual() / d.maxwell);
                }
            }
            worst
        }
        "dirichlet_finite_part" => {
            finite_part_extrapolate(DensityChannel::DirichletDensity, 1.0, &grid, 1.0)?.finite_part
        }
        "maxwell_finite_part" => {
            finite_part_extrapolate(DensityChannel::MaxwellDensity, 1.0, &grid, 1.0)?.finite_part
        }
        "dirichlet_bulk_coefficient" | "dirichlet_surface_coefficient" => {
            let r = finite_part_extrapolate(DensityChannel::DirichletDensity, 1.0, &grid, 1.0)?;
            let c = if name.contains("bulk") {
                r.bulk_coeff
            } else {
                r.surface_coeff
            };
            c.unwrap_or(f64::NAN)
        }
        "zero_vertical_branch_L200" => zero_vertical_branch_lattice_sum(200.0, 1.0, 1.0)?,
        "branch_finite_part" => zeta_finite_part(DensityChannel::ZeroVerticalBranch, 1.0, 1.0),
        "mc_z_unit_lattice" => {
            let trace = heat_trace(&HeatTraceRequest::new(
                unit,
                OperatorKind::Maxwell,
                0.5,
                1.0,
                1e-10,
            ))?;
            let modes = enumerate_maxwell_spectrum(&unit, trace.cutoff_used)?.weighted();
            let cfg = SourceConfig::new(modes, 1.0)
                .with_seed(ctx.seed)
                .with_samples(ctx.samples);
            let energies = sample_energies(&cfg)?;
            let (_, var) = exact_moments(&cfg.modes, 1.0, 1.0, cfg.convention);
            summarize(&energies, 0.5 * trace.value, var).z_score
        }
        "mc_single_mode_exact_mean" | "mc_z_single_mode" => {
            let cfg = SourceConfig::new(vec![WeightedEigenvalue::new(1.0, 1)], 1.0)
                .with_seed(ctx.seed)
                .with_samples(ctx.samples);
            let est = mc_verify_trace_identity(&cfg)?;
            if name.ends_with("exact_mean") {
                est.exact_mean
            } else {
                est.z_score
            }
        }
        other => {
            return Err(Error::InvalidArgument(format!(
                "no computation for `{other}`"
            )))
        }
    })
}

fn check(e: &ExpectedValue, ctx: &Context) -> CheckRecord {
    let (computed, error) = match compute(&e.name, ctx) {
        Ok(v) => (v, None),
        Err(err) => (f64::NAN, Some(err.to_string())),
    };
    let deviation = match e.metric {
        Metric::Absolute => (computed - e.expected).abs(),
        Metric::Relative => ((computed - e.expected) / e.expected).abs(),
    };
    CheckRecord {
        name: e.name.clone(),
        expected: e.expected,
        computed,
        tolerance: e.tolerance,
        metric: e.metric,
        pass: deviation <= e.tolerance,
        error,
    }
}

pub fn generate_report(
    level: Level,
    table: &[ExpectedValue],
    seed: u64,
    samples: usize,
) -> ReportBundle {
    let ctx = Context { seed, samples };
    let checks: Vec<CheckRecord> = table
        .iter()
        .filter(|e| level == Level::Full || !MC_CHECKS.contains(&e.name.as_str()))
        .map(|e| check(e, &ctx))
        .collect();
    ReportBundle {
        level,
        all_passed: checks.iter().all(|c| c.pass),
        checks,
        environment: EnvironmentStamp {
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            timestamp: None,
        },
    }
}

pub fn report(args: &ReportArgs, cfg: &RunConfig, out: &Emitter) -> CliResult<()> {
    let table = load_table(&args.expected_table)?;
    let level = if args.full { Level::Full } else { Level::Quick };
    let samples = args.samples.or(cfg.file.report.samples).unwrap_or(100_000);
    if samples < 2 {
        return Err(CliError::Usage(
            "report needs at least 2 Monte Carlo samples".into(),
        ));
    }
    let mut bundle = generate_report(level, &table, cfg.seed, samples);
    bundle.environment.timestamp = args.timestamp.clone();
    out.emit("report", &bundle, None)?;
    let failed = bundle.checks.iter().filter(|c| !c.pass).count();
    if failed > 0 {
        return Err(CliError::ChecksFailed {
            failed,
            total: bundle.checks.len(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_table_is_consistent() {
        verify_table(&builtin_table()).unwrap();
    }

    #[test]
    fn corrupted_table_is_rejected() {
        let mut table = builtin_table();
        table[7].expected *= 1.001;
        assert!(matches!(verify_table(&table), Err(CliError::Internal(_))));
        let mut short = builtin_table();
        short.pop();
        assert!(verify_table(&short).is_err());
    }

    #[test]
    fn closed_forms_match_literature_values() {
        assert!(
            (closed_form("maxwell_finite_part").unwrap() + 0.013_707_783_890_401_885).abs() < 1e-17
        );
        assert!(
            (closed_form("mc_single_mode_exact_mean").unwrap() - 0.183_939_720_585_721_17).abs()
                < 1e-16
        );
        let s3 = closed_form("riesz_s3_lambda7").unwrap();
        // Γ(3/2)/Γ(3) = √π/4
        assert!((s3 - (4.0 * PI).powf(-1.5) * PI.sqrt() / 4.0 * 7f64.powf(-1.5)).abs() < 1e-18);
    }

    #[test]
    fn quick_report_passes() {
        let bundle = generate_report(Level::Quick, &builtin_table(), 42, 1000);
        assert!(
            bundle.all_passed,
            "{:#?}",
            bundle.checks.iter().filter(|c| !c.pass).collect::<Vec<_>>()
        );
        assert!(bundle
            .checks
            .iter()
            .any(|c| c.name == "maxwell_finite_part"));
        assert!(bundle
            .checks
            .iter()
            .all(|c| !MC_CHECKS.contains(&c.name.as_str())));
    }
}
