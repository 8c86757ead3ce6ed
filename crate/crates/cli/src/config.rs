//! Run configuration: built-in defaults, then a `key = value` file, then the
//! environment, then command-line flags.

use std::path::{Path, PathBuf};

use casimir_slab::riesz::mediator_coupling;
use casimir_slab::SlabGeometry64;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const OUTPUT_DIR_ENV: &str = "CASIMIR_SLAB_OUTPUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSection {
    pub lambda_max: Option<f64>,
    pub operator: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceSection {
    pub p: Option<f64>,
    pub tau: Option<f64>,
    pub tolerance: Option<f64>,
    pub operator: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquivalenceSection {
    pub lambda_max: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RieszSection {
    pub lambda: Option<f64>,
    pub s: Option<f64>,
    pub epsilon: Option<f64>,
    pub tol: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSection {
    pub tau: Option<f64>,
    pub samples: Option<usize>,
    pub convention: Option<String>,
    pub truncation: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensitySection {
    pub channel: Option<String>,
    pub tau: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FinitePartSection {
    pub channel: Option<String>,
    pub tau_start: Option<f64>,
    pub levels: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportSection {
    pub samples: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(rename = "L", alias = "lateral_size")]
    pub lateral_size: Option<f64>,
    #[serde(alias = "plate_gap")]
    pub a: Option<f64>,
    pub hbar_c: Option<f64>,
    pub g: Option<f64>,
    pub kappa: Option<f64>,
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub format: Option<Format>,
    pub threads: Option<usize>,
    #[serde(default)]
    pub spectrum: SpectrumSection,
    #[serde(default)]
    pub trace: TraceSection,
    #[serde(default)]
    pub equivalence: EquivalenceSection,
    #[serde(default)]
    pub riesz: RieszSection,
    #[serde(default)]
    pub mc: McSection,
    #[serde(default)]
    pub density: DensitySection,
    #[serde(default, rename = "finite-part", alias = "finite_part")]
    pub finite_part: FinitePartSection,
    #[serde(default)]
    pub report: ReportSection,
}

impl FileConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("config file: {}", e.message())))
    }
}

/// Global settings shared by every subcommand.
#[derive(Debug, Clone, Default)]
pub struct GlobalOverrides {
    pub lateral_size: Option<f64>,
    pub plate_gap: Option<f64>,
    pub hbar_c: Option<f64>,
    pub g: Option<f64>,
    pub kappa: Option<f64>,
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub format: Option<Format>,
    pub threads: Option<usize>,
}

#[derive(Debug)]
pub struct RunConfig {
    pub geometry: SlabGeometry64,
    pub hbar_c: f64,
    pub g: f64,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub format: Format,
    pub threads: Option<usize>,
    pub file: FileConfig,
}

fn coupling(g: Option<f64>, kappa: Option<f64>) -> CliResult<Option<f64>> {
    match (g, kappa) {
        (Some(_), Some(_)) => Err(CliError::Usage("give either g or kappa, not both".into())),
        (Some(g), None) => Ok(Some(g)),
        (None, Some(k)) => Ok(Some(mediator_coupling(k))),
        (None, None) => Ok(None),
    }
}

impl RunConfig {
    pub fn resolve(
        file: FileConfig,
        flags: &GlobalOverrides,
        env_output_dir: Option<PathBuf>,
    ) -> CliResult<Self> {
        let l = flags
            .lateral_size
            .or(file.lateral_size)
            .unwrap_or(2.0 * std::f64::consts::PI);
        let a = flags.plate_gap.or(file.a).unwrap_or(std::f64::consts::PI);
        let geometry = SlabGeometry64::new(l, a)?;
        let hbar_c = flags.hbar_c.or(file.hbar_c).unwrap_or(1.0);
        if !(hbar_c > 0.0 && hbar_c.is_finite()) {
            return Err(CliError::Usage(format!(
                "hbar_c must be positive, got {hbar_c}"
            )));
        }
        let g = coupling(flags.g, flags.kappa)?
            .or(coupling(file.g, file.kappa)?)
            .unwrap_or(1.0);
        if !(g > 0.0 && g.is_finite()) {
            return Err(CliError::Usage(format!(
                "coupling must be positive, got {g}"
            )));
        }
        let output_dir = flags
            .output_dir
            .clone()
            .or(env_output_dir)
            .or(file.output_dir.clone())
            .unwrap_or_else(|| PathBuf::from("casimir-slab-runs"));
        if flags.threads.or(file.threads) == Some(0) {
            return Err(CliError::Usage("threads must be at least 1".into()));
        }
        Ok(Self {
            geometry,
            hbar_c,
            g,
            seed: flags.seed.or(file.seed).unwrap_or(42),
            output_dir,
            format: flags.format.or(file.format).unwrap_or_default(),
            threads: flags.threads.or(file.threads),
            file,
        })
    }
}
