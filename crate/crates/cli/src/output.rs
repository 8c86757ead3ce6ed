//! Stdout emission plus the flat-file archive under the output directory.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use serde::Serialize;

use crate::config::{Format, RunConfig};
use crate::error::{CliError, CliResult};

pub struct Emitter {
    dir: PathBuf,
    stamp: String,
    format: Format,
}

impl Emitter {
    pub fn new(cfg: &RunConfig) -> Self {
        Self {
            dir: cfg.output_dir.clone(),
            stamp: chrono::Utc::now().format("%Y%m%dT%H%M%S%.3fZ").to_string(),
            format: cfg.format,
        }
    }

    fn archive_path(&self, subcommand: &str, ext: &str) -> PathBuf {
        self.dir.join(format!("{}-{subcommand}.{ext}", self.stamp))
    }

    fn write_file(&self, path: &PathBuf, contents: &str) -> CliResult<()> {
        fs::create_dir_all(&self.dir)
            .map_err(|e| CliError::io(format!("creating {}", self.dir.display()), e))?;
        fs::write(path, contents)
            .map_err(|e| CliError::io(format!("writing {}", path.display()), e))
    }

    /// Prints the result (JSON, or the CSV table under `--format csv`) and
    /// archives the JSON and any table.
    pub fn emit<T: Serialize>(
        &self,
        subcommand: &str,
        value: &T,
        table: Option<String>,
    ) -> CliResult<()> {
        let json =
            serde_json::to_string_pretty(value).map_err(|e| CliError::Internal(e.to_string()))?;
        self.write_file(&self.archive_path(subcommand, "json"), &json)?;
        if let Some(table) = &table {
            self.write_file(&self.archive_path(subcommand, "csv"), table)?;
        }
        let body = match (self.format, table) {
            (Format::Csv, Some(table)) => table,
            _ => json + "\n",
        };
        let mut out = std::io::stdout().lock();
        out.write_all(body.as_bytes())
            .and_then(|_| out.flush())
            .map_err(|e| CliError::io("writing stdout", e))
    }
}

/// Renders rows of already-formatted cells as CSV.
pub fn csv_table<I, R>(header: &[&str], rows: I) -> CliResult<String>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut writer = csv::Writer::from_writer(Vec::new());
    let to_err = |e: csv::Error| CliError::Internal(e.to_string());
    writer.write_record(header).map_err(to_err)?;
    for row in rows {
        writer.write_record(row).map_err(to_err)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| CliError::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Internal(e.to_string()))
}
