//! Output files: CSV time series and JSON metadata.
//!
//! Every file opens with a comment line carrying the config hash and seed,
//! and every run writes a meta.json with the fully resolved configuration.
//! Floats are written with the shortest round-trip representation, so
//! parse(serialize(x)) == x bit for bit and identical runs produce
//! byte-identical files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use crate::error::CliError;

/// FNV-1a over the canonical JSON of the resolved configuration.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf29ce484222325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

/// Run-level metadata shared by every output file of one invocation.
pub struct RunMeta {
    pub command: &'static str,
    pub seed: u64,
    pub config_hash: String,
    pub resolved: serde_json::Value,
}

impl RunMeta {
    pub fn new(
        command: &'static str,
        seed: u64,
        resolved: impl Serialize,
    ) -> Result<Self, CliError> {
        let resolved = serde_json::to_value(resolved)?;
        let canonical = serde_json::to_string(&resolved)?;
        let config_hash = format!("{:016x}", fnv1a64(canonical.as_bytes()));
        Ok(Self { command, seed, config_hash, resolved })
    }

    fn comment_line(&self) -> String {
        format!(
            "# qtraj {} config_hash={} seed={}",
            self.command, self.config_hash, self.seed
        )
    }

    pub fn write_meta_json(&self, dir: &Path) -> Result<PathBuf, CliError> {
        let value = json!({
            "tool": "qtraj",
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "seed": self.seed,
            "config_hash": self.config_hash,
            "config": self.resolved,
        });
        let path = dir.join("meta.json");
        let mut file = BufWriter::new(File::create(&path)?);
        serde_json::to_writer_pretty(&mut file, &value)?;
        file.write_all(b"\n")?;
        file.flush()?;
        Ok(path)
    }
}

/// CSV writer that stamps the metadata comment and a header row.
pub struct CsvFile {
    writer: BufWriter<File>,
    pub path: PathBuf,
}

impl CsvFile {
    pub fn create(dir: &Path, name: &str, meta: &RunMeta, columns: &str) -> Result<Self, CliError> {
        let path = dir.join(name);
        let mut writer = BufWriter::new(File::create(&path)?);
        writeln!(writer, "{}", meta.comment_line())?;
        writeln!(writer, "{columns}")?;
        Ok(Self { writer, path })
    }

    pub fn row(&mut self, fields: &[CsvField]) -> Result<(), CliError> {
        let mut first = true;
        for field in fields {
            if !first {
                write!(self.writer, ",")?;
            }
            first = false;
            match field {
                CsvField::Int(v) => write!(self.writer, "{v}")?,
                CsvField::Float(v) => write!(self.writer, "{v}")?,
            }
        }
        writeln!(self.writer)?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<PathBuf, CliError> {
        self.writer.flush()?;
        Ok(self.path)
    }
}

pub enum CsvField {
    Int(u64),
    Float(f64),
}

/// Read a CSV produced by this tool: skips comment lines, checks the header,
/// returns the data rows split on commas.
pub fn read_csv(path: &Path, expected_columns: &str) -> Result<Vec<Vec<f64>>, CliError> {
    use crate::error::CliErrorKind;
    let raw = std::fs::read_to_string(path)?;
    let mut rows = Vec::new();
    let mut header_seen = false;
    for line in raw.lines() {
        if line.starts_with('#') || line.is_empty() {
            continue;
        }
        if !header_seen {
            if line != expected_columns {
                return Err(CliError::new(
                    CliErrorKind::Io,
                    format!(
                        "{}: expected columns {expected_columns:?}, found {line:?}",
                        path.display()
                    ),
                ));
            }
            header_seen = true;
            continue;
        }
        let row: Result<Vec<f64>, _> = line.split(',').map(str::parse::<f64>).collect();
        match row {
            Ok(row) => rows.push(row),
            Err(err) => {
                return Err(CliError::new(
                    CliErrorKind::Io,
                    format!("{}: bad row {line:?}: {err}", path.display()),
                ))
            }
        }
    }
    Ok(rows)
}
