//! Report files. Each command writes one table (CSV or JSON) and a summary
//! JSON embedding the resolved configuration and its SHA-256.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::args::Format;
use crate::config::CommonConfig;
use crate::error::CliError;

pub struct Reporter {
    dir: PathBuf,
    format: Format,
    command: &'static str,
    config: Value,
    hash: String,
    written: Vec<PathBuf>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

impl Reporter {
    /// `inputs` are extra bytes (such as an input field file) folded into the hash.
    pub fn new(
        command: &'static str,
        common: &CommonConfig,
        config: &impl Serialize,
        inputs: &[u8],
    ) -> Result<Self, CliError> {
        let config = json!({ "common": common, command: config });
        let mut hasher = Sha256::new();
        hasher.update(
            serde_json::to_string(&config)
                .map_err(CliError::numeric)?
                .as_bytes(),
        );
        hasher.update(inputs);
        let hash = hex::encode(hasher.finalize());
        fs::create_dir_all(&common.output_dir).map_err(io_err(&common.output_dir))?;
        Ok(Reporter {
            dir: common.output_dir.clone(),
            format: common.format,
            command,
            config,
            hash,
            written: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn hash(&self) -> &str {
        &self.hash
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    pub fn note(&mut self, path: PathBuf) {
        self.written.push(path);
    }

    pub fn table<R: Serialize>(&mut self, name: &str, rows: &[R]) -> Result<(), CliError> {
        let path = match self.format {
            Format::Csv => {
                let path = self.dir.join(format!("{}_{name}.csv", self.command));
                let mut w = csv::Writer::from_path(&path).map_err(CliError::numeric)?;
                for r in rows {
                    w.serialize(r).map_err(CliError::numeric)?;
                }
                w.flush().map_err(io_err(&path))?;
                path
            }
            Format::Json => {
                let path = self.dir.join(format!("{}_{name}.json", self.command));
                self.write_json(&path, &rows)?;
                path
            }
        };
        self.written.push(path);
        Ok(())
    }

    /// A named JSON artifact next to the table, e.g. a serialized jet.
    pub fn artifact(&mut self, file_name: &str, value: &impl Serialize) -> Result<(), CliError> {
        let path = self.dir.join(file_name);
        self.write_json(&path, value)?;
        self.written.push(path);
        Ok(())
    }

    pub fn summary(&mut self, passed: bool, result: &impl Serialize) -> Result<(), CliError> {
        let path = self.dir.join(format!("{}_summary.json", self.command));
        let body = json!({
            "command": self.command,
            "tool_version": env!("CARGO_PKG_VERSION"),
            "config": self.config,
            "config_sha256": self.hash,
            "passed": passed,
            "result": result,
        });
        self.write_json(&path, &body)?;
        self.written.push(path);
        Ok(())
    }

    fn write_json(&self, path: &Path, value: &impl Serialize) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value).map_err(CliError::numeric)?;
        text.push('\n');
        fs::write(path, text).map_err(io_err(path))
    }
}
