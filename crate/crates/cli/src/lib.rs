//! Subcommands behind the `hypthick` binary. Each command returns an
//! [`Outcome`]: a JSON result, a pass flag and the files to write, so runs can
//! be compared byte for byte without touching the filesystem.

pub mod commands;
pub mod config;

use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use hypthick::arithmetic::ArithmeticError;
use hypthick::embedding::EmbeddingError;
use hypthick::group::GroupError;
use hypthick::io::IoError;
use hypthick::scaling::ScalingError;
use hypthick::skeleton::SkeletonError;
use hypthick::voronoi::VoronoiError;

pub use config::RunConfig;

pub const REPORT_FORMAT: &str = "hypthick-report";
pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    File { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Format { path: PathBuf, source: IoError },
    #[error("config: {0}")]
    Config(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Voronoi(#[from] VoronoiError),
    #[error(transparent)]
    Skeleton(#[from] SkeletonError),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
    #[error(transparent)]
    Arithmetic(#[from] ArithmeticError),
    #[error(transparent)]
    Scaling(#[from] ScalingError),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;

pub fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::File {
        path: path.to_path_buf(),
        source,
    })
}

/// Result of one command.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub command: &'static str,
    pub pass: bool,
    pub result: serde_json::Value,
    /// Artifacts to write, paths not yet resolved against the config.
    pub files: Vec<(PathBuf, String)>,
}

#[derive(Serialize)]
struct Envelope<'a> {
    format: &'static str,
    version: u32,
    command: &'a str,
    pass: bool,
    config: &'a RunConfig,
    result: &'a serde_json::Value,
}

impl Outcome {
    pub fn new(command: &'static str, pass: bool, result: impl Serialize) -> Self {
        Self {
            command,
            pass,
            result: serde_json::to_value(result).expect("reports serialize"),
            files: Vec::new(),
        }
    }

    pub fn with_file(mut self, path: Option<&Path>, contents: String) -> Self {
        if let Some(p) = path {
            self.files.push((p.to_path_buf(), contents));
        }
        self
    }

    /// Pretty JSON with the full configuration echoed.
    pub fn report(&self, config: &RunConfig) -> String {
        let env = Envelope {
            format: REPORT_FORMAT,
            version: REPORT_VERSION,
            command: self.command,
            pass: self.pass,
            config,
            result: &self.result,
        };
        let mut s = serde_json::to_string_pretty(&env).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            2
        }
    }

    pub fn write_files(&self, config: &RunConfig) -> Result<()> {
        for (p, text) in &self.files {
            let p = config.resolve(p);
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|source| CliError::File {
                    path: dir.to_path_buf(),
                    source,
                })?;
            }
            std::fs::write(&p, text).map_err(|source| CliError::File { path: p.clone(), source })?;
        }
        Ok(())
    }
}

/// CSV text from a header and rows.
pub fn csv_table(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv of utf-8 fields"))
}
