//! Experiment plumbing: configuration, versioned artifacts and exit codes.
//!
//! Every artifact is a pure function of the configuration and the input
//! files. JSON artifacts are wrapped in an envelope carrying the schema
//! version and a kind tag; CSV artifacts start with a `schema_version` column.

mod cli;
mod commands;

pub use cli::{Cli, Command, DiagramCmd, GlobalArgs, GrossCmd, LuzinCmd, PosetCmd, PredictCmd, SpeckerCmd, TransformCmd};

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::AlgebraError;
use crate::diagram::DiagramError;
use crate::gross::GrossError;
use crate::luzin::LuzinError;
use crate::poset::PosetError;
use crate::predict::PredictError;
use crate::specker::SpeckerError;
use crate::transforms::TransformError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error("check failed: {0}")]
    CheckFailed(String),
    #[error(transparent)]
    Predict(#[from] PredictError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Specker(#[from] SpeckerError),
    #[error(transparent)]
    Luzin(#[from] LuzinError),
    #[error(transparent)]
    Gross(#[from] GrossError),
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

impl HarnessError {
    /// 1 for usage errors, 3 for an exhausted budget, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Usage(_) => 1,
            HarnessError::Luzin(LuzinError::BudgetExceeded { .. }) => 3,
            _ => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self.exit_code() {
            1 => "usage",
            3 => "budget",
            _ => "domain",
        }
    }
}

/// Everything a run depends on besides its input files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub seed: Option<u64>,
    pub horizon: Option<usize>,
    pub budget_steps: Option<u64>,
    pub out: PathBuf,
    pub command: Command,
}

impl ExperimentConfig {
    pub fn from_cli(cli: Cli) -> Self {
        ExperimentConfig {
            seed: cli.global.seed,
            horizon: cli.global.horizon,
            budget_steps: cli.global.budget_steps,
            out: cli.global.out,
            command: cli.command,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.budget_steps == Some(0) {
            return Err(HarnessError::Usage("--budget-steps must be positive".into()));
        }
        if self.horizon == Some(0) {
            return Err(HarnessError::Usage("--horizon must be positive".into()));
        }
        if self.command.is_randomized() && self.seed.is_none() {
            return Err(HarnessError::Usage("this command is randomized and needs --seed".into()));
        }
        Ok(())
    }

    pub fn require_seed(&self) -> Result<u64, HarnessError> {
        self.seed.ok_or_else(|| HarnessError::Usage("--seed is required".into()))
    }
}

/// What a finished run reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunSummary {
    pub line: String,
    pub artifacts: Vec<PathBuf>,
}

/// Validate the configuration, run the command and write its artifacts.
pub fn run(config: &ExperimentConfig) -> Result<RunSummary, HarnessError> {
    config.validate()?;
    let mut out = Artifacts::new(&config.out)?;
    out.json("config", "config.json", config)?;
    let line = commands::dispatch(config, &mut out)?;
    Ok(RunSummary { line, artifacts: out.written })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub schema_version: u32,
    pub kind: String,
    pub data: T,
}

/// Output directory with a record of what was written, in order.
pub struct Artifacts {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl Artifacts {
    pub fn new(dir: &Path) -> Result<Self, HarnessError> {
        fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
        Ok(Artifacts { dir: dir.to_path_buf(), written: Vec::new() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn json<T: Serialize>(&mut self, kind: &str, name: &str, data: &T) -> Result<PathBuf, HarnessError> {
        let path = self.path(name);
        write_json(&path, kind, data)?;
        self.written.push(path.clone());
        Ok(path)
    }

    pub fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<PathBuf, HarnessError> {
        let path = self.path(name);
        write_csv(&path, header, rows)?;
        self.written.push(path.clone());
        Ok(path)
    }

    pub fn text(&mut self, name: &str, body: &str) -> Result<PathBuf, HarnessError> {
        let path = self.path(name);
        fs::write(&path, body).map_err(|e| io_error(&path, e))?;
        self.written.push(path.clone());
        Ok(path)
    }
}

fn io_error(path: &Path, e: std::io::Error) -> HarnessError {
    HarnessError::Io { path: path.to_path_buf(), message: e.to_string() }
}

fn format_error(path: &Path, e: impl std::fmt::Display) -> HarnessError {
    HarnessError::Format { path: path.to_path_buf(), message: e.to_string() }
}

pub fn write_json<T: Serialize>(path: &Path, kind: &str, data: &T) -> Result<(), HarnessError> {
    let env = Envelope { schema_version: SCHEMA_VERSION, kind: kind.to_string(), data };
    let mut body = serde_json::to_string_pretty(&env).map_err(|e| format_error(path, e))?;
    body.push('\n');
    fs::write(path, body).map_err(|e| io_error(path, e))
}

/// Read either an envelope of the given kind or a bare value.
pub fn read_json<T: DeserializeOwned>(path: &Path, kind: &str) -> Result<T, HarnessError> {
    let body = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    let value: serde_json::Value = serde_json::from_str(&body).map_err(|e| format_error(path, e))?;
    let is_envelope = value.get("schema_version").is_some() && value.get("data").is_some();
    let data = if is_envelope {
        let found = value.get("kind").and_then(|k| k.as_str()).unwrap_or_default();
        if found != kind {
            return Err(format_error(path, format!("expected a `{kind}` artifact, found `{found}`")));
        }
        let version = value["schema_version"].as_u64().unwrap_or_default();
        if version != SCHEMA_VERSION as u64 {
            return Err(format_error(path, format!("unsupported schema version {version}")));
        }
        value["data"].clone()
    } else {
        value
    };
    serde_json::from_value(data).map_err(|e| format_error(path, e))
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| format_error(path, e))?;
    let version = SCHEMA_VERSION.to_string();
    let mut full = vec!["schema_version"];
    full.extend_from_slice(header);
    w.write_record(&full).map_err(|e| format_error(path, e))?;
    for row in rows {
        let record: Vec<&str> = std::iter::once(version.as_str()).chain(row.iter().map(String::as_str)).collect();
        w.write_record(&record).map_err(|e| format_error(path, e))?;
    }
    w.flush().map_err(|e| io_error(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scratch(name: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("evasion-lab-harness-{}-{name}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        dir
    }

    #[test]
    fn envelope_roundtrip_and_bare_values() {
        let dir = scratch("json");
        let p = dir.join("w.json");
        write_json(&p, "word", &vec![1u64, 2, 3]).unwrap();
        let back: Vec<u64> = read_json(&p, "word").unwrap();
        assert_eq!(back, vec![1, 2, 3]);
        assert!(matches!(read_json::<Vec<u64>>(&p, "predictor"), Err(HarnessError::Format { .. })));
        fs::write(dir.join("bare.json"), "[4, 5]").unwrap();
        assert_eq!(read_json::<Vec<u64>>(&dir.join("bare.json"), "word").unwrap(), vec![4, 5]);
    }

    #[test]
    fn csv_has_version_column() {
        let dir = scratch("csv");
        let p = dir.join("t.csv");
        write_csv(&p, &["a", "b"], &[vec!["1".into(), "x".into()]]).unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "schema_version,a,b\n1,1,x\n");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(HarnessError::Usage("x".into()).exit_code(), 1);
        assert_eq!(HarnessError::Luzin(LuzinError::BudgetExceeded { budget: 1 }).exit_code(), 3);
        assert_eq!(HarnessError::Luzin(LuzinError::EmptyWord).exit_code(), 2);
    }
}
