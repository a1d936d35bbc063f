//! Verification runs over the lump library: configuration, suites, JSON
//! reports and CSV artifacts.

pub mod artifacts;
pub mod config;
pub mod oracle;
pub mod report;
pub mod suites;

use std::path::PathBuf;

use thiserror::Error;

use crate::artifacts::{emit_csv, ArtifactError};
use crate::config::{RunConfig, Suite};
use crate::report::{RunReport, SuiteReport};

/// An invalid configuration; nothing has been run or written.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{0}")]
pub struct UsageError(pub String);

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Usage(#[from] UsageError),
    #[error("writing {path}: {source}")]
    Json { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Artifact(#[from] ArtifactError),
}

pub fn run_suite(suite: Suite, cfg: &RunConfig) -> SuiteReport {
    match suite {
        Suite::Exact => suites::exact::run(cfg),
        Suite::Linearized => suites::linearized::run(cfg),
        Suite::Fourier => suites::fourier::run(cfg),
        Suite::Kernel => suites::kernel::run(cfg),
        Suite::All => unreachable!("expanded before dispatch"),
    }
}

/// A finished run together with the CSV files it wrote.
#[derive(Debug)]
pub struct RunOutcome {
    pub report: RunReport,
    pub csv_files: Vec<PathBuf>,
}

/// Validates `cfg`, runs the selected suites in order and writes the JSON
/// report and CSV artifacts that were requested.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome, RunError> {
    cfg.validate()?;
    let suites: Vec<SuiteReport> = cfg.suite.expand().into_iter().map(|s| run_suite(s, cfg)).collect();
    let report = RunReport::new(cfg.clone(), suites);
    let mut csv_files = Vec::new();
    if let Some(dir) = &cfg.output.csv_dir {
        for s in &report.suites {
            csv_files.extend(emit_csv(&s.artifacts, dir)?);
        }
    }
    if let Some(path) = &cfg.output.json {
        report.write_json(path).map_err(|source| RunError::Json { path: path.clone(), source })?;
    }
    Ok(RunOutcome { report, csv_files })
}
