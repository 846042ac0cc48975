//! Config-driven experiment runner with replayable reports.

mod config;
mod exec;

use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use config::{
    BreakpointConfig, DeltaSpec, Expect, ExperimentConfig, HahnConfig, IctConfig, InpConfig, Kind, PadicConfig,
    QeConfig, VcConfig, SCHEMA_VERSION,
};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(String),
    #[error("budget exhausted: {0}")]
    Budget(String),
    #[error("corrupt report: {0}")]
    CorruptReport(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    /// 2 for config and budget problems; everything else is also fatal.
    pub fn exit_code(&self) -> i32 {
        2
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Check {
        Check { name: name.into(), passed, detail: detail.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub kind: String,
    pub name: String,
    pub passed: bool,
    pub elapsed_ms: u64,
    pub checks: Vec<Check>,
    pub counterexamples: Vec<String>,
    /// Human-readable notes, one line each.
    pub notes: Vec<String>,
    pub config: String,
    pub csv: String,
}

impl RunReport {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("report serializes")
    }

    pub fn from_toml(text: &str) -> Result<RunReport, RunError> {
        toml::from_str(text).map_err(|e| RunError::CorruptReport(e.to_string()))
    }

    pub fn summary(&self) -> String {
        let mut out = format!(
            "{} {}: {} ({} ms)\n",
            self.kind,
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.elapsed_ms
        );
        for c in &self.checks {
            out.push_str(&format!("  [{}] {}: {}\n", if c.passed { "pass" } else { "FAIL" }, c.name, c.detail));
        }
        for n in &self.notes {
            out.push_str(&format!("  {n}\n"));
        }
        for c in self.counterexamples.iter().take(10) {
            out.push_str(&format!("  counterexample: {c}\n"));
        }
        out
    }

    /// Writes `<stem>.report.toml` and `<stem>.csv`.
    pub fn write(&self, stem: &Path) -> Result<(), RunError> {
        std::fs::write(stem.with_extension("report.toml"), self.to_toml())?;
        std::fs::write(stem.with_extension("csv"), &self.csv)?;
        Ok(())
    }
}

/// Partial outcome filled in by the experiment executors.
#[derive(Default)]
pub(crate) struct Outcome {
    pub checks: Vec<Check>,
    pub counterexamples: Vec<String>,
    pub notes: Vec<String>,
    pub csv: String,
}

/// Runs on a dedicated pool when `workers` is given. Results do not depend
/// on the number of workers.
pub fn run(config: &ExperimentConfig, workers: Option<usize>) -> Result<RunReport, RunError> {
    config.validate()?;
    let start = Instant::now();
    let outcome = match workers {
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| RunError::Config(format!("worker pool: {e}")))?;
            pool.install(|| exec::execute(config))?
        }
        None => exec::execute(config)?,
    };
    Ok(RunReport {
        kind: config.kind.as_str().to_string(),
        name: config.name.clone().unwrap_or_else(|| config.kind.as_str().to_string()),
        passed: outcome.checks.iter().all(|c| c.passed),
        elapsed_ms: start.elapsed().as_millis() as u64,
        checks: outcome.checks,
        counterexamples: outcome.counterexamples,
        notes: outcome.notes,
        config: config.to_toml(),
        csv: outcome.csv,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReplayOutcome {
    pub report: RunReport,
    /// `line N: recorded | replayed` for every differing CSV line.
    pub diffs: Vec<String>,
}

pub fn replay_text(text: &str, workers: Option<usize>) -> Result<ReplayOutcome, RunError> {
    let recorded = RunReport::from_toml(text)?;
    let config = ExperimentConfig::from_toml(&recorded.config)
        .map_err(|e| RunError::CorruptReport(format!("config echo: {e}")))?;
    let report = run(&config, workers)?;
    let old: Vec<&str> = recorded.csv.lines().collect();
    let new: Vec<&str> = report.csv.lines().collect();
    let mut diffs = Vec::new();
    for i in 0..old.len().max(new.len()) {
        let (a, b) = (old.get(i).copied().unwrap_or("<missing>"), new.get(i).copied().unwrap_or("<missing>"));
        if a != b {
            diffs.push(format!("line {}: {a} | {b}", i + 1));
        }
    }
    if diffs.is_empty() && recorded.csv != report.csv {
        diffs.push("trailing newline differs".into());
    }
    Ok(ReplayOutcome { report, diffs })
}

pub fn replay(path: &Path, workers: Option<usize>) -> Result<ReplayOutcome, RunError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| RunError::CorruptReport(format!("{}: {e}", path.display())))?;
    replay_text(&text, workers)
}
