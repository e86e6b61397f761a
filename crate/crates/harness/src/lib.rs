//! Experiment harness for `geodesic-opt`: seeded problem generation, runs of
//! the sphere and `SO(n)` convergence experiments, CSV traces and reports.

pub mod csv;
pub mod random;
pub mod report;
pub mod run;
pub mod spec;

use std::fs;
use std::path::{Path, PathBuf};

use geodesic_opt::eigen::EigenError;
use geodesic_opt::solvers::SolverError;
use thiserror::Error;

pub use report::{Outcome, RunReport};
pub use run::{run, RunOutcome};
pub use spec::{Experiment, ExperimentSpec, Init, Method};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid experiment: {0}")]
    InvalidSpec(String),
    #[error("problem setup failed: {0}")]
    Setup(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl HarnessError {
    /// 3 for failures inside a solver, 1 for usage and I/O problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Solver(_) | HarnessError::Eigen(_) | HarnessError::Setup(_) => 3,
            HarnessError::InvalidSpec(_) | HarnessError::Io(_) => 1,
        }
    }
}

/// Files written for one run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Written {
    pub csv: Option<PathBuf>,
    pub report: PathBuf,
}

/// Writes `<stem>.csv` (when there is a trace) and `<stem>.report.txt` into `dir`.
pub fn write_outputs(dir: &Path, outcome: &RunOutcome) -> Result<Written, HarnessError> {
    fs::create_dir_all(dir)?;
    let stem = outcome.report.spec.file_stem();
    let csv = match &outcome.trace {
        Some((trace, columns)) => {
            let path = dir.join(format!("{stem}.csv"));
            fs::write(&path, csv::trace_to_csv(columns, trace))?;
            Some(path)
        }
        None => None,
    };
    let report = dir.join(format!("{stem}.report.txt"));
    fs::write(&report, outcome.report.to_text())?;
    Ok(Written { csv, report })
}
