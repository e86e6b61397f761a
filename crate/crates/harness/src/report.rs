//! Run summary, serialized as `key = value` lines.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Duration;

use geodesic_opt::convergence::{ConvergenceReport, OrderError};

use crate::csv::format_float;
use crate::spec::{line_search_name, Experiment, ExperimentSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Outcome {
    Converged,
    /// Iteration budget exhausted before the tolerance was met.
    MaxIterations,
    /// A finite-difference check exceeded its target.
    ToleranceBreached,
}

impl Outcome {
    pub fn name(self) -> &'static str {
        match self {
            Outcome::Converged => "converged",
            Outcome::MaxIterations => "max-iterations",
            Outcome::ToleranceBreached => "tolerance-breached",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Converged => 0,
            Outcome::MaxIterations | Outcome::ToleranceBreached => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunReport {
    pub spec: ExperimentSpec,
    pub outcome: Outcome,
    pub final_objective: Option<f64>,
    pub final_error: Option<f64>,
    pub iterations: usize,
    /// Order fit over the pre-stagnation window of the error column.
    pub order: Option<Result<ConvergenceReport<f64>, OrderError>>,
    /// Experiment-specific entries, already formatted.
    pub details: Vec<(String, String)>,
    /// Wall-clock time. Not serialized, so reports stay reproducible.
    pub duration: Duration,
}

impl RunReport {
    pub fn to_text(&self) -> String {
        let s = &self.spec;
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        put("experiment", s.experiment.to_string());
        match s.experiment {
            Experiment::FdCheck => put("method", "all".into()),
            _ => put("method", s.method.to_string()),
        }
        put("seed", s.seed.to_string());
        put("n", s.n.to_string());
        put("init", s.init.to_string());
        put("max_iter", s.max_iter.to_string());
        put("tol", format_float(s.tol));
        put(
            "reset_period",
            s.reset_period.map_or("default".into(), |r| r.to_string()),
        );
        put("line_search", line_search_name(s.line_search).into());
        put("outcome", self.outcome.name().into());
        put("iterations", self.iterations.to_string());
        if let Some(v) = self.final_objective {
            put("final_objective", format_float(v));
        }
        if let Some(v) = self.final_error {
            put("final_error", format_float(v));
        }
        match &self.order {
            Some(Ok(fit)) => {
                put("order", format_float(fit.order));
                put("rate", format_float(fit.rate));
                put("fit_residual", format_float(fit.residual));
                put("fit_window", format!("{}..{}", fit.window.start, fit.window.end));
            }
            Some(Err(e)) => put("order", format!("unavailable ({e})")),
            None => {}
        }
        for (k, v) in &self.details {
            put(k, v.clone());
        }
        out
    }
}

/// Reads `key = value` lines back into a map.
pub fn parse_report(text: &str) -> BTreeMap<String, String> {
    text.lines()
        .filter_map(|l| l.split_once(" = "))
        .map(|(k, v)| (k.to_owned(), v.to_owned()))
        .collect()
}
