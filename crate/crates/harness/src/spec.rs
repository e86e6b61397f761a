//! What to run: experiment, method, problem size, start and solver knobs.

use std::fmt;
use std::str::FromStr;

use geodesic_opt::solvers::LineSearchKind;

use crate::HarnessError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Experiment {
    /// Rayleigh's quotient on the sphere, `Q = diag(n, …, 1)`.
    Fig1,
    /// Brockett's function on `SO(n)`, `N = diag(n, …, 1)`, seeded `Q`.
    Fig2,
    /// `tr Hπ(H)` on `SO(n)`.
    Jacobi,
    /// Finite-difference check of gradients and Hessians.
    FdCheck,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Fig1 => "fig1",
            Experiment::Fig2 => "fig2",
            Experiment::Jacobi => "jacobi",
            Experiment::FdCheck => "fd-check",
        }
    }

    /// Methods run when none is requested.
    pub fn default_methods(self) -> &'static [Method] {
        match self {
            Experiment::Fig1 => &[Method::Sd, Method::Cg, Method::NewtonRq],
            Experiment::Fig2 => &[Method::Sd, Method::Cg, Method::Newton],
            Experiment::Jacobi => &[Method::Newton],
            Experiment::FdCheck => &[Method::Newton],
        }
    }

    fn supports(self, method: Method) -> bool {
        match self {
            Experiment::Fig1 | Experiment::FdCheck => true,
            Experiment::Fig2 | Experiment::Jacobi => {
                matches!(method, Method::Sd | Method::Cg | Method::Newton)
            }
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// Steepest descent (ascent for the maximization problems).
    Sd,
    /// Conjugate gradient. On the sphere this is the closed-form extreme
    /// eigenvector iteration.
    Cg,
    /// Newton's method through the generic solver.
    Newton,
    /// Rayleigh quotient iteration.
    Rqi,
    /// Newton's method for Rayleigh's quotient with shifted solves.
    NewtonRq,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Sd => "sd",
            Method::Cg => "cg",
            Method::Newton => "newton",
            Method::Rqi => "rqi",
            Method::NewtonRq => "newton-rq",
        }
    }

    fn is_newton_like(self) -> bool {
        matches!(self, Method::Newton | Method::Rqi | Method::NewtonRq)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "sd" => Ok(Method::Sd),
            "cg" => Ok(Method::Cg),
            "newton" => Ok(Method::Newton),
            "rqi" => Ok(Method::Rqi),
            "newton-rq" => Ok(Method::NewtonRq),
            _ => Err(format!("unknown method {s:?} (expected sd, cg, newton, rqi or newton-rq)")),
        }
    }
}

/// Starting point: uniform random, or a geodesic step of length `ε` from
/// the optimum in a random unit direction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Init {
    Random,
    Near(f64),
}

impl fmt::Display for Init {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Init::Random => f.write_str("random"),
            Init::Near(eps) => write!(f, "near:{eps:e}"),
        }
    }
}

impl FromStr for Init {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "random" {
            return Ok(Init::Random);
        }
        let eps = s
            .strip_prefix("near:")
            .ok_or_else(|| format!("expected random or near:<eps>, got {s:?}"))?;
        let eps: f64 = eps.parse().map_err(|e| format!("bad perturbation {eps:?}: {e}"))?;
        Ok(Init::Near(eps))
    }
}

pub fn parse_line_search(s: &str) -> Result<LineSearchKind, String> {
    match s {
        "exact" => Ok(LineSearchKind::Exact),
        "golden" => Ok(LineSearchKind::Golden),
        "estimate" => Ok(LineSearchKind::Estimate),
        _ => Err(format!("unknown line search {s:?} (expected exact, golden or estimate)")),
    }
}

pub fn line_search_name(kind: LineSearchKind) -> &'static str {
    match kind {
        LineSearchKind::Exact => "exact",
        LineSearchKind::Golden => "golden",
        LineSearchKind::Estimate => "estimate",
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub experiment: Experiment,
    /// Problem size. For `fd-check`, zero keeps each family's default size.
    pub n: usize,
    pub method: Method,
    pub seed: u64,
    pub init: Init,
    pub max_iter: usize,
    /// Gradient-norm tolerance for the generic solvers; eigenresidual
    /// tolerance relative to `‖Q‖_F` for the eigensolvers.
    pub tol: f64,
    pub reset_period: Option<usize>,
    pub line_search: LineSearchKind,
}

impl ExperimentSpec {
    /// The defaults for `experiment` run with `method`.
    pub fn new(experiment: Experiment, method: Method, seed: u64) -> Self {
        let n = match experiment {
            Experiment::Fig1 => 21,
            Experiment::Fig2 => 10,
            Experiment::Jacobi => 5,
            Experiment::FdCheck => 0,
        };
        let init = match experiment {
            Experiment::Fig1 if method.is_newton_like() => Init::Near(1e-1),
            Experiment::Fig1 | Experiment::FdCheck => Init::Random,
            Experiment::Fig2 if method == Method::Newton => Init::Near(1e-2),
            Experiment::Fig2 | Experiment::Jacobi => Init::Near(1e-1),
        };
        let (tol, line_search) = match experiment {
            Experiment::Fig2 => (1e-10, LineSearchKind::Estimate),
            _ => (1e-12, LineSearchKind::Exact),
        };
        Self {
            experiment,
            n,
            method,
            seed,
            init,
            max_iter: 5000,
            tol,
            reset_period: None,
            line_search,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::InvalidSpec(msg));
        if self.n < 2 && !(self.experiment == Experiment::FdCheck && self.n == 0) {
            return bad(format!("n must be at least 2, got {}", self.n));
        }
        if !self.experiment.supports(self.method) {
            return bad(format!("{} does not support method {}", self.experiment, self.method));
        }
        if let Init::Near(eps) = self.init {
            if !(eps > 0.0 && eps.is_finite()) {
                return bad(format!("perturbation must be positive, got {eps}"));
            }
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return bad(format!("tolerance must be positive, got {}", self.tol));
        }
        if self.reset_period == Some(0) {
            return bad("reset period must be at least 1".into());
        }
        Ok(())
    }

    /// `<experiment>-<method>-<seed>`; the finite-difference check covers
    /// every family so its method slot reads `all`.
    pub fn file_stem(&self) -> String {
        let method = match self.experiment {
            Experiment::FdCheck => "all",
            _ => self.method.name(),
        };
        format!("{}-{}-{}", self.experiment, method, self.seed)
    }
}
