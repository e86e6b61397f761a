//! Experiment runners.

use std::time::Instant;

use geodesic_opt::brockett::{BrockettObjective, BrockettProblem};
use geodesic_opt::convergence::{
    estimate_order, pre_stagnation_window, ConvergenceReport, IterationRecord, IterationTrace,
    OrderError,
};
use geodesic_opt::eigen::{cg_extreme_eigen, newton_rayleigh, rqi, EigenConfig, EigenResult, EigenStop};
use geodesic_opt::jacobi::{JacobiObjective, JacobiProblem};
use geodesic_opt::manifold::{Manifold, Objective, PointOf, Sense, TangentOf};
use geodesic_opt::rayleigh::{RayleighObjective, RayleighProblem};
use geodesic_opt::rotation::{so_geodesic, Rotation};
use geodesic_opt::solvers::{
    conjugate_gradient, newton, steepest_descent, SolverConfig, SolverRun, StopReason,
};
use geodesic_opt::sphere::{sphere_exp, SpherePoint};
use nalgebra::{DMatrix, DVector};

use crate::csv::{format_float, FIG1_COLUMNS, FIG2_COLUMNS};
use crate::random::{self, Rng};
use crate::report::{Outcome, RunReport};
use crate::spec::{Experiment, ExperimentSpec, Init, Method};
use crate::HarnessError;

/// Finite-difference targets: relative error of the directional derivative
/// and of the Hessian form.
pub const FD_GRADIENT_TARGET: f64 = 1e-6;
pub const FD_HESSIAN_TARGET: f64 = 1e-5;
pub const FD_INSTANCES: usize = 20;

/// Relative round-off allowance when checking that `f` never decreases:
/// evaluating `tr HN` near the optimum is only accurate to a few ulps.
pub const MONOTONE_SLACK: f64 = 1e-12;

/// Off-diagonal mass below which the Jacobi trace counts as settled.
pub const JACOBI_SETTLED: f64 = 1e-11;

/// A finished run: its report and, except for `fd-check`, the trace.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub report: RunReport,
    pub trace: Option<(IterationTrace<f64>, [&'static str; 5])>,
}

/// Order fit used in every report: [`estimate_order`] over the
/// pre-stagnation window of the error column.
pub fn order_fit(trace: &IterationTrace<f64>) -> Result<ConvergenceReport<f64>, OrderError> {
    let errors = trace.errors();
    estimate_order(&errors, pre_stagnation_window(&errors))
}

pub fn run(spec: &ExperimentSpec) -> Result<RunOutcome, HarnessError> {
    spec.validate()?;
    let start = Instant::now();
    let mut outcome = match spec.experiment {
        Experiment::Fig1 => run_fig1(spec),
        Experiment::Fig2 => run_fig2(spec),
        Experiment::Jacobi => run_jacobi(spec),
        Experiment::FdCheck => run_fd_check(spec),
    }?;
    outcome.report.duration = start.elapsed();
    Ok(outcome)
}

fn descending(n: usize) -> Vec<f64> {
    (0..n).map(|i| (n - i) as f64).collect()
}

fn solver_config(spec: &ExperimentSpec, record_points: bool) -> SolverConfig<f64> {
    SolverConfig {
        grad_tol: spec.tol,
        max_iter: spec.max_iter,
        line_search: spec.line_search,
        reset_period: spec.reset_period,
        record_points,
        ..SolverConfig::default()
    }
}

fn solve<O: Objective>(
    method: Method,
    objective: &O,
    p0: PointOf<O::Space>,
    config: &SolverConfig<f64>,
) -> Result<SolverRun<O::Space>, HarnessError>
where
    O::Space: Manifold<Scalar = f64>,
{
    let run = match method {
        Method::Sd => steepest_descent(objective, p0, config),
        Method::Cg => conjugate_gradient(objective, p0, config),
        Method::Newton => newton(objective, p0, config),
        Method::Rqi | Method::NewtonRq => unreachable!("rejected by validation"),
    };
    Ok(run?)
}

/// The trace with the value column negated: the solvers minimize `−f`.
fn negated(trace: &IterationTrace<f64>) -> IterationTrace<f64> {
    let records = trace
        .records()
        .iter()
        .map(|r| IterationRecord {
            value: -r.value,
            ..r.clone()
        })
        .collect();
    IterationTrace::from_records(records).expect("indices preserved")
}

fn solver_outcome(stop: StopReason) -> Outcome {
    match stop {
        StopReason::Converged | StopReason::SingularHessian => Outcome::Converged,
        StopReason::MaxIterations => Outcome::MaxIterations,
        StopReason::Stagnated => Outcome::ToleranceBreached,
    }
}

fn stop_name(stop: StopReason) -> &'static str {
    match stop {
        StopReason::Converged => "gradient",
        StopReason::MaxIterations => "max-iterations",
        StopReason::SingularHessian => "singular-hessian",
        StopReason::Stagnated => "stagnated",
    }
}

fn eigen_stop_name(stop: EigenStop) -> &'static str {
    match stop {
        EigenStop::Residual => "residual",
        EigenStop::SingularShift => "singular-shift",
        EigenStop::ZeroGradient => "zero-gradient",
        EigenStop::MaxIterations => "max-iterations",
    }
}

fn finish(
    spec: &ExperimentSpec,
    trace: IterationTrace<f64>,
    outcome: Outcome,
    columns: [&'static str; 5],
    details: Vec<(String, String)>,
) -> RunOutcome {
    let last = trace.last().cloned();
    let report = RunReport {
        spec: spec.clone(),
        outcome,
        final_objective: last.as_ref().map(|r| r.value),
        final_error: last.as_ref().map(|r| r.error),
        iterations: trace.iterations(),
        order: Some(order_fit(&trace)),
        details,
        duration: Default::default(),
    };
    RunOutcome {
        report,
        trace: Some((trace, columns)),
    }
}

fn detail(key: &str, value: impl ToString) -> (String, String) {
    (key.to_owned(), value.to_string())
}

/// Starting point for Figure 1: uniform, or angle `ε` from `e₁`.
pub fn fig1_start(spec: &ExperimentSpec, r: &mut Rng) -> SpherePoint<f64> {
    match spec.init {
        Init::Random => random::sphere_point(r, spec.n),
        Init::Near(eps) => {
            let e1 = SpherePoint::basis(spec.n, 0);
            let h = random::unit_tangent(r, &e1);
            sphere_exp(&e1, &h, eps).expect("unit tangent at e1")
        }
    }
}

/// Maximizes `xᵀQx` on the sphere with `Q = diag(n, …, 1)`; the error is the
/// angle to `e₁`.
pub fn run_fig1(spec: &ExperimentSpec) -> Result<RunOutcome, HarnessError> {
    let mut r = random::rng(spec.seed);
    let x0 = fig1_start(spec, &mut r);
    run_fig1_from(spec, RayleighProblem::diagonal(&descending(spec.n)), x0)
}

pub fn run_fig1_from(
    spec: &ExperimentSpec,
    problem: RayleighProblem<f64>,
    x0: SpherePoint<f64>,
) -> Result<RunOutcome, HarnessError> {
    let n = problem.dim();
    let mut target = DVector::zeros(n);
    target[0] = 1.0;
    let q_norm = problem.matrix().norm();
    let (trace, outcome, x, stop) = match spec.method {
        Method::Sd | Method::Newton => {
            let objective =
                RayleighObjective::new(problem.clone(), Sense::Maximize).with_target(target);
            let run = solve(spec.method, &objective, x0, &solver_config(spec, false))?;
            let outcome = solver_outcome(run.stop);
            (negated(&run.trace), outcome, run.point, stop_name(run.stop))
        }
        Method::Cg | Method::Rqi | Method::NewtonRq => {
            let config = EigenConfig {
                max_iter: spec.max_iter,
                residual_tol: spec.tol,
                reset_period: spec.reset_period,
                target: Some(target),
            };
            let result: EigenResult<f64> = match spec.method {
                Method::Cg => cg_extreme_eigen(&problem, x0, &config)?,
                Method::Rqi => rqi(&problem, x0, &config)?,
                _ => newton_rayleigh(&problem, x0, &config)?,
            };
            let outcome = if result.converged {
                Outcome::Converged
            } else {
                Outcome::MaxIterations
            };
            (result.trace, outcome, result.x, eigen_stop_name(result.stop))
        }
    };
    let details = vec![
        detail("stop", stop),
        detail("final_rho", format_float(problem.value(&x))),
        detail("relative_residual", format_float(problem.residual(&x) / q_norm)),
        detail("unit_defect", format_float((x.as_vector().norm() - 1.0).abs())),
    ];
    Ok(finish(spec, trace, outcome, FIG1_COLUMNS, details))
}

/// `Q = V·diag(n, …, 1)·Vᵀ` with seeded `V`; `V` is a maximizer of both
/// Brockett's function with `N = diag(n, …, 1)` and `tr Hπ(H)`.
pub fn seeded_orbit(r: &mut Rng, n: usize) -> (DMatrix<f64>, Rotation<f64>) {
    let v = random::rotation(r, n);
    let d = DMatrix::from_diagonal(&DVector::from_vec(descending(n)));
    let q = v.matrix() * d * v.matrix().transpose();
    ((&q + q.transpose()) * 0.5, v)
}

fn orbit_start(spec: &ExperimentSpec, r: &mut Rng, optimum: &Rotation<f64>) -> Rotation<f64> {
    match spec.init {
        Init::Random => random::rotation(r, spec.n),
        Init::Near(eps) => so_geodesic(optimum, &random::unit_skew(r, spec.n), eps),
    }
}

/// Maximizes `tr ΘᵀQΘN` on `SO(n)`; the error is `‖H − D‖_F`.
pub fn run_fig2(spec: &ExperimentSpec) -> Result<RunOutcome, HarnessError> {
    let mut r = random::rng(spec.seed);
    let (q, v) = seeded_orbit(&mut r, spec.n);
    let theta0 = orbit_start(spec, &mut r, &v);
    let problem = BrockettProblem::new(q, DVector::from_vec(descending(spec.n)))
        .map_err(|e| HarnessError::Setup(e.to_string()))?;
    run_fig2_from(spec, problem, theta0)
}

pub fn run_fig2_from(
    spec: &ExperimentSpec,
    problem: BrockettProblem<f64>,
    theta0: Rotation<f64>,
) -> Result<RunOutcome, HarnessError> {
    let optimal = problem.optimal_value();
    let objective = BrockettObjective::new(problem);
    let run = solve(spec.method, &objective, theta0, &solver_config(spec, true))?;
    let problem = objective.problem();
    let drift = run
        .points
        .iter()
        .map(|p| problem.isospectral_drift(p))
        .fold(0.0, f64::max);
    let trace = negated(&run.trace);
    let values = trace.values();
    let max_decrease = values.windows(2).map(|w| w[0] - w[1]).fold(0.0, f64::max);
    let monotone = values
        .windows(2)
        .all(|w| w[1] >= w[0] - MONOTONE_SLACK * w[0].abs());
    let details = vec![
        detail("stop", stop_name(run.stop)),
        detail("optimal_f", format_float(optimal)),
        detail("max_isospectral_drift", format_float(drift)),
        detail("max_f_decrease", format_float(max_decrease)),
        detail("f_nondecreasing", monotone),
        detail("resets", run.resets),
    ];
    Ok(finish(spec, trace, solver_outcome(run.stop), FIG2_COLUMNS, details))
}

/// Maximizes `tr Hπ(H)`; the error is the off-diagonal Frobenius mass of `H`.
pub fn run_jacobi(spec: &ExperimentSpec) -> Result<RunOutcome, HarnessError> {
    let mut r = random::rng(spec.seed);
    let (q, v) = seeded_orbit(&mut r, spec.n);
    let theta0 = orbit_start(spec, &mut r, &v);
    let problem = JacobiProblem::new(q).map_err(|e| HarnessError::Setup(e.to_string()))?;
    run_jacobi_from(spec, problem, theta0)
}

pub fn run_jacobi_from(
    spec: &ExperimentSpec,
    problem: JacobiProblem<f64>,
    theta0: Rotation<f64>,
) -> Result<RunOutcome, HarnessError> {
    let objective = JacobiObjective::new(problem);
    let run = solve(spec.method, &objective, theta0, &solver_config(spec, false))?;
    let trace = negated(&run.trace);
    let errors = trace.errors();
    // Strict decrease is only meaningful above round-off.
    let end = errors
        .iter()
        .position(|&e| e < JACOBI_SETTLED)
        .map_or(errors.len(), |i| i + 1);
    let monotone = errors[..end].windows(2).all(|w| w[1] < w[0]);
    let details = vec![
        detail("stop", stop_name(run.stop)),
        detail("off_diagonal_decreasing", monotone),
    ];
    Ok(finish(spec, trace, solver_outcome(run.stop), FIG2_COLUMNS, details))
}

/// Relative errors of the directional derivative and the Hessian form of
/// `objective` at `p` along the geodesic with unit velocity `u`, against
/// central differences.
pub fn fd_errors<O: Objective>(objective: &O, p: &PointOf<O::Space>, u: &TangentOf<O::Space>) -> (f64, f64)
where
    O::Space: Manifold<Scalar = f64>,
{
    let space = objective.space();
    let f = |t: f64| objective.value(&space.exp(p, u, t));
    let u_norm = space.norm(p, u);
    let g = objective.gradient(p);
    let slope = space.inner(p, &g, u);
    let h = 1e-5;
    let fd = (f(h) - f(-h)) / (2.0 * h);
    let scale = slope.abs().max(space.norm(p, &g) * u_norm).max(f64::MIN_POSITIVE);
    let grad_rel = (fd - slope).abs() / scale;
    let hu = objective.hessian_apply(p, u);
    let form = space.inner(p, &hu, u);
    let h = 1e-4;
    let fd2 = (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h);
    let scale = form.abs().max(space.norm(p, &hu) * u_norm).max(f64::MIN_POSITIVE);
    (grad_rel, (fd2 - form).abs() / scale)
}

/// Largest finite-difference errors over the seeded instances of each family.
#[derive(Clone, Debug, PartialEq)]
pub struct FdFamily {
    pub name: &'static str,
    pub n: usize,
    pub max_gradient: f64,
    pub max_hessian: f64,
}

impl FdFamily {
    pub fn passed(&self) -> bool {
        self.max_gradient <= FD_GRADIENT_TARGET && self.max_hessian <= FD_HESSIAN_TARGET
    }
}

fn fd_family(name: &'static str, n: usize, errors: impl Iterator<Item = (f64, f64)>) -> FdFamily {
    let (g, h) = errors.fold((0.0, 0.0), |(g, h), (a, b)| (f64::max(g, a), f64::max(h, b)));
    FdFamily {
        name,
        n,
        max_gradient: g,
        max_hessian: h,
    }
}

/// Rayleigh (`n = 8`), Brockett (`n = 6`) and Jacobi (`n = 5`) families, or
/// all at `spec.n` when it is set.
pub fn fd_check(spec: &ExperimentSpec) -> Result<Vec<FdFamily>, HarnessError> {
    let size = |default: usize| if spec.n == 0 { default } else { spec.n };
    let mut r = random::rng(spec.seed);

    let n = size(8);
    let mut rayleigh = Vec::new();
    for _ in 0..FD_INSTANCES {
        let q = random::symmetric(&mut r, n);
        let objective = RayleighObjective::new(
            RayleighProblem::new(q).map_err(|e| HarnessError::Setup(e.to_string()))?,
            Sense::Minimize,
        );
        let x = random::sphere_point(&mut r, n);
        let u = random::unit_tangent(&mut r, &x);
        rayleigh.push(fd_errors(&objective, &x, &u));
    }

    let n_b = size(6);
    let mut brockett = Vec::new();
    for _ in 0..FD_INSTANCES {
        let q = random::symmetric(&mut r, n_b);
        let problem = BrockettProblem::new(q, DVector::from_vec(descending(n_b)))
            .map_err(|e| HarnessError::Setup(e.to_string()))?;
        let objective = BrockettObjective::new(problem);
        let theta = random::rotation(&mut r, n_b);
        let u = random::unit_skew(&mut r, n_b);
        brockett.push(fd_errors(&objective, &theta, &u));
    }

    let n_j = size(5);
    let mut jacobi = Vec::new();
    for _ in 0..FD_INSTANCES {
        let q = random::symmetric(&mut r, n_j);
        let objective =
            JacobiObjective::new(JacobiProblem::new(q).map_err(|e| HarnessError::Setup(e.to_string()))?);
        let theta = random::rotation(&mut r, n_j);
        let u = random::unit_skew(&mut r, n_j);
        jacobi.push(fd_errors(&objective, &theta, &u));
    }

    Ok(vec![
        fd_family("rayleigh", n, rayleigh.into_iter()),
        fd_family("brockett", n_b, brockett.into_iter()),
        fd_family("jacobi", n_j, jacobi.into_iter()),
    ])
}

pub fn run_fd_check(spec: &ExperimentSpec) -> Result<RunOutcome, HarnessError> {
    let families = fd_check(spec)?;
    let mut details = vec![
        detail("gradient_target", format_float(FD_GRADIENT_TARGET)),
        detail("hessian_target", format_float(FD_HESSIAN_TARGET)),
        detail("instances_per_family", FD_INSTANCES),
    ];
    for fam in &families {
        details.push(detail(&format!("{}.n", fam.name), fam.n));
        details.push(detail(&format!("{}.max_gradient_rel", fam.name), format_float(fam.max_gradient)));
        details.push(detail(&format!("{}.max_hessian_rel", fam.name), format_float(fam.max_hessian)));
        details.push(detail(&format!("{}.passed", fam.name), fam.passed()));
    }
    let outcome = if families.iter().all(FdFamily::passed) {
        Outcome::Converged
    } else {
        Outcome::ToleranceBreached
    };
    let report = RunReport {
        spec: spec.clone(),
        outcome,
        final_objective: None,
        final_error: None,
        iterations: FD_INSTANCES * families.len(),
        order: None,
        details,
        duration: Default::default(),
    };
    Ok(RunOutcome { report, trace: None })
}
