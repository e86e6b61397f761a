//! Steepest descent, Newton's method and conjugate gradient along geodesics.
//!
//! Every solver minimizes an [`Objective`]. Iterates move along geodesics
//! `exp(p, d, t)`; CG carries its previous direction and gradient to the new
//! point by parallel translation along the step just taken.

use nalgebra::ComplexField;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::convergence::IterationTrace;
use crate::manifold::{DirectionError, Manifold, Objective, PointOf, ScalarOf, TangentOf};
use crate::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LineSearchKind {
    /// The objective's closed-form step, else its step estimate, else golden section.
    Exact,
    /// Bracketing by doubling followed by golden-section refinement.
    Golden,
    /// The objective's step estimate, else its closed form, else golden section.
    Estimate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BetaFormula {
    /// `γ = ⟨G_{i+1} − τG_i, G_{i+1}⟩ / ⟨G_i, H_i⟩`.
    PolakRibiere,
    /// `γ = ⟨G_{i+1}, G_{i+1}⟩ / ⟨G_i, G_i⟩`.
    FletcherReeves,
}

/// What Newton's method does when the Hessian is not definite at an iterate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NewtonFallback {
    Abort,
    /// Take a line-searched steepest-descent step instead.
    GradientStep,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig<T> {
    pub grad_tol: T,
    pub max_iter: usize,
    pub line_search: LineSearchKind,
    pub golden_growth: T,
    /// Relative bracket width at which golden section stops.
    pub golden_tol: T,
    /// Initial arc length for bracketing when the objective offers no scale.
    pub initial_arc: T,
    pub max_evaluations: usize,
    /// CG reset period; `None` uses the manifold dimension.
    pub reset_period: Option<usize>,
    pub beta: BetaFormula,
    /// Clamp `γ` at zero.
    pub clamp_beta: bool,
    pub newton_fallback: NewtonFallback,
    /// Consecutive gradient-norm increases after which Newton gives up.
    pub divergence_window: usize,
    /// Keep every iterate in [`SolverRun::points`].
    pub record_points: bool,
}

impl<T: Scalar> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            grad_tol: T::tol(1e-12),
            max_iter: 1000,
            line_search: LineSearchKind::Exact,
            golden_growth: T::lit(2.0),
            golden_tol: T::tol(1e-10),
            initial_arc: T::lit(0.25),
            max_evaluations: 500,
            reset_period: None,
            beta: BetaFormula::PolakRibiere,
            clamp_beta: false,
            newton_fallback: NewtonFallback::Abort,
            divergence_window: 5,
            record_points: false,
        }
    }
}

impl<T: Scalar> SolverConfig<T> {
    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |reason: &'static str| Err(SolverError::InvalidConfig { reason });
        if !(self.grad_tol > T::zero()) {
            return bad("gradient tolerance must be positive");
        }
        if !(self.golden_tol > T::zero()) {
            return bad("golden-section tolerance must be positive");
        }
        if !(self.golden_growth > T::one()) {
            return bad("bracket growth factor must exceed 1");
        }
        if !(self.initial_arc > T::zero()) {
            return bad("initial arc must be positive");
        }
        if self.reset_period == Some(0) {
            return bad("reset period must be at least 1");
        }
        if self.divergence_window == 0 {
            return bad("divergence window must be at least 1");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineSearchResult<T> {
    /// Parameter `λ ≥ 0` along the search direction.
    pub step: T,
    pub evaluations: usize,
    pub value: T,
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum LineSearchError {
    #[error("search direction is zero")]
    ZeroDirection,
    #[error("no sampled step decreases the objective")]
    NoDecrease,
    #[error("line search exceeded {evaluations} evaluations")]
    MaxEvaluations { evaluations: usize },
    #[error("step rule failed: {0}")]
    Step(DirectionError),
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum SolverError {
    #[error("invalid solver configuration: {reason}")]
    InvalidConfig { reason: &'static str },
    #[error("line search failed at iteration {iteration}: {source}")]
    LineSearchFailed {
        iteration: usize,
        source: LineSearchError,
    },
    #[error("no Newton direction at iteration {iteration}: {source}")]
    Direction {
        iteration: usize,
        source: DirectionError,
    },
    #[error("Newton iteration diverged at iteration {iteration}")]
    Diverged { iteration: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StopReason {
    /// Gradient norm fell below the tolerance.
    Converged,
    MaxIterations,
    /// The Hessian is singular to working precision. For shifted-solve
    /// Newton steps this happens on arrival at a critical point.
    SingularHessian,
    /// A value-only line search found no decrease along a descent direction:
    /// `f` is flat to working precision before the gradient tolerance is met.
    Stagnated,
}

/// Final state of a solver run.
#[derive(Clone, Debug)]
pub struct SolverRun<M: Manifold> {
    pub point: M::Point,
    pub trace: IterationTrace<M::Scalar>,
    pub stop: StopReason,
    /// Per step: `|⟨G_{i+1}, τH_i⟩| / (‖G_{i+1}‖‖H_i‖)`; empty for Newton.
    pub orthogonality: Vec<M::Scalar>,
    pub resets: usize,
    pub fallbacks: usize,
    pub evaluations: usize,
    /// Iterates `p_0, p_1, …` when [`SolverConfig::record_points`] is set.
    pub points: Vec<M::Point>,
}

/// Minimizes `t ↦ f(exp(p, d, t))` over `t ≥ 0`.
pub fn line_minimize_geodesic<O: Objective>(
    objective: &O,
    p: &PointOf<O::Space>,
    d: &TangentOf<O::Space>,
    config: &SolverConfig<ScalarOf<O::Space>>,
) -> Result<LineSearchResult<ScalarOf<O::Space>>, LineSearchError> {
    let space = objective.space();
    if space.norm(p, d) == ScalarOf::<O::Space>::zero() {
        return Err(LineSearchError::ZeroDirection);
    }
    let closed = || objective.exact_step(p, d);
    let estimate = || objective.step_estimate(p, d);
    let rule = match config.line_search {
        LineSearchKind::Golden => None,
        LineSearchKind::Exact => closed().or_else(estimate),
        LineSearchKind::Estimate => estimate().or_else(closed),
    };
    match rule {
        Some(Ok(step)) => {
            let value = objective.value(&space.exp(p, d, step));
            Ok(LineSearchResult {
                step,
                evaluations: 1,
                value,
            })
        }
        Some(Err(DirectionError::NotDescent { .. })) => Err(LineSearchError::NoDecrease),
        Some(Err(e)) => Err(LineSearchError::Step(e)),
        None => golden_section(objective, p, d, config),
    }
}

fn golden_section<O: Objective>(
    objective: &O,
    p: &PointOf<O::Space>,
    d: &TangentOf<O::Space>,
    config: &SolverConfig<ScalarOf<O::Space>>,
) -> Result<LineSearchResult<ScalarOf<O::Space>>, LineSearchError> {
    type S<O> = ScalarOf<<O as Objective>::Space>;
    let space = objective.space();
    let mut evaluations = 0;
    let mut phi = |t: S<O>| -> Result<S<O>, LineSearchError> {
        if evaluations >= config.max_evaluations {
            return Err(LineSearchError::MaxEvaluations { evaluations });
        }
        evaluations += 1;
        Ok(objective.value(&space.exp(p, d, t)))
    };
    let f0 = phi(S::<O>::zero())?;
    let scale = match objective.step_estimate(p, d) {
        Some(Ok(t)) if t > S::<O>::zero() => t,
        _ => config.initial_arc / space.norm(p, d),
    };
    let growth = config.golden_growth;

    // Find b with φ(b) < φ(0), then a bracket a < b < c with φ(b) ≤ φ(a), φ(c).
    let mut a = S::<O>::zero();
    let mut b = scale;
    let mut fb = phi(b)?;
    let mut c;
    if fb < f0 {
        c = b * growth;
        let mut fc = phi(c)?;
        while fc < fb {
            a = b;
            b = c;
            fb = fc;
            c = c * growth;
            fc = phi(c)?;
        }
    } else {
        loop {
            c = b;
            b = b / growth;
            if b <= S::<O>::eps() * scale {
                return Err(LineSearchError::NoDecrease);
            }
            fb = phi(b)?;
            if fb < f0 {
                break;
            }
        }
    }

    let ratio = (S::<O>::lit(5.0).sqrt() - S::<O>::one()) * S::<O>::lit(0.5);
    let mut x1 = c - (c - a) * ratio;
    let mut x2 = a + (c - a) * ratio;
    let mut f1 = phi(x1)?;
    let mut f2 = phi(x2)?;
    let (mut best, mut fbest) = (b, fb);
    while c - a > config.golden_tol * c {
        if f1 < f2 {
            c = x2;
            x2 = x1;
            f2 = f1;
            x1 = c - (c - a) * ratio;
            f1 = phi(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + (c - a) * ratio;
            f2 = phi(x2)?;
        }
        for (x, fx) in [(x1, f1), (x2, f2)] {
            if fx < fbest {
                best = x;
                fbest = fx;
            }
        }
    }
    Ok(LineSearchResult {
        step: best,
        evaluations,
        value: fbest,
    })
}

/// Gradient-norm, value and error sample at one iterate.
struct Sample<M: Manifold> {
    gradient: M::Tangent,
    grad_norm: M::Scalar,
}

fn sample<O: Objective>(
    objective: &O,
    p: &PointOf<O::Space>,
    trace: &mut IterationTrace<ScalarOf<O::Space>>,
    points: &mut Option<Vec<PointOf<O::Space>>>,
) -> Sample<O::Space> {
    if let Some(points) = points {
        points.push(p.clone());
    }
    let gradient = objective.gradient(p);
    let grad_norm = objective.space().norm(p, &gradient);
    trace.record(
        objective.value(p),
        grad_norm,
        objective.error_metric(p),
        ScalarOf::<O::Space>::zero(),
    );
    Sample {
        gradient,
        grad_norm,
    }
}

/// Steepest descent: `p_{i+1} = exp(p_i, λ_i G_i)` with `G_i = −grad f(p_i)`
/// and `λ_i` from the configured line search.
pub fn steepest_descent<O: Objective>(
    objective: &O,
    p0: PointOf<O::Space>,
    config: &SolverConfig<ScalarOf<O::Space>>,
) -> Result<SolverRun<O::Space>, SolverError> {
    config.validate()?;
    let space = objective.space();
    let mut trace = IterationTrace::new();
    let mut points = config.record_points.then(Vec::new);
    let mut orthogonality = Vec::new();
    let mut evaluations = 0;
    let mut p = p0;
    let mut current = sample(objective, &p, &mut trace, &mut points);
    let mut iteration = 0;
    let stop = loop {
        if current.grad_norm < config.grad_tol {
            break StopReason::Converged;
        }
        if iteration == config.max_iter {
            break StopReason::MaxIterations;
        }
        let g = space.scale(-ScalarOf::<O::Space>::one(), &current.gradient);
        let ls = match line_minimize_geodesic(objective, &p, &g, config) {
            Ok(ls) => ls,
            Err(LineSearchError::NoDecrease) => break StopReason::Stagnated,
            Err(source) => return Err(SolverError::LineSearchFailed { iteration, source }),
        };
        evaluations += ls.evaluations;
        trace.set_last_step(ls.step * current.grad_norm);
        let moved_g = space.transport(&p, &g, ls.step, &g);
        p = space.exp(&p, &g, ls.step);
        current = sample(objective, &p, &mut trace, &mut points);
        orthogonality.push(turn_defect(space, &p, &current, &moved_g));
        iteration += 1;
    };
    Ok(SolverRun {
        point: p,
        trace,
        stop,
        orthogonality,
        resets: 0,
        fallbacks: 0,
        evaluations,
        points: points.unwrap_or_default(),
    })
}

/// `|⟨G_{i+1}, τH_i⟩| / (‖G_{i+1}‖‖τH_i‖)`, with `G = −grad`.
fn turn_defect<M: Manifold>(
    space: &M,
    p: &M::Point,
    current: &Sample<M>,
    moved: &M::Tangent,
) -> M::Scalar {
    let denom = current.grad_norm * space.norm(p, moved);
    if denom == M::Scalar::zero() {
        return M::Scalar::zero();
    }
    space.inner(p, &current.gradient, moved).abs() / denom
}

/// Newton's method with unit steps: `p_{i+1} = exp(p_i, H_i)` where
/// `Hess f(H_i) = −grad f`.
pub fn newton<O: Objective>(
    objective: &O,
    p0: PointOf<O::Space>,
    config: &SolverConfig<ScalarOf<O::Space>>,
) -> Result<SolverRun<O::Space>, SolverError> {
    config.validate()?;
    let space = objective.space();
    let one = ScalarOf::<O::Space>::one();
    let mut trace = IterationTrace::new();
    let mut points = config.record_points.then(Vec::new);
    let mut p = p0;
    let mut current = sample(objective, &p, &mut trace, &mut points);
    let mut iteration = 0;
    let mut increases = 0;
    let mut fallbacks = 0;
    let mut evaluations = 0;
    let stop = loop {
        if current.grad_norm < config.grad_tol {
            break StopReason::Converged;
        }
        if iteration == config.max_iter {
            break StopReason::MaxIterations;
        }
        let (direction, step) = match objective.newton_direction(&p) {
            Ok(d) => (d, one),
            Err(DirectionError::SingularHessian { .. }) => break StopReason::SingularHessian,
            Err(DirectionError::IndefiniteOperator { .. })
                if config.newton_fallback == NewtonFallback::GradientStep =>
            {
                let g = space.scale(-one, &current.gradient);
                let ls = line_minimize_geodesic(objective, &p, &g, config)
                    .map_err(|source| SolverError::LineSearchFailed { iteration, source })?;
                evaluations += ls.evaluations;
                fallbacks += 1;
                (g, ls.step)
            }
            Err(source) => return Err(SolverError::Direction { iteration, source }),
        };
        trace.set_last_step(step * space.norm(&p, &direction));
        p = space.exp(&p, &direction, step);
        let previous = current.grad_norm;
        current = sample(objective, &p, &mut trace, &mut points);
        iteration += 1;
        if current.grad_norm > previous {
            increases += 1;
            if increases >= config.divergence_window {
                return Err(SolverError::Diverged { iteration });
            }
        } else {
            increases = 0;
        }
    };
    Ok(SolverRun {
        point: p,
        trace,
        stop,
        orthogonality: Vec::new(),
        resets: 0,
        fallbacks,
        evaluations,
        points: points.unwrap_or_default(),
    })
}

/// Conjugate gradient: `H_{i+1} = G_{i+1} + γ_i τH_i`, reset to `G_{i+1}`
/// every `r` steps, when `⟨G_i, H_i⟩ = 0`, or when `H` stops being a descent direction.
pub fn conjugate_gradient<O: Objective>(
    objective: &O,
    p0: PointOf<O::Space>,
    config: &SolverConfig<ScalarOf<O::Space>>,
) -> Result<SolverRun<O::Space>, SolverError> {
    config.validate()?;
    let space = objective.space();
    let zero = ScalarOf::<O::Space>::zero();
    let one = ScalarOf::<O::Space>::one();
    let period = config.reset_period.unwrap_or(space.dimension()).max(1);
    let mut trace = IterationTrace::new();
    let mut points = config.record_points.then(Vec::new);
    let mut orthogonality = Vec::new();
    let mut resets = 0;
    let mut evaluations = 0;
    let mut p = p0;
    let mut current = sample(objective, &p, &mut trace, &mut points);
    let mut g = space.scale(-one, &current.gradient);
    let mut h = g.clone();
    let mut steepest = true;
    let mut iteration = 0;
    let stop = loop {
        if current.grad_norm < config.grad_tol {
            break StopReason::Converged;
        }
        if iteration == config.max_iter {
            break StopReason::MaxIterations;
        }
        if space.inner(&p, &g, &h) <= zero {
            h = g.clone();
            steepest = true;
            resets += 1;
        }
        let ls = match line_minimize_geodesic(objective, &p, &h, config) {
            Ok(ls) => ls,
            Err(LineSearchError::NoDecrease) if !steepest => {
                h = g.clone();
                steepest = true;
                resets += 1;
                continue;
            }
            Err(LineSearchError::NoDecrease) => break StopReason::Stagnated,
            Err(source) => return Err(SolverError::LineSearchFailed { iteration, source }),
        };
        evaluations += ls.evaluations;
        trace.set_last_step(ls.step * space.norm(&p, &h));
        let moved_g = space.transport(&p, &h, ls.step, &g);
        let moved_h = space.transport(&p, &h, ls.step, &h);
        let denom = space.inner(&p, &g, &h);
        let g_norm_sq = space.inner(&p, &g, &g);
        p = space.exp(&p, &h, ls.step);
        current = sample(objective, &p, &mut trace, &mut points);
        orthogonality.push(turn_defect(space, &p, &current, &moved_h));
        let g_next = space.scale(-one, &current.gradient);
        let reset_due = iteration % period == period - 1;
        steepest = reset_due || denom == zero;
        h = if steepest {
            resets += 1;
            g_next.clone()
        } else {
            let gamma = match config.beta {
                BetaFormula::PolakRibiere => {
                    let diff = space.axpy(-one, &moved_g, &g_next);
                    space.inner(&p, &diff, &g_next) / denom
                }
                BetaFormula::FletcherReeves => space.inner(&p, &g_next, &g_next) / g_norm_sq,
            };
            let gamma = if config.clamp_beta && gamma < zero {
                zero
            } else {
                gamma
            };
            space.axpy(gamma, &moved_h, &g_next)
        };
        g = g_next;
        iteration += 1;
    };
    Ok(SolverRun {
        point: p,
        trace,
        stop,
        orthogonality,
        resets,
        fallbacks: 0,
        evaluations,
        points: points.unwrap_or_default(),
    })
}
