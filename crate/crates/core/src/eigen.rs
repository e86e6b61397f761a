//! Extreme eigenpairs of a symmetric matrix by iterations on the sphere.
//!
//! - [`newton_rayleigh`]: Newton's method for Rayleigh's quotient, moving along
//!   the great circle in the direction `H = −x + αy`, `y = (Q − ρI)⁻¹x`.
//! - [`rqi`]: Rayleigh quotient iteration, `x ← y/‖y‖`.
//! - [`cg_extreme_eigen`]: conjugate gradient ascent with closed-form line
//!   maximization and parallel translation, one product `Qv` per iteration.
//!
//! The smallest eigenpair is found by running on `−Q`.

use nalgebra::DVector;
use thiserror::Error;

use crate::convergence::IterationTrace;
use crate::rayleigh::{LineMax, RayleighError, RayleighProblem, CONVERGED_RESIDUAL};
use crate::sphere::{line_angle, SpherePoint};
use crate::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct EigenConfig<T> {
    pub max_iter: usize,
    /// Stop once `‖Qx − ρx‖ ≤ residual_tol·‖Q‖_F`.
    pub residual_tol: T,
    /// CG reset period; `None` uses the matrix size.
    pub reset_period: Option<usize>,
    /// Eigenvector the error column measures the angle to; without one the
    /// error is the eigenresidual.
    pub target: Option<DVector<T>>,
}

impl<T: Scalar> Default for EigenConfig<T> {
    fn default() -> Self {
        Self {
            max_iter: 1000,
            residual_tol: T::tol(CONVERGED_RESIDUAL),
            reset_period: None,
            target: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EigenStop {
    /// Eigenresidual below tolerance.
    Residual,
    /// `Q − ρI` became singular at an eigenvector.
    SingularShift,
    /// The starting point was already an eigenvector.
    ZeroGradient,
    MaxIterations,
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum EigenError {
    #[error(transparent)]
    Rayleigh(#[from] RayleighError),
    #[error("reset period must be at least 1")]
    ZeroResetPeriod,
}

#[derive(Clone, Debug)]
pub struct EigenResult<T: Scalar> {
    pub rho: T,
    pub x: SpherePoint<T>,
    /// Value column holds `ρ(x_i)`; grad_norm holds `‖2(Qx_i − ρx_i)‖`.
    pub trace: IterationTrace<T>,
    pub converged: bool,
    pub iterations: usize,
    pub stop: EigenStop,
    /// CG resets performed (direction reset to the gradient).
    pub resets: usize,
}

struct Recorder<'a, T: Scalar> {
    problem: &'a RayleighProblem<T>,
    config: &'a EigenConfig<T>,
    trace: IterationTrace<T>,
    threshold: T,
}

impl<'a, T: Scalar> Recorder<'a, T> {
    fn new(problem: &'a RayleighProblem<T>, config: &'a EigenConfig<T>) -> Self {
        Self {
            problem,
            config,
            trace: IterationTrace::new(),
            threshold: config.residual_tol * problem.matrix().norm(),
        }
    }

    /// Records `x` and reports whether its residual is below tolerance.
    fn record(&mut self, x: &SpherePoint<T>) -> bool {
        let residual = self.problem.residual(x);
        let error = match &self.config.target {
            Some(t) => line_angle(t, x.as_vector()),
            None => residual,
        };
        self.trace.record(
            self.problem.value(x),
            residual * T::lit(2.0),
            error,
            T::zero(),
        );
        residual <= self.threshold
    }

    fn finish(self, x: SpherePoint<T>, stop: EigenStop, resets: usize) -> EigenResult<T> {
        let iterations = self.trace.iterations();
        EigenResult {
            rho: self.problem.value(&x),
            x,
            trace: self.trace,
            converged: stop != EigenStop::MaxIterations,
            iterations,
            stop,
            resets,
        }
    }
}

fn normalized_target<T: Scalar>(config: &EigenConfig<T>) -> EigenConfig<T> {
    let mut config = config.clone();
    if let Some(t) = &config.target {
        let norm = t.norm();
        config.target = Some(t / norm);
    }
    config
}

/// Newton's method for Rayleigh's quotient:
///
/// ```text
/// y = (Q − ρ(x)I)⁻¹x,  α = 1/xᵀy,  H = −x + αy,  θ = ‖H‖
/// x ← x cos θ + H sin θ / θ
/// ```
pub fn newton_rayleigh<T: Scalar>(
    problem: &RayleighProblem<T>,
    x0: SpherePoint<T>,
    config: &EigenConfig<T>,
) -> Result<EigenResult<T>, EigenError> {
    shifted_iteration(problem, x0, config, |x, y| {
        let xv = x.as_vector();
        let alpha = T::one() / xv.dot(y);
        let h = y * alpha - xv;
        let theta = h.norm();
        if theta == T::zero() {
            return (x.clone(), T::zero());
        }
        let next = xv * theta.cos() + h * (theta.sin() / theta);
        (SpherePoint::normalize(next).unwrap_or_else(|_| x.clone()), theta)
    })
}

/// Rayleigh quotient iteration, `x ← y/‖y‖` with the sign chosen so that
/// `xᵀx_prev > 0`.
pub fn rqi<T: Scalar>(
    problem: &RayleighProblem<T>,
    x0: SpherePoint<T>,
    config: &EigenConfig<T>,
) -> Result<EigenResult<T>, EigenError> {
    shifted_iteration(problem, x0, config, |x, y| {
        let sign = if x.as_vector().dot(y) < T::zero() {
            -T::one()
        } else {
            T::one()
        };
        match SpherePoint::normalize(y * sign) {
            Ok(next) => {
                let step = line_angle(x.as_vector(), next.as_vector());
                (next, step)
            }
            Err(_) => (x.clone(), T::zero()),
        }
    })
}

fn shifted_iteration<T, F>(
    problem: &RayleighProblem<T>,
    x0: SpherePoint<T>,
    config: &EigenConfig<T>,
    update: F,
) -> Result<EigenResult<T>, EigenError>
where
    T: Scalar,
    F: Fn(&SpherePoint<T>, &DVector<T>) -> (SpherePoint<T>, T),
{
    let config = normalized_target(config);
    let mut rec = Recorder::new(problem, &config);
    let mut x = x0;
    let mut iteration = 0;
    let stop = loop {
        if rec.record(&x) {
            break EigenStop::Residual;
        }
        if iteration == config.max_iter {
            break EigenStop::MaxIterations;
        }
        let y = match problem.shifted_solve(&x) {
            Ok((y, _)) => y,
            Err(RayleighError::SingularShift { .. }) => break EigenStop::SingularShift,
            Err(e) => return Err(e.into()),
        };
        let (next, step) = update(&x, &y);
        rec.trace.set_last_step(step);
        x = next;
        iteration += 1;
    };
    Ok(rec.finish(x, stop, 0))
}

/// Conjugate gradient for the largest eigenvalue.
///
/// With `G = H = (Q − ρ(x)I)x` initially, each iteration maximizes `ρ` on the
/// great circle through `x` in direction `h = H/‖H‖` (closed form `c, s`),
/// translates `H` and `G` to the new point,
///
/// ```text
/// τH = Hc − x‖H‖s,   τG = G − (hᵀG)(xs + hv),   v = s²/(1 + c)
/// ```
///
/// and sets `H ← G' + γτH` with `γ = (G' − τG)ᵀG' / GᵀH`, resetting to `G'`
/// every `r` iterations.
pub fn cg_extreme_eigen<T: Scalar>(
    problem: &RayleighProblem<T>,
    x0: SpherePoint<T>,
    config: &EigenConfig<T>,
) -> Result<EigenResult<T>, EigenError> {
    let config = normalized_target(config);
    let n = problem.dim();
    let period = config.reset_period.unwrap_or(n);
    if period == 0 {
        return Err(EigenError::ZeroResetPeriod);
    }
    let q = problem.matrix();
    let half_gradient = |x: &SpherePoint<T>| {
        let xv = x.as_vector();
        let qx = q * xv;
        let rho = xv.dot(&qx);
        qx - xv * rho
    };
    let mut rec = Recorder::new(problem, &config);
    let mut x = x0;
    let mut g = half_gradient(&x);
    if g.norm() == T::zero() {
        rec.record(&x);
        return Ok(rec.finish(x, EigenStop::ZeroGradient, 0));
    }
    let mut h = g.clone();
    let mut resets = 0;
    let mut iteration = 0;
    let stop = loop {
        if rec.record(&x) {
            break EigenStop::Residual;
        }
        if iteration == config.max_iter {
            break EigenStop::MaxIterations;
        }
        let xv = x.as_vector().clone();
        h -= &xv * xv.dot(&h);
        let h_norm = h.norm();
        let hu = &h / h_norm;
        let LineMax { c, s, v } = match problem.line_max(&x, &hu) {
            Ok(m) => m,
            Err(RayleighError::DegenerateDirection) => LineMax {
                c: T::one(),
                s: T::zero(),
                v: T::zero(),
            },
            Err(e) => return Err(e.into()),
        };
        let next = SpherePoint::normalize(&xv * c + &hu * s).map_err(RayleighError::from)?;
        let moved_h = &h * c - &xv * (h_norm * s);
        let moved_g = &g - (&xv * s + &hu * v) * hu.dot(&g);
        rec.trace.set_last_step(s.atan2(c).abs());
        let g_next = half_gradient(&next);
        let denom = g.dot(&h);
        h = if iteration % period == period - 1 || denom == T::zero() || s == T::zero() {
            resets += 1;
            g_next.clone()
        } else {
            let gamma = (&g_next - &moved_g).dot(&g_next) / denom;
            &g_next + moved_h * gamma
        };
        g = g_next;
        x = next;
        iteration += 1;
    };
    Ok(rec.finish(x, stop, resets))
}
