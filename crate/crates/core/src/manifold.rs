//! The contract every manifold and objective satisfies.
//!
//! A [`Manifold`] supplies closed-form geodesics, parallel translation along
//! those geodesics, and the Riemannian inner product on each tangent space.
//! An [`Objective`] is a smooth function on a manifold with its gradient and
//! Hessian operator (both with respect to the manifold's metric), plus
//! optional hooks for Newton directions and one-dimensional step rules.
//!
//! Solvers always minimize. Maximization problems are expressed by negating
//! the objective (see [`Sense`]).

use std::fmt::Debug;

use nalgebra::ComplexField;
use thiserror::Error;

use crate::Scalar;

pub type PointOf<M> = <M as Manifold>::Point;
pub type TangentOf<M> = <M as Manifold>::Tangent;
pub type ScalarOf<M> = <M as Manifold>::Scalar;

/// A complete Riemannian manifold with closed-form geodesics.
///
/// Invariants every implementation upholds:
/// - `inner(p, ·, ·)` is symmetric positive definite on each tangent space;
/// - `exp(p, v, 0) == p`;
/// - `transport` along a geodesic preserves inner products.
pub trait Manifold {
    type Scalar: Scalar;
    type Point: Clone + Debug;
    type Tangent: Clone + Debug;

    /// Intrinsic dimension.
    fn dimension(&self) -> usize;

    fn inner(&self, p: &Self::Point, u: &Self::Tangent, v: &Self::Tangent) -> Self::Scalar;

    fn norm(&self, p: &Self::Point, v: &Self::Tangent) -> Self::Scalar {
        self.inner(p, v, v).sqrt()
    }

    /// The point reached at time `t` along the geodesic leaving `p` with
    /// velocity `v`. A zero velocity returns `p`.
    fn exp(&self, p: &Self::Point, v: &Self::Tangent, t: Self::Scalar) -> Self::Point;

    /// Parallel translation of `w` from `p` to `exp(p, v, t)` along the same
    /// geodesic.
    fn transport(
        &self,
        p: &Self::Point,
        v: &Self::Tangent,
        t: Self::Scalar,
        w: &Self::Tangent,
    ) -> Self::Tangent;

    fn zero_tangent(&self, p: &Self::Point) -> Self::Tangent;

    fn scale(&self, a: Self::Scalar, v: &Self::Tangent) -> Self::Tangent;

    /// `a·x + y`.
    fn axpy(&self, a: Self::Scalar, x: &Self::Tangent, y: &Self::Tangent) -> Self::Tangent;
}

/// Whether an objective wrapper minimizes or maximizes the underlying function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sense {
    Minimize,
    Maximize,
}

impl Sense {
    /// `+1` for minimization, `-1` for maximization.
    pub fn sign<T: Scalar>(self) -> T {
        match self {
            Sense::Minimize => T::one(),
            Sense::Maximize => -T::one(),
        }
    }
}

/// Reasons a problem cannot produce a search direction or a step.
#[derive(Clone, Debug, PartialEq, Error)]
pub enum DirectionError {
    #[error("Hessian is singular to working precision (condition estimate {condition:e})")]
    SingularHessian { condition: f64 },
    #[error("Hessian operator is not definite (curvature {curvature:e} along a search direction)")]
    IndefiniteOperator { curvature: f64 },
    #[error("direction is not a descent direction (slope {slope:e})")]
    NotDescent { slope: f64 },
    #[error("objective is constant along the direction")]
    Degenerate,
    #[error("operation not provided by this objective")]
    Unsupported,
}

/// A smooth function to be minimized on a manifold.
pub trait Objective {
    type Space: Manifold;

    fn space(&self) -> &Self::Space;

    fn value(&self, p: &PointOf<Self::Space>) -> ScalarOf<Self::Space>;

    /// Riemannian gradient.
    fn gradient(&self, p: &PointOf<Self::Space>) -> TangentOf<Self::Space>;

    /// The Hessian as a self-adjoint operator on the tangent space, so that
    /// `inner(p, hessian_apply(p, u), w)` is the second covariant differential.
    fn hessian_apply(
        &self,
        p: &PointOf<Self::Space>,
        u: &TangentOf<Self::Space>,
    ) -> TangentOf<Self::Space>;

    /// Solution `d` of `Hess(d) = -grad`.
    fn newton_direction(
        &self,
        _p: &PointOf<Self::Space>,
    ) -> Result<TangentOf<Self::Space>, DirectionError> {
        Err(DirectionError::Unsupported)
    }

    /// Closed-form minimizer `λ ≥ 0` of `t ↦ f(exp(p, d, t))`, if the problem has one.
    fn exact_step(
        &self,
        _p: &PointOf<Self::Space>,
        _d: &TangentOf<Self::Space>,
    ) -> Option<Result<ScalarOf<Self::Space>, DirectionError>> {
        None
    }

    /// A cheap step length guaranteeing decrease along `d`, if the problem has one.
    fn step_estimate(
        &self,
        _p: &PointOf<Self::Space>,
        _d: &TangentOf<Self::Space>,
    ) -> Option<Result<ScalarOf<Self::Space>, DirectionError>> {
        None
    }

    /// Distance-to-optimum proxy recorded in iteration traces.
    fn error_metric(&self, p: &PointOf<Self::Space>) -> ScalarOf<Self::Space> {
        let g = self.gradient(p);
        self.space().norm(p, &g)
    }
}
