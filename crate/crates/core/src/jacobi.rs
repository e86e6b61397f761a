//! Diagonalization by maximizing `f(Θ) = tr Hπ(H)`, `H = ΘᵀQΘ`, on `SO(n)`.
//!
//! `π` keeps the diagonal. Since `‖H‖_F` is constant along the orbit,
//! maximizing `Σ H_ii²` drives the off-diagonal mass to zero. In algebra
//! coordinates:
//!
//! ```text
//! grad f = 2[H, π(H)]
//! M(X)   = [H, [X, π(H)]] − [[X, H], π(H)] − 2[H, π([X, H])]     Hess f(X, Y) = ⟨M(X), Y⟩
//! ```

use nalgebra::DMatrix;
use thiserror::Error;

use crate::brockett::NEWTON_SOLVE_TOLERANCE;
use crate::linalg::{commutator, diagonal_part, is_symmetric, off_diagonal_norm};
use crate::manifold::{DirectionError, Objective};
use crate::rotation::{so_linear_cg, Rotation, SkewMatrix, SpecialOrthogonal};
use crate::Scalar;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum JacobiError {
    #[error("Q must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("Q must be symmetric")]
    NotSymmetric,
}

#[derive(Clone, Debug)]
pub struct JacobiProblem<T: Scalar> {
    q: DMatrix<T>,
}

impl<T: Scalar> JacobiProblem<T> {
    pub fn new(q: DMatrix<T>) -> Result<Self, JacobiError> {
        if !q.is_square() {
            return Err(JacobiError::NotSquare {
                rows: q.nrows(),
                cols: q.ncols(),
            });
        }
        if !is_symmetric(&q) {
            return Err(JacobiError::NotSymmetric);
        }
        Ok(Self { q })
    }

    pub fn n(&self) -> usize {
        self.q.nrows()
    }

    pub fn q(&self) -> &DMatrix<T> {
        &self.q
    }

    pub fn h(&self, theta: &Rotation<T>) -> DMatrix<T> {
        let h = theta.conjugate(&self.q);
        (&h + h.transpose()) * T::lit(0.5)
    }

    /// `Σ H_ii²`.
    pub fn value(&self, theta: &Rotation<T>) -> T {
        let h = self.h(theta);
        h.diagonal().norm_squared()
    }

    /// `2[H, π(H)]`.
    pub fn gradient(&self, theta: &Rotation<T>) -> SkewMatrix<T> {
        self.gradient_at(&self.h(theta))
    }

    pub fn gradient_at(&self, h: &DMatrix<T>) -> SkewMatrix<T> {
        SkewMatrix::skew_part(&(commutator(h, &diagonal_part(h)) * T::lit(2.0)))
    }

    pub fn hessian_apply(&self, theta: &Rotation<T>, x: &SkewMatrix<T>) -> SkewMatrix<T> {
        self.m_operator(&self.h(theta), x)
    }

    pub fn m_operator(&self, h: &DMatrix<T>, x: &SkewMatrix<T>) -> SkewMatrix<T> {
        let xm = x.matrix();
        let ph = diagonal_part(h);
        let xh = commutator(xm, h);
        let m = commutator(h, &commutator(xm, &ph)) - commutator(&xh, &ph)
            - commutator(h, &diagonal_part(&xh)) * T::lit(2.0);
        SkewMatrix::skew_part(&m)
    }

    /// Newton direction `D` with `M(D) = −2[H, π(H)]`, by conjugate gradient on `−M`.
    pub fn newton_direction(&self, theta: &Rotation<T>) -> Result<SkewMatrix<T>, DirectionError> {
        let h = self.h(theta);
        let g = self.gradient_at(&h);
        let d = self.n() * (self.n() - 1) / 2;
        let solve = so_linear_cg(
            |x| -&self.m_operator(&h, x),
            &g,
            T::tol(NEWTON_SOLVE_TOLERANCE),
            d,
        )?;
        Ok(solve.solution)
    }

    /// Frobenius norm of the off-diagonal part of `H`.
    pub fn off_diagonal(&self, theta: &Rotation<T>) -> T {
        off_diagonal_norm(&self.h(theta))
    }
}

/// Maximization of `tr Hπ(H)`, posed as minimization of its negative.
#[derive(Clone, Debug)]
pub struct JacobiObjective<T: Scalar> {
    problem: JacobiProblem<T>,
    space: SpecialOrthogonal<T>,
}

impl<T: Scalar> JacobiObjective<T> {
    pub fn new(problem: JacobiProblem<T>) -> Self {
        let space = SpecialOrthogonal::new(problem.n());
        Self { problem, space }
    }

    pub fn problem(&self) -> &JacobiProblem<T> {
        &self.problem
    }
}

impl<T: Scalar> Objective for JacobiObjective<T> {
    type Space = SpecialOrthogonal<T>;

    fn space(&self) -> &SpecialOrthogonal<T> {
        &self.space
    }

    fn value(&self, p: &Rotation<T>) -> T {
        -self.problem.value(p)
    }

    fn gradient(&self, p: &Rotation<T>) -> SkewMatrix<T> {
        -&self.problem.gradient(p)
    }

    fn hessian_apply(&self, p: &Rotation<T>, u: &SkewMatrix<T>) -> SkewMatrix<T> {
        -&self.problem.hessian_apply(p, u)
    }

    fn newton_direction(&self, p: &Rotation<T>) -> Result<SkewMatrix<T>, DirectionError> {
        self.problem.newton_direction(p)
    }

    fn error_metric(&self, p: &Rotation<T>) -> T {
        self.problem.off_diagonal(p)
    }
}
