//! Brockett's function `f(Θ) = tr ΘᵀQΘN` on `SO(n)`.
//!
//! With `H = ΘᵀQΘ`, all quantities are expressed in algebra coordinates:
//!
//! ```text
//! grad f   = [H, N]
//! L(X)     = [H, [X, N]] − [[X, H], N]        Hess f(X, Y) = ½⟨L(X), Y⟩
//! ```
//!
//! The maximum is attained where `H` is diagonal with its eigenvalues ordered
//! like the diagonal of `N`.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::linalg::{commutator, is_symmetric};
use crate::manifold::{DirectionError, Manifold, Objective};
use crate::rotation::{so_linear_cg, Rotation, SkewMatrix, SpecialOrthogonal};
use crate::Scalar;

/// Relative residual targeted by the inner Newton solve.
pub const NEWTON_SOLVE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum BrockettError {
    #[error("Q must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("Q must be symmetric")]
    NotSymmetric,
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("diagonal of N repeats at positions {first} and {second}")]
    RepeatedWeight { first: usize, second: usize },
    #[error("direction does not increase f (slope {slope:e})")]
    NotAscentDirection { slope: f64 },
    #[error("step estimate undefined: ‖[Ω, H]‖·‖[Ω, N]‖ = 0")]
    DegenerateCommutator,
}

#[derive(Clone, Debug)]
pub struct BrockettProblem<T: Scalar> {
    q: DMatrix<T>,
    weights: DVector<T>,
    n_matrix: DMatrix<T>,
    spectrum: Vec<T>,
}

impl<T: Scalar> BrockettProblem<T> {
    /// `q` symmetric, `weights` the diagonal of `N` with pairwise distinct entries.
    pub fn new(q: DMatrix<T>, weights: DVector<T>) -> Result<Self, BrockettError> {
        if !q.is_square() {
            return Err(BrockettError::NotSquare {
                rows: q.nrows(),
                cols: q.ncols(),
            });
        }
        if !is_symmetric(&q) {
            return Err(BrockettError::NotSymmetric);
        }
        if weights.len() != q.nrows() {
            return Err(BrockettError::DimensionMismatch {
                expected: q.nrows(),
                found: weights.len(),
            });
        }
        for first in 0..weights.len() {
            for second in first + 1..weights.len() {
                if weights[first] == weights[second] {
                    return Err(BrockettError::RepeatedWeight { first, second });
                }
            }
        }
        let mut spectrum: Vec<T> = q.clone().symmetric_eigenvalues().iter().copied().collect();
        spectrum.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));
        let n_matrix = DMatrix::from_diagonal(&weights);
        Ok(Self {
            q,
            weights,
            n_matrix,
            spectrum,
        })
    }

    pub fn n(&self) -> usize {
        self.q.nrows()
    }

    pub fn q(&self) -> &DMatrix<T> {
        &self.q
    }

    pub fn weights(&self) -> &DVector<T> {
        &self.weights
    }

    pub fn n_matrix(&self) -> &DMatrix<T> {
        &self.n_matrix
    }

    /// Eigenvalues of `Q`, descending.
    pub fn spectrum(&self) -> &[T] {
        &self.spectrum
    }

    /// `H = ΘᵀQΘ`, symmetrized against round-off.
    pub fn h(&self, theta: &Rotation<T>) -> DMatrix<T> {
        let h = theta.conjugate(&self.q);
        (&h + h.transpose()) * T::lit(0.5)
    }

    pub fn value(&self, theta: &Rotation<T>) -> T {
        self.value_at(&self.h(theta))
    }

    pub fn value_at(&self, h: &DMatrix<T>) -> T {
        (0..self.n()).fold(T::zero(), |acc, i| acc + h[(i, i)] * self.weights[i])
    }

    /// The largest value of `f`: eigenvalues paired with weights in the same order.
    pub fn optimal_value(&self) -> T {
        let mut w: Vec<T> = self.weights.iter().copied().collect();
        w.sort_by(|a, b| b.partial_cmp(a).expect("finite weights"));
        self.spectrum
            .iter()
            .zip(&w)
            .fold(T::zero(), |acc, (l, v)| acc + *l * *v)
    }

    /// `[H, N]`.
    pub fn gradient(&self, theta: &Rotation<T>) -> SkewMatrix<T> {
        self.gradient_at(&self.h(theta))
    }

    pub fn gradient_at(&self, h: &DMatrix<T>) -> SkewMatrix<T> {
        SkewMatrix::skew_part(&commutator(h, &self.n_matrix))
    }

    /// `L(X) = [H, [X, N]] − [[X, H], N]`.
    pub fn hessian_apply(&self, theta: &Rotation<T>, x: &SkewMatrix<T>) -> SkewMatrix<T> {
        self.l_operator(&self.h(theta), x)
    }

    pub fn l_operator(&self, h: &DMatrix<T>, x: &SkewMatrix<T>) -> SkewMatrix<T> {
        let xm = x.matrix();
        let a = commutator(h, &commutator(xm, &self.n_matrix));
        let b = commutator(&commutator(xm, h), &self.n_matrix);
        SkewMatrix::skew_part(&(a - b))
    }

    /// Step bound `t = 2 tr HΩN / (‖[Ω, H]‖‖[Ω, N]‖)` along the ascent direction `Ω`;
    /// `f(Θe^{sΩ})` is nondecreasing for `s ∈ [0, t]`.
    pub fn step_estimate(&self, theta: &Rotation<T>, omega: &SkewMatrix<T>) -> Result<T, BrockettError> {
        self.step_estimate_at(&self.h(theta), omega)
    }

    pub fn step_estimate_at(&self, h: &DMatrix<T>, omega: &SkewMatrix<T>) -> Result<T, BrockettError> {
        let om = omega.matrix();
        let denom = commutator(om, h).norm() * commutator(om, &self.n_matrix).norm();
        if denom == T::zero() {
            return Err(BrockettError::DegenerateCommutator);
        }
        let slope = (h * om * &self.n_matrix).trace() * T::lit(2.0);
        if slope <= T::zero() {
            return Err(BrockettError::NotAscentDirection {
                slope: slope.to_f64_lossy(),
            });
        }
        Ok(slope / denom)
    }

    /// Newton direction `D` with `½L(D) = −[H, N]`, computed by conjugate
    /// gradient on `−½L`, which is positive definite near the maximum.
    pub fn newton_direction(&self, theta: &Rotation<T>) -> Result<SkewMatrix<T>, DirectionError> {
        let h = self.h(theta);
        let g = self.gradient_at(&h);
        let d = self.n() * (self.n() - 1) / 2;
        let solve = so_linear_cg(
            |x| &self.l_operator(&h, x) * T::lit(-0.5),
            &g,
            T::tol(NEWTON_SOLVE_TOLERANCE),
            d,
        )?;
        Ok(solve.solution)
    }

    /// `‖H − D‖_F` where `D` holds the eigenvalues of `H` ordered like the weights.
    pub fn diagonal_error(&self, theta: &Rotation<T>) -> T {
        let h = self.h(theta);
        let mut eig: Vec<T> = h.clone().symmetric_eigenvalues().iter().copied().collect();
        eig.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));
        let mut order: Vec<usize> = (0..self.n()).collect();
        order.sort_by(|&a, &b| {
            self.weights[b]
                .partial_cmp(&self.weights[a])
                .expect("finite weights")
        });
        let mut target = DMatrix::zeros(self.n(), self.n());
        for (rank, &i) in order.iter().enumerate() {
            target[(i, i)] = eig[rank];
        }
        (h - target).norm()
    }

    /// Largest deviation between the eigenvalues of `H` and those of `Q`.
    pub fn isospectral_drift(&self, theta: &Rotation<T>) -> T {
        let mut eig: Vec<T> = self.h(theta).symmetric_eigenvalues().iter().copied().collect();
        eig.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));
        eig.iter()
            .zip(&self.spectrum)
            .fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs()))
    }
}

/// The `(E_ij, X, X)` component of the third covariant derivative of `f` at a
/// point where `H = diag(h)`, with `x[(i, k)]` the coefficient of `E_ik`:
///
/// ```text
/// −2 Σ_{k≠i,j} x^{ik} x^{jk} ((h_iν_j − h_jν_i) + (h_jν_k − h_kν_j) + (h_kν_i − h_iν_k))
/// ```
pub fn brockett_third_component<T: Scalar>(
    h: &[T],
    nu: &[T],
    x: &SkewMatrix<T>,
    i: usize,
    j: usize,
) -> T {
    let xm = x.matrix();
    let mut sum = T::zero();
    for k in 0..h.len() {
        if k == i || k == j {
            continue;
        }
        let cyclic = (h[i] * nu[j] - h[j] * nu[i])
            + (h[j] * nu[k] - h[k] * nu[j])
            + (h[k] * nu[i] - h[i] * nu[k]);
        sum += xm[(i, k)] * xm[(j, k)] * cyclic;
    }
    sum * T::lit(-2.0)
}

/// Maximization of Brockett's function, posed as minimization of `−f`.
#[derive(Clone, Debug)]
pub struct BrockettObjective<T: Scalar> {
    problem: BrockettProblem<T>,
    space: SpecialOrthogonal<T>,
}

impl<T: Scalar> BrockettObjective<T> {
    pub fn new(problem: BrockettProblem<T>) -> Self {
        let space = SpecialOrthogonal::new(problem.n());
        Self { problem, space }
    }

    pub fn problem(&self) -> &BrockettProblem<T> {
        &self.problem
    }
}

impl<T: Scalar> Objective for BrockettObjective<T> {
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
        &self.problem.hessian_apply(p, u) * T::lit(-0.5)
    }

    fn newton_direction(&self, p: &Rotation<T>) -> Result<SkewMatrix<T>, DirectionError> {
        self.problem.newton_direction(p)
    }

    fn step_estimate(&self, p: &Rotation<T>, d: &SkewMatrix<T>) -> Option<Result<T, DirectionError>> {
        Some(self.problem.step_estimate(p, d).map_err(|e| match e {
            BrockettError::NotAscentDirection { slope } => DirectionError::NotDescent { slope: -slope },
            _ => DirectionError::Degenerate,
        }))
    }

    fn error_metric(&self, p: &Rotation<T>) -> T {
        self.problem.diagonal_error(p)
    }
}

impl<T: Scalar> BrockettObjective<T> {
    /// Norm of the gradient in the `so(n)` metric.
    pub fn gradient_norm(&self, p: &Rotation<T>) -> T {
        let g = self.problem.gradient(p);
        self.space.norm(p, &g)
    }
}
