//! Dense linear-algebra helpers used by the manifolds.

use nalgebra::{DMatrix, DVector};

use crate::Scalar;

/// `[a, b] = ab - ba`.
pub fn commutator<T: Scalar>(a: &DMatrix<T>, b: &DMatrix<T>) -> DMatrix<T> {
    a * b - b * a
}

/// Frobenius inner product `tr(aᵀb)`.
pub fn frobenius_inner<T: Scalar>(a: &DMatrix<T>, b: &DMatrix<T>) -> T {
    a.dot(b)
}

/// Diagonal projection: keeps the diagonal, zeroes everything else.
pub fn diagonal_part<T: Scalar>(a: &DMatrix<T>) -> DMatrix<T> {
    DMatrix::from_diagonal(&a.diagonal())
}

/// Frobenius norm of the off-diagonal part.
pub fn off_diagonal_norm<T: Scalar>(a: &DMatrix<T>) -> T {
    let mut acc = T::zero();
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            if i != j {
                acc += a[(i, j)] * a[(i, j)];
            }
        }
    }
    acc.sqrt()
}

pub fn is_symmetric<T: Scalar>(a: &DMatrix<T>) -> bool {
    a.is_square() && (0..a.nrows()).all(|i| (0..i).all(|j| a[(i, j)] == a[(j, i)]))
}

/// `‖a + aᵀ‖_F`.
pub fn skew_defect<T: Scalar>(a: &DMatrix<T>) -> T {
    (a + a.transpose()).norm()
}

/// `‖aᵀa - I‖_F`.
pub fn orthogonality_defect<T: Scalar>(a: &DMatrix<T>) -> T {
    (a.transpose() * a - DMatrix::identity(a.nrows(), a.ncols())).norm()
}

/// Matrix exponential by scaling and squaring with a Padé approximant.
pub fn expm<T: Scalar>(a: &DMatrix<T>) -> DMatrix<T> {
    a.exp()
}

/// Orthogonal polar factor `U Vᵀ` of `a = U Σ Vᵀ`.
pub fn polar_orthogonal<T: Scalar>(a: &DMatrix<T>) -> DMatrix<T> {
    let svd = a.clone().svd(true, true);
    let u = svd.u.expect("svd computed with u");
    let v_t = svd.v_t.expect("svd computed with v_t");
    u * v_t
}

/// Induced 1-norm (maximum absolute column sum).
pub fn norm_one<T: Scalar>(a: &DMatrix<T>) -> T {
    a.column_iter()
        .map(|c| c.iter().fold(T::zero(), |acc, v| acc + v.abs()))
        .fold(T::zero(), |m, v| if v > m { v } else { m })
}

/// A square system factored with partial pivoting together with its
/// 1-norm condition number `‖A‖₁‖A⁻¹‖₁`.
#[derive(Clone, Debug)]
pub struct ConditionedSolve<T: Scalar> {
    inverse: DMatrix<T>,
    condition: T,
    inverse_norm: T,
}

impl<T: Scalar> ConditionedSolve<T> {
    /// Returns `None` when the matrix is exactly singular (a zero pivot).
    pub fn factor(a: &DMatrix<T>) -> Option<Self> {
        assert!(a.is_square(), "ConditionedSolve needs a square matrix");
        let lu = a.clone().lu();
        let inverse = lu.try_inverse()?;
        if inverse.iter().any(|v| !v.is_finite()) {
            return None;
        }
        let inverse_norm = norm_one(&inverse);
        let condition = norm_one(a) * inverse_norm;
        Some(Self {
            inverse,
            condition,
            inverse_norm,
        })
    }

    pub fn condition(&self) -> T {
        self.condition
    }

    /// `‖A⁻¹‖₁`.
    pub fn inverse_norm(&self) -> T {
        self.inverse_norm
    }

    pub fn solve(&self, b: &DVector<T>) -> DVector<T> {
        &self.inverse * b
    }
}
