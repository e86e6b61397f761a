//! The rotation group `SO(n)` with its bi-invariant metric.
//!
//! Tangent vectors at `Θ` are represented in the Lie algebra `so(n)` by left
//! translation: the skew matrix `X` stands for `ΘX ∈ T_Θ`. The metric is
//! `⟨X, Y⟩ = −tr XY`, which for skew matrices is the Frobenius inner product.
//! Geodesics and parallel translation are matrix exponentials:
//!
//! ```text
//! γ(t) = Θ e^{tX}
//! τY   = e^{−tX/2} Y e^{tX/2}        (in algebra coordinates at γ(t))
//! ```

use std::marker::PhantomData;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use thiserror::Error;

use crate::linalg::{expm, frobenius_inner, orthogonality_defect, polar_orthogonal, skew_defect};
use crate::manifold::{DirectionError, Manifold};
use crate::Scalar;

/// Drift in `‖ΘᵀΘ − I‖_F` above which a rotation is re-orthonormalized.
pub const ORTHOGONALITY_DRIFT: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum RotationError {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not orthogonal (‖ΘᵀΘ − I‖ = {defect:e})")]
    NotOrthogonal { defect: f64 },
    #[error("determinant is {det}, expected +1")]
    WrongDeterminant { det: f64 },
    #[error("matrix is not skew-symmetric (‖X + Xᵀ‖ = {defect:e})")]
    NotSkew { defect: f64 },
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// An orthogonal matrix with determinant `+1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Rotation<T: Scalar>(DMatrix<T>);

impl<T: Scalar> Rotation<T> {
    /// Accepts `m` when `‖mᵀm − I‖_F ≤ 1e-10` and `|det m − 1| ≤ 1e-8`.
    pub fn new(m: DMatrix<T>) -> Result<Self, RotationError> {
        if !m.is_square() {
            return Err(RotationError::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        let defect = orthogonality_defect(&m);
        if defect > T::tol(1e-10) {
            return Err(RotationError::NotOrthogonal {
                defect: defect.to_f64_lossy(),
            });
        }
        let det = m.determinant();
        if (det - T::one()).abs() > T::tol(1e-8) {
            return Err(RotationError::WrongDeterminant {
                det: det.to_f64_lossy(),
            });
        }
        Ok(Self(m))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<T> {
        self.0
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    /// `ΘᵀAΘ`.
    pub fn conjugate(&self, a: &DMatrix<T>) -> DMatrix<T> {
        self.0.transpose() * a * &self.0
    }

    pub fn orthogonality_defect(&self) -> T {
        orthogonality_defect(&self.0)
    }

    /// Product of two rotations, re-orthonormalized if round-off has drifted.
    pub fn compose(&self, other: &Self) -> Self {
        Self::from_product(&self.0 * &other.0)
    }

    fn from_product(m: DMatrix<T>) -> Self {
        if orthogonality_defect(&m) > T::tol(ORTHOGONALITY_DRIFT) {
            Self(polar_orthogonal(&m))
        } else {
            Self(m)
        }
    }
}

/// An element of `so(n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SkewMatrix<T: Scalar>(DMatrix<T>);

impl<T: Scalar> SkewMatrix<T> {
    /// Accepts `m` when `‖m + mᵀ‖_F ≤ 1e-12·max(1, ‖m‖_F)`.
    pub fn new(m: DMatrix<T>) -> Result<Self, RotationError> {
        if !m.is_square() {
            return Err(RotationError::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        let defect = skew_defect(&m);
        if defect > T::tol(1e-12) * m.norm().max(T::one()) {
            return Err(RotationError::NotSkew {
                defect: defect.to_f64_lossy(),
            });
        }
        Ok(Self(m))
    }

    /// `(m − mᵀ)/2`.
    pub fn skew_part(m: &DMatrix<T>) -> Self {
        Self((m - m.transpose()) * T::lit(0.5))
    }

    pub fn zeros(n: usize) -> Self {
        Self(DMatrix::zeros(n, n))
    }

    /// `E_ij`: `+1` at `(i, j)`, `−1` at `(j, i)`.
    pub fn basis(n: usize, i: usize, j: usize) -> Self {
        assert!(i != j && i < n && j < n, "E_ij needs distinct indices below n");
        let mut m = DMatrix::zeros(n, n);
        m[(i, j)] = T::one();
        m[(j, i)] = -T::one();
        Self(m)
    }

    /// Builds `Σ_{i<j} c_k E_ij` from coefficients in row-major upper-triangle order.
    pub fn from_coefficients(n: usize, coeffs: &[T]) -> Self {
        assert_eq!(coeffs.len(), n * (n - 1) / 2, "wrong number of coefficients");
        let mut m = DMatrix::zeros(n, n);
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                m[(i, j)] = coeffs[k];
                m[(j, i)] = -coeffs[k];
                k += 1;
            }
        }
        Self(m)
    }

    /// Upper-triangle entries in row-major order, inverse of [`Self::from_coefficients`].
    pub fn coefficients(&self) -> Vec<T> {
        let n = self.dim();
        let mut out = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<T> {
        self.0
    }

    /// `⟨X, Y⟩ = −tr XY`.
    pub fn inner(&self, other: &Self) -> T {
        frobenius_inner(&self.0, &other.0)
    }

    pub fn norm(&self) -> T {
        self.0.norm()
    }
}

impl<T: Scalar> Add for &SkewMatrix<T> {
    type Output = SkewMatrix<T>;
    fn add(self, rhs: Self) -> SkewMatrix<T> {
        SkewMatrix(&self.0 + &rhs.0)
    }
}

impl<T: Scalar> Sub for &SkewMatrix<T> {
    type Output = SkewMatrix<T>;
    fn sub(self, rhs: Self) -> SkewMatrix<T> {
        SkewMatrix(&self.0 - &rhs.0)
    }
}

impl<T: Scalar> Mul<T> for &SkewMatrix<T> {
    type Output = SkewMatrix<T>;
    fn mul(self, rhs: T) -> SkewMatrix<T> {
        SkewMatrix(&self.0 * rhs)
    }
}

impl<T: Scalar> Neg for &SkewMatrix<T> {
    type Output = SkewMatrix<T>;
    fn neg(self) -> SkewMatrix<T> {
        SkewMatrix(-&self.0)
    }
}

/// `e^{tX}`.
pub fn skew_exp<T: Scalar>(x: &SkewMatrix<T>, t: T) -> Rotation<T> {
    Rotation::from_product(expm(&(&x.0 * t)))
}

/// `Θ e^{tX}`, the geodesic leaving `Θ` with velocity `ΘX`.
pub fn so_geodesic<T: Scalar>(theta: &Rotation<T>, x: &SkewMatrix<T>, t: T) -> Rotation<T> {
    if t == T::zero() {
        return theta.clone();
    }
    Rotation::from_product(&theta.0 * expm(&(&x.0 * t)))
}

/// Parallel translation of `Y` along `t ↦ Θe^{tX}`, in algebra coordinates:
/// `e^{−tX/2} Y e^{tX/2}`.
pub fn so_transport<T: Scalar>(y: &SkewMatrix<T>, x: &SkewMatrix<T>, t: T) -> SkewMatrix<T> {
    if t == T::zero() {
        return y.clone();
    }
    let half = expm(&(&x.0 * (t * T::lit(0.5))));
    SkewMatrix::skew_part(&(half.transpose() * &y.0 * half))
}

/// `SO(n)` as a [`Manifold`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpecialOrthogonal<T> {
    n: usize,
    _scalar: PhantomData<T>,
}

impl<T> SpecialOrthogonal<T> {
    pub fn new(n: usize) -> Self {
        assert!(n >= 2, "SO(n) needs n >= 2");
        Self {
            n,
            _scalar: PhantomData,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

impl<T: Scalar> Manifold for SpecialOrthogonal<T> {
    type Scalar = T;
    type Point = Rotation<T>;
    type Tangent = SkewMatrix<T>;

    fn dimension(&self) -> usize {
        self.n * (self.n - 1) / 2
    }

    fn inner(&self, _p: &Rotation<T>, u: &SkewMatrix<T>, v: &SkewMatrix<T>) -> T {
        u.inner(v)
    }

    fn exp(&self, p: &Rotation<T>, v: &SkewMatrix<T>, t: T) -> Rotation<T> {
        so_geodesic(p, v, t)
    }

    fn transport(
        &self,
        _p: &Rotation<T>,
        v: &SkewMatrix<T>,
        t: T,
        w: &SkewMatrix<T>,
    ) -> SkewMatrix<T> {
        so_transport(w, v, t)
    }

    fn zero_tangent(&self, _p: &Rotation<T>) -> SkewMatrix<T> {
        SkewMatrix::zeros(self.n)
    }

    fn scale(&self, a: T, v: &SkewMatrix<T>) -> SkewMatrix<T> {
        v * a
    }

    fn axpy(&self, a: T, x: &SkewMatrix<T>, y: &SkewMatrix<T>) -> SkewMatrix<T> {
        SkewMatrix(&x.0 * a + &y.0)
    }
}

/// Outcome of [`so_linear_cg`].
#[derive(Clone, Debug)]
pub struct LinearSolve<T: Scalar> {
    pub solution: SkewMatrix<T>,
    pub iterations: usize,
    /// `‖A x − b‖ / ‖b‖` recomputed from the returned solution.
    pub relative_residual: T,
}

/// Linear conjugate gradient on `so(n)` for `A x = b` with `A` self-adjoint and
/// positive definite in the Frobenius inner product.
///
/// Stops at relative residual `tol` or after `cap` iterations per cycle; the
/// residual is then recomputed and the iteration restarted (at most three
/// cycles) if it still exceeds `100·tol`. Non-positive curvature along a
/// search direction aborts with [`DirectionError::IndefiniteOperator`].
pub fn so_linear_cg<T, F>(
    apply: F,
    b: &SkewMatrix<T>,
    tol: T,
    cap: usize,
) -> Result<LinearSolve<T>, DirectionError>
where
    T: Scalar,
    F: Fn(&SkewMatrix<T>) -> SkewMatrix<T>,
{
    let n = b.dim();
    let b_norm = b.norm();
    let mut x = SkewMatrix::zeros(n);
    if b_norm == T::zero() {
        return Ok(LinearSolve {
            solution: x,
            iterations: 0,
            relative_residual: T::zero(),
        });
    }
    let mut iterations = 0;
    for _cycle in 0..3 {
        let mut r = b - &apply(&x);
        let mut p = r.clone();
        let mut rr = r.inner(&r);
        for _ in 0..cap.max(1) {
            if rr.sqrt() <= tol * b_norm {
                break;
            }
            let ap = apply(&p);
            let curvature = p.inner(&ap);
            if curvature <= T::zero() {
                return Err(DirectionError::IndefiniteOperator {
                    curvature: (curvature / p.inner(&p)).to_f64_lossy(),
                });
            }
            let alpha = rr / curvature;
            x = SkewMatrix(&x.0 + &p.0 * alpha);
            r = SkewMatrix(&r.0 - &ap.0 * alpha);
            let rr_next = r.inner(&r);
            p = SkewMatrix(&r.0 + &p.0 * (rr_next / rr));
            rr = rr_next;
            iterations += 1;
        }
        let residual = (b - &apply(&x)).norm() / b_norm;
        if residual <= tol * T::lit(100.0) {
            return Ok(LinearSolve {
                solution: x,
                iterations,
                relative_residual: residual,
            });
        }
    }
    let residual = (b - &apply(&x)).norm() / b_norm;
    Ok(LinearSolve {
        solution: x,
        iterations,
        relative_residual: residual,
    })
}

/// Matrix of a linear operator on `so(n)` in the `E_ij` basis (`i < j`, row-major).
pub fn operator_matrix<T, F>(n: usize, apply: F) -> DMatrix<T>
where
    T: Scalar,
    F: Fn(&SkewMatrix<T>) -> SkewMatrix<T>,
{
    let d = n * (n - 1) / 2;
    let mut m = DMatrix::zeros(d, d);
    let mut col = 0;
    for i in 0..n {
        for j in i + 1..n {
            let image = apply(&SkewMatrix::basis(n, i, j)).coefficients();
            for (row, v) in image.into_iter().enumerate() {
                m[(row, col)] = v;
            }
            col += 1;
        }
    }
    m
}
