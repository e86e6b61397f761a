//! Rayleigh's quotient `ρ(x) = xᵀQx` on the sphere.
//!
//! With the ambient metric:
//!
//! ```text
//! ½ grad ρ(x)   = Qx − ρ(x)x
//! ½ Hess ρ(x)·u = (I − xxᵀ)(Q − ρ(x)I)u
//! ```
//!
//! Critical points are the eigenvectors of `Q`. The Newton direction has the
//! closed form `H = −x + α(Q − ρI)⁻¹x` with `α = 1/xᵀ(Q − ρI)⁻¹x`, and the
//! maximum of `ρ` over any great circle is available in closed form.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::linalg::{is_symmetric, ConditionedSolve};
use crate::manifold::{DirectionError, Manifold, Objective, Sense};
use crate::sphere::{line_angle, Sphere, SphereError, SpherePoint, SphereTangent};
use crate::Scalar;

/// Condition number above which `Q − ρI` counts as singular.
pub const SINGULAR_SHIFT_CONDITION: f64 = 1e14;

/// Eigenresidual `‖Qx − ρx‖ / ‖Q‖_F` below which `x` counts as an eigenvector.
///
/// An ill-conditioned shift only stops the iteration once this holds: before
/// that, the nearly singular solve still points accurately at the eigenvector.
pub const CONVERGED_RESIDUAL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum RayleighError {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix must be exactly symmetric")]
    NotSymmetric,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("xᵀA⁻¹x = {value:e} is too small to pivot on")]
    DegeneratePivot { value: f64 },
    #[error("Q − ρI is singular to working precision (condition {condition:e})")]
    SingularShift { condition: f64 },
    #[error("ρ is constant along the great circle")]
    DegenerateDirection,
    #[error(transparent)]
    Sphere(#[from] SphereError),
}

/// Rayleigh's quotient for a symmetric matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct RayleighProblem<T: Scalar> {
    q: DMatrix<T>,
}

/// Closed-form maximizer of `ρ(xc + hs)` over the great circle through `x`
/// with unit direction `h`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineMax<T> {
    pub c: T,
    pub s: T,
    /// `1 − c`, computed as `s²/(1 + c)`.
    pub v: T,
}

impl<T: Scalar> LineMax<T> {
    /// Arc length `t ∈ [0, π)` with `(cos t, sin t) = ±(c, s)`.
    ///
    /// `ρ` has period `π` along a great circle, so the antipodal pair gives
    /// the same value; this picks the forward representative.
    pub fn arc(&self) -> T {
        let t = self.s.atan2(self.c);
        if t < T::zero() {
            t + T::pi()
        } else {
            t
        }
    }
}

impl<T: Scalar> RayleighProblem<T> {
    pub fn new(q: DMatrix<T>) -> Result<Self, RayleighError> {
        if !q.is_square() {
            return Err(RayleighError::NotSquare {
                rows: q.nrows(),
                cols: q.ncols(),
            });
        }
        if !is_symmetric(&q) {
            return Err(RayleighError::NotSymmetric);
        }
        Ok(Self { q })
    }

    /// `Q = diag(entries)`.
    pub fn diagonal(entries: &[T]) -> Self {
        Self {
            q: DMatrix::from_diagonal(&DVector::from_column_slice(entries)),
        }
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.q
    }

    pub fn dim(&self) -> usize {
        self.q.nrows()
    }

    pub fn value(&self, x: &SpherePoint<T>) -> T {
        let x = x.as_vector();
        x.dot(&(&self.q * x))
    }

    /// `‖Qx − ρ(x)x‖`.
    pub fn residual(&self, x: &SpherePoint<T>) -> T {
        let xv = x.as_vector();
        let qx = &self.q * xv;
        let rho = xv.dot(&qx);
        (qx - xv * rho).norm()
    }

    /// `2(Qx − ρ(x)x)`.
    pub fn gradient(&self, x: &SpherePoint<T>) -> SphereTangent<T> {
        let xv = x.as_vector();
        let qx = &self.q * xv;
        let rho = xv.dot(&qx);
        (qx - xv * rho) * T::lit(2.0)
    }

    /// `2(I − xxᵀ)(Q − ρ(x)I)u` for `u` tangent at `x`.
    pub fn hessian_apply(
        &self,
        x: &SpherePoint<T>,
        u: &SphereTangent<T>,
    ) -> Result<SphereTangent<T>, RayleighError> {
        if (x.as_vector().dot(u)).abs() > T::tol(1e-12) * u.norm().max(T::one()) {
            return Err(SphereError::NotTangent {
                defect: x.as_vector().dot(u).to_f64_lossy(),
            }
            .into());
        }
        Ok(self.hessian_unchecked(x, u))
    }

    fn hessian_unchecked(&self, x: &SpherePoint<T>, u: &SphereTangent<T>) -> SphereTangent<T> {
        let rho = self.value(x);
        let au = &self.q * u - u * rho;
        x.project(&au) * T::lit(2.0)
    }

    /// Newton direction `H = −x + α(Q − ρI)⁻¹x`, the tangent solution of
    /// `Hess ρ · H = −grad ρ`.
    ///
    /// Fails with [`RayleighError::SingularShift`] once `x` is an eigenvector
    /// to working precision: `Q − ρ(x)I` has a condition estimate above
    /// [`SINGULAR_SHIFT_CONDITION`] and the eigenresidual is below
    /// [`CONVERGED_RESIDUAL`], or the shift cannot be factored at all.
    pub fn newton_step(&self, x: &SpherePoint<T>) -> Result<SphereTangent<T>, RayleighError> {
        let (y, _) = self.shifted_solve(x)?;
        let xv = x.as_vector();
        let alpha = T::one() / xv.dot(&y);
        Ok(y * alpha - xv)
    }

    /// `y = (Q − ρ(x)I)⁻¹x` and `ρ(x)`, failing on a singular shift at an eigenvector.
    ///
    /// When `ρ(x)` lands exactly on an eigenvalue before `x` has converged,
    /// the shift is nudged by one ulp of `‖Q‖`; the solve then points along
    /// the eigenvector, which is the direction the exact solve tends to.
    pub fn shifted_solve(&self, x: &SpherePoint<T>) -> Result<(DVector<T>, T), RayleighError> {
        let rho = self.value(x);
        let n = self.dim();
        let scale = self.q.norm();
        let converged = self.residual(x) <= T::tol(CONVERGED_RESIDUAL) * scale;
        let factor = |shift: T| ConditionedSolve::factor(&(&self.q - DMatrix::identity(n, n) * shift));
        let solver = match factor(rho) {
            Some(s) => s,
            None if !converged => factor(rho + T::eps() * scale.max(T::one())).ok_or(
                RayleighError::SingularShift {
                    condition: f64::INFINITY,
                },
            )?,
            None => {
                return Err(RayleighError::SingularShift {
                    condition: f64::INFINITY,
                })
            }
        };
        let condition = solver.condition();
        let singular = RayleighError::SingularShift {
            condition: condition.to_f64_lossy(),
        };
        if condition > T::lit(SINGULAR_SHIFT_CONDITION) && converged {
            return Err(singular);
        }
        let y = solver.solve(x.as_vector());
        if !y.iter().all(|v| v.is_finite()) {
            return Err(singular);
        }
        Ok((y, rho))
    }

    /// Maximizer of `ρ` along the great circle `t ↦ x cos t + h sin t`.
    ///
    /// With `a = 2xᵀQh`, `b = xᵀQx − hᵀQh`, `r = √(a² + b²)`:
    /// `c = √((1 + b/r)/2), s = a/(2rc)` when `b ≥ 0`, otherwise
    /// `s = √((1 − b/r)/2), c = a/(2rs)`.
    pub fn line_max(
        &self,
        x: &SpherePoint<T>,
        h: &SphereTangent<T>,
    ) -> Result<LineMax<T>, RayleighError> {
        let norm = h.norm();
        if (norm - T::one()).abs() > T::tol(1e-12) {
            return Err(SphereError::NotUnitDirection {
                norm: norm.to_f64_lossy(),
            }
            .into());
        }
        line_extremum(&self.q, T::one(), x.as_vector(), h)
    }
}

/// Closed-form maximizer of `sign·ρ` on a great circle. `sign = −1` turns the
/// maximizing formulas into a minimizer by negating `a` and `b`.
fn line_extremum<T: Scalar>(
    q: &DMatrix<T>,
    sign: T,
    x: &DVector<T>,
    h: &DVector<T>,
) -> Result<LineMax<T>, RayleighError> {
    // Re-project h: near an eigenvector xᵀQh is tiny and a tangency defect
    // of a few ulps in h would swamp it. The residual form of a is immune.
    let h = h - x * x.dot(h);
    let h_norm = h.norm();
    if h_norm == T::zero() {
        return Err(RayleighError::DegenerateDirection);
    }
    let h = h / h_norm;
    let qx = q * x;
    let rho = x.dot(&qx);
    let qh = q * &h;
    let a = sign * T::lit(2.0) * (qx - x * rho).dot(&h);
    let b = sign * (rho - h.dot(&qh));
    let r = a.hypot(b);
    let scale = q.norm();
    if r <= T::eps() * scale {
        return Err(RayleighError::DegenerateDirection);
    }
    let half = T::lit(0.5);
    let two = T::lit(2.0);
    let (c, s) = if b >= T::zero() {
        let c = (half * (T::one() + b / r)).sqrt();
        (c, a / (two * r * c))
    } else {
        let s = (half * (T::one() - b / r)).sqrt();
        (a / (two * r * s), s)
    };
    Ok(LineMax {
        c,
        s,
        v: s * s / (T::one() + c),
    })
}

/// Solution `u` of `(I − xxᵀ)Au = v` with `u` tangent at `x`:
///
/// `u = A⁻¹(v − (xᵀA⁻¹v / xᵀA⁻¹x)·x)`.
pub fn solve_projected_linear<T: Scalar>(
    a: &DMatrix<T>,
    x: &SpherePoint<T>,
    v: &SphereTangent<T>,
) -> Result<SphereTangent<T>, RayleighError> {
    let solver = ConditionedSolve::factor(a).ok_or(RayleighError::SingularMatrix)?;
    let xv = x.as_vector();
    let ainv_x = solver.solve(xv);
    let ainv_v = solver.solve(v);
    let pivot = xv.dot(&ainv_x);
    if pivot.abs() < T::lit(1e-14) * solver.inverse_norm() {
        return Err(RayleighError::DegeneratePivot {
            value: pivot.to_f64_lossy(),
        });
    }
    let coeff = xv.dot(&ainv_v) / pivot;
    Ok(ainv_v - ainv_x * coeff)
}

/// Rayleigh's quotient as a solver objective.
///
/// Solvers minimize, so [`Sense::Maximize`] runs on `−ρ`. The closed-form
/// line search goes through the same great-circle formulas with `a` and `b`
/// negated for minimization.
#[derive(Clone, Debug)]
pub struct RayleighObjective<T: Scalar> {
    problem: RayleighProblem<T>,
    sense: Sense,
    space: Sphere<T>,
    target: Option<DVector<T>>,
}

impl<T: Scalar> RayleighObjective<T> {
    pub fn new(problem: RayleighProblem<T>, sense: Sense) -> Self {
        let space = Sphere::new(problem.dim());
        Self {
            problem,
            sense,
            space,
            target: None,
        }
    }

    /// Reports the angle to `target` as the error metric.
    pub fn with_target(mut self, target: DVector<T>) -> Self {
        let norm = target.norm();
        self.target = Some(target / norm);
        self
    }

    pub fn problem(&self) -> &RayleighProblem<T> {
        &self.problem
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }
}

impl<T: Scalar> Objective for RayleighObjective<T> {
    type Space = Sphere<T>;

    fn space(&self) -> &Sphere<T> {
        &self.space
    }

    fn value(&self, p: &SpherePoint<T>) -> T {
        self.sense.sign::<T>() * self.problem.value(p)
    }

    fn gradient(&self, p: &SpherePoint<T>) -> DVector<T> {
        self.problem.gradient(p) * self.sense.sign::<T>()
    }

    fn hessian_apply(&self, p: &SpherePoint<T>, u: &DVector<T>) -> DVector<T> {
        self.problem.hessian_unchecked(p, u) * self.sense.sign::<T>()
    }

    fn newton_direction(&self, p: &SpherePoint<T>) -> Result<DVector<T>, DirectionError> {
        self.problem.newton_step(p).map_err(|e| match e {
            RayleighError::SingularShift { condition } => {
                DirectionError::SingularHessian { condition }
            }
            _ => DirectionError::Unsupported,
        })
    }

    fn exact_step(&self, p: &SpherePoint<T>, d: &DVector<T>) -> Option<Result<T, DirectionError>> {
        let norm = d.norm();
        if norm == T::zero() {
            return Some(Err(DirectionError::Degenerate));
        }
        // Minimizing sign·ρ is maximizing −sign·ρ.
        let sign = -self.sense.sign::<T>();
        let step = line_extremum(&self.problem.q, sign, p.as_vector(), &(d / norm))
            .map(|m| m.arc() / norm)
            .map_err(|_| DirectionError::Degenerate);
        Some(step)
    }

    fn error_metric(&self, p: &SpherePoint<T>) -> T {
        match &self.target {
            Some(target) => line_angle(target, p.as_vector()),
            None => self.space.norm(p, &self.problem.gradient(p)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_support::{random_point, random_symmetric, random_tangent, rng};
    use approx::assert_relative_eq;

    fn geodesic(x: &DVector<f64>, u: &DVector<f64>, t: f64) -> DVector<f64> {
        // unit-speed great circle through x in direction u/‖u‖, by the explicit formula
        let n = u.norm();
        x * (t * n).cos() + u * ((t * n).sin() / n)
    }

    fn rho(q: &DMatrix<f64>, x: &DVector<f64>) -> f64 {
        x.dot(&(q * x))
    }

    #[test]
    fn value_examples() {
        let p = RayleighProblem::diagonal(&[2.0, 1.0]);
        assert_eq!(p.value(&SpherePoint::basis(2, 0)), 2.0);
        let s = 0.5f64.sqrt();
        let x = SpherePoint::new(DVector::from_vec(vec![s, s])).unwrap();
        assert_relative_eq!(p.value(&x), 1.5, epsilon = 1e-15);
        let diag: Vec<f64> = (1..=21).rev().map(f64::from).collect();
        let big = RayleighProblem::diagonal(&diag);
        assert_eq!(big.value(&SpherePoint::basis(21, 0)), 21.0);
    }

    #[test]
    fn construction_validates() {
        assert!(matches!(
            RayleighProblem::new(DMatrix::<f64>::zeros(2, 3)),
            Err(RayleighError::NotSquare { .. })
        ));
        let q = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0 + 1e-12, 1.0]);
        assert_eq!(RayleighProblem::new(q), Err(RayleighError::NotSymmetric));
    }

    #[test]
    fn gradient_vanishes_at_eigenvectors() {
        let p = RayleighProblem::diagonal(&[3.0, 2.0, 1.0]);
        assert_eq!(p.gradient(&SpherePoint::basis(3, 1)).norm(), 0.0);
    }

    #[test]
    fn gradient_two_by_two_against_finite_differences() {
        let p = RayleighProblem::diagonal(&[2.0, 1.0]);
        let s = 0.5f64.sqrt();
        let x = DVector::from_vec(vec![s, s]);
        let g = p.gradient(&SpherePoint::new(x.clone()).unwrap());
        // frozen from central differences of ρ along the two tangent axes, step 1e-5
        let tangent = DVector::from_vec(vec![s, -s]);
        let h = 1e-5;
        let fd = (rho(p.matrix(), &geodesic(&x, &tangent, h))
            - rho(p.matrix(), &geodesic(&x, &tangent, -h)))
            / (2.0 * h);
        assert_relative_eq!(fd, 1.0, epsilon = 1e-9);
        assert_relative_eq!(g, DVector::from_vec(vec![s, -s]), epsilon = 1e-15);
        assert_relative_eq!(g.dot(&tangent), fd, epsilon = 1e-9);
    }

    #[test]
    fn gradient_random_against_finite_differences() {
        let mut r = rng(11);
        let q = random_symmetric(&mut r, 8);
        let p = RayleighProblem::new(q.clone()).unwrap();
        let x = random_point(&mut r, 8);
        let g = p.gradient(&x);
        assert!(x.as_vector().dot(&g).abs() < 1e-13);
        for _ in 0..8 {
            let u = random_tangent(&mut r, &x);
            let h = 1e-5;
            let fd = (rho(&q, &geodesic(x.as_vector(), &u, h))
                - rho(&q, &geodesic(x.as_vector(), &u, -h)))
                / (2.0 * h);
            let an = g.dot(&u);
            assert!((fd - an).abs() <= 1e-6 * an.abs().max(g.norm() * u.norm()));
        }
    }

    #[test]
    fn hessian_examples() {
        let p = RayleighProblem::diagonal(&[2.0, 1.0]);
        let x = SpherePoint::basis(2, 1);
        let u = DVector::from_vec(vec![1.0, 0.0]);
        let hu = p.hessian_apply(&x, &u).unwrap();
        assert_relative_eq!(hu, DVector::from_vec(vec![2.0, 0.0]), epsilon = 1e-15);
        let h = 1e-4;
        let second = (rho(p.matrix(), &geodesic(x.as_vector(), &u, h)) - 2.0 * 1.0
            + rho(p.matrix(), &geodesic(x.as_vector(), &u, -h)))
            / (h * h);
        assert_relative_eq!(second, 2.0, epsilon = 1e-6);
        assert!(matches!(
            p.hessian_apply(&x, &DVector::from_vec(vec![0.0, 1.0])),
            Err(RayleighError::Sphere(SphereError::NotTangent { .. }))
        ));
    }

    #[test]
    fn hessian_negative_definite_at_top_eigenvector() {
        let p = RayleighProblem::diagonal(&[5.0, 3.0, 2.0, -1.0]);
        let x = SpherePoint::basis(4, 0);
        let mut r = rng(3);
        for _ in 0..10 {
            let u = random_tangent(&mut r, &x);
            assert!(p.hessian_apply(&x, &u).unwrap().dot(&u) < 0.0);
        }
    }

    #[test]
    fn hessian_random_against_second_differences() {
        let mut r = rng(12);
        let q = random_symmetric(&mut r, 6);
        let p = RayleighProblem::new(q.clone()).unwrap();
        let x = random_point(&mut r, 6);
        for _ in 0..6 {
            let u = random_tangent(&mut r, &x);
            let w = random_tangent(&mut r, &x);
            let hu = p.hessian_apply(&x, &u).unwrap();
            let hw = p.hessian_apply(&x, &w).unwrap();
            assert_relative_eq!(hu.dot(&w), hw.dot(&u), max_relative = 1e-12);
            let h = 1e-4;
            let f0 = rho(&q, x.as_vector());
            let fd = (rho(&q, &geodesic(x.as_vector(), &u, h)) - 2.0 * f0
                + rho(&q, &geodesic(x.as_vector(), &u, -h)))
                / (h * h);
            let an = hu.dot(&u);
            assert!((fd - an).abs() <= 1e-5 * an.abs().max(hu.norm() * u.norm()));
        }
    }

    #[test]
    fn projected_solve_examples() {
        let x = SpherePoint::basis(3, 2);
        let v = DVector::from_vec(vec![1.0, 0.0, 0.0]);
        let u = solve_projected_linear(&DMatrix::identity(3, 3), &x, &v).unwrap();
        assert_relative_eq!(u, v, epsilon = 1e-15);
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 1.0, 1.0]));
        let u = solve_projected_linear(&a, &x, &v).unwrap();
        assert_relative_eq!(u, DVector::from_vec(vec![0.5, 0.0, 0.0]), epsilon = 1e-15);
    }

    #[test]
    fn projected_solve_random_residual() {
        let mut r = rng(13);
        let n = 6;
        let a = random_symmetric(&mut r, n) + DMatrix::identity(n, n) * 10.0;
        let x = random_point(&mut r, n);
        let v = random_tangent(&mut r, &x);
        let u = solve_projected_linear(&a, &x, &v).unwrap();
        assert!(x.as_vector().dot(&u).abs() < 1e-12);
        let residual = x.project(&(&a * &u)) - &v;
        assert!(residual.norm() <= 1e-10 * v.norm());
    }

    #[test]
    fn projected_solve_error_paths() {
        let x = SpherePoint::basis(2, 0);
        let v = DVector::from_vec(vec![0.0, 1.0]);
        let singular = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 0.0]));
        assert_eq!(
            solve_projected_linear(&singular, &x, &v),
            Err(RayleighError::SingularMatrix)
        );
        // xᵀA⁻¹x = 0 for this indefinite A at x = (1, 1)/√2.
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -1.0]));
        let s = 0.5f64.sqrt();
        let x = SpherePoint::new(DVector::from_vec(vec![s, s])).unwrap();
        let v = DVector::from_vec(vec![s, -s]);
        assert!(matches!(
            solve_projected_linear(&a, &x, &v),
            Err(RayleighError::DegeneratePivot { .. })
        ));
    }

    #[test]
    fn newton_step_is_singular_at_an_eigenvector() {
        let p = RayleighProblem::diagonal(&[2.0, 1.0]);
        assert!(matches!(
            p.newton_step(&SpherePoint::basis(2, 0)),
            Err(RayleighError::SingularShift { .. })
        ));
    }

    #[test]
    fn newton_step_matches_projected_solve() {
        let p = RayleighProblem::diagonal(&[2.0, 1.0]);
        let eps = 0.1f64;
        let x = SpherePoint::new(DVector::from_vec(vec![eps.cos(), eps.sin()])).unwrap();
        let h = p.newton_step(&x).unwrap();
        let rho = p.value(&x);
        let shifted = p.matrix() - DMatrix::identity(2, 2) * rho;
        // Hess·H = −grad reduces to (I − xxᵀ)(Q − ρI)H = −½ grad.
        let oracle = solve_projected_linear(&shifted, &x, &(p.gradient(&x) * -0.5)).unwrap();
        assert_relative_eq!(h, oracle, epsilon = 1e-14);
    }

    #[test]
    fn newton_residual_random() {
        let mut r = rng(14);
        let p = RayleighProblem::new(random_symmetric(&mut r, 7)).unwrap();
        let x = random_point(&mut r, 7);
        let h = p.newton_step(&x).unwrap();
        let g = p.gradient(&x);
        let residual = p.hessian_apply(&x, &h).unwrap() + &g;
        assert!(residual.norm() <= 1e-8 * g.norm());
    }

    #[test]
    fn newton_step_error_decays_cubically() {
        let mut r = rng(15);
        let n = 10;
        let q = random_symmetric(&mut r, n);
        let eig = q.clone().symmetric_eigen();
        let top = eig.eigenvalues.imax();
        let xhat = eig.eigenvectors.column(top).into_owned();
        let p = RayleighProblem::new(q).unwrap();
        let dir = {
            let raw = random_point(&mut r, n).into_vector();
            let perp = &raw - &xhat * xhat.dot(&raw);
            perp.normalize()
        };
        let mut pairs = Vec::new();
        for eps in [1e-1, 1e-2, 1e-3] {
            let x = SpherePoint::normalize(&xhat * f64::cos(eps) + &dir * f64::sin(eps)).unwrap();
            let h = p.newton_step(&x).unwrap();
            let theta = h.norm();
            let next = x.as_vector() * theta.cos() + &h * (theta.sin() / theta);
            pairs.push((eps, line_angle(&xhat, &next)));
        }
        let fit = crate::convergence::fit_order_pairs(&pairs).unwrap();
        assert!(fit.order > 2.5, "order {}", fit.order);
    }

    #[test]
    fn line_max_examples() {
        let p = RayleighProblem::diagonal(&[2.0, 1.0]);
        let m = p
            .line_max(&SpherePoint::basis(2, 1), &DVector::from_vec(vec![1.0, 0.0]))
            .unwrap();
        assert_eq!((m.c, m.s, m.v), (0.0, 1.0, 1.0));
        // Already the maximizer along the circle.
        let m = p
            .line_max(&SpherePoint::basis(2, 0), &DVector::from_vec(vec![0.0, 1.0]))
            .unwrap();
        assert_eq!((m.c, m.s), (1.0, 0.0));
        assert_eq!(m.v, 0.0);
    }

    #[test]
    fn line_max_degenerate_and_invalid() {
        let p = RayleighProblem::diagonal(&[1.0, 1.0, 3.0]);
        assert_eq!(
            p.line_max(&SpherePoint::basis(3, 0), &DVector::from_vec(vec![0.0, 1.0, 0.0])),
            Err(RayleighError::DegenerateDirection)
        );
        assert!(matches!(
            p.line_max(&SpherePoint::basis(3, 0), &DVector::from_vec(vec![0.0, 2.0, 0.0])),
            Err(RayleighError::Sphere(SphereError::NotUnitDirection { .. }))
        ));
    }

    #[test]
    fn line_max_matches_brute_force_scan() {
        let mut r = rng(16);
        let q = random_symmetric(&mut r, 7);
        let p = RayleighProblem::new(q.clone()).unwrap();
        for _ in 0..5 {
            let x = random_point(&mut r, 7);
            let h = random_tangent(&mut r, &x).normalize();
            let m = p.line_max(&x, &h).unwrap();
            assert!((m.c * m.c + m.s * m.s - 1.0).abs() < 1e-14);
            assert!((m.v - (1.0 - m.c)).abs() < 1e-14);
            let steps = 314_160;
            let mut best = (f64::NEG_INFINITY, 0.0);
            for k in 0..steps {
                let t = std::f64::consts::PI * k as f64 / steps as f64;
                let val = rho(&q, &(x.as_vector() * t.cos() + &h * t.sin()));
                if val > best.0 {
                    best = (val, t);
                }
            }
            let dt = (m.arc() - best.1).abs();
            let dt = dt.min(std::f64::consts::PI - dt);
            assert!(dt < 1e-5, "closed form {} vs scan {}", m.arc(), best.1);
        }
    }

    #[test]
    fn objective_sign_bridge() {
        let p = RayleighProblem::diagonal(&[3.0, 1.0, 2.0]);
        let max = RayleighObjective::new(p.clone(), Sense::Maximize);
        let min = RayleighObjective::new(p, Sense::Minimize);
        let x = SpherePoint::normalize(DVector::from_vec(vec![1.0, 1.0, 1.0])).unwrap();
        assert_relative_eq!(max.value(&x), -2.0, epsilon = 1e-15);
        assert_relative_eq!(min.value(&x), 2.0, epsilon = 1e-15);
        let dmax = -max.gradient(&x);
        let lam = max.exact_step(&x, &dmax).unwrap().unwrap();
        let y = max.space().exp(&x, &dmax, lam);
        assert!(max.value(&y) < max.value(&x));
        let dmin = -min.gradient(&x);
        let lam = min.exact_step(&x, &dmin).unwrap().unwrap();
        let y = min.space().exp(&x, &dmin, lam);
        assert!(min.value(&y) < min.value(&x));
    }
}
