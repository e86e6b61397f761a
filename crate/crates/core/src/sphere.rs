//! The unit sphere `S^{n-1} ⊂ Rⁿ` with great-circle geodesics.
//!
//! Tangent vectors at `x` are ambient vectors orthogonal to `x`; the metric is
//! the ambient dot product. For a unit tangent `h` at `x`:
//!
//! ```text
//! exp_x(t h) = x cos t + h sin t
//! τ v        = v − (hᵀv)(x sin t + h(1 − cos t))
//! ```

use std::marker::PhantomData;

use nalgebra::DVector;
use thiserror::Error;

use crate::manifold::Manifold;
use crate::Scalar;

/// Tangent vectors on the sphere are plain ambient vectors.
pub type SphereTangent<T> = DVector<T>;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum SphereError {
    #[error("vector has norm {norm:e}, expected 1")]
    NotUnit { norm: f64 },
    #[error("cannot normalize the zero vector")]
    ZeroVector,
    #[error("direction has zero length")]
    ZeroTangent,
    #[error("direction has norm {norm:e}, expected a unit tangent")]
    NotUnitDirection { norm: f64 },
    #[error("vector is not tangent at the base point (xᵀv = {defect:e})")]
    NotTangent { defect: f64 },
    #[error("points are antipodal; the minimizing geodesic is not unique")]
    AntipodalPoints,
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// A unit vector in `Rⁿ`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpherePoint<T: Scalar>(DVector<T>);

impl<T: Scalar> SpherePoint<T> {
    /// Accepts `x` when `|xᵀx − 1| ≤ 1e-12` (clamped to the type's precision).
    pub fn new(x: DVector<T>) -> Result<Self, SphereError> {
        let norm = x.norm();
        if (norm * norm - T::one()).abs() > T::tol(1e-12) {
            return Err(SphereError::NotUnit {
                norm: norm.to_f64_lossy(),
            });
        }
        Ok(Self(x))
    }

    pub fn normalize(x: DVector<T>) -> Result<Self, SphereError> {
        let norm = x.norm();
        if norm == T::zero() || !norm.is_finite() {
            return Err(SphereError::ZeroVector);
        }
        Ok(Self(x / norm))
    }

    /// The `i`-th standard basis vector of `Rⁿ`.
    pub fn basis(n: usize, i: usize) -> Self {
        let mut v = DVector::zeros(n);
        v[i] = T::one();
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_vector(&self) -> &DVector<T> {
        &self.0
    }

    pub fn into_vector(self) -> DVector<T> {
        self.0
    }

    /// Orthogonal projection of `v` onto the tangent space at this point.
    pub fn project(&self, v: &DVector<T>) -> DVector<T> {
        v - &self.0 * self.0.dot(v)
    }

    fn renormalized(x: DVector<T>) -> Self {
        let n = x.norm();
        Self(x / n)
    }
}

fn check_tangent<T: Scalar>(x: &SpherePoint<T>, v: &DVector<T>) -> Result<(), SphereError> {
    if v.len() != x.dim() {
        return Err(SphereError::DimensionMismatch {
            expected: x.dim(),
            found: v.len(),
        });
    }
    let defect = x.0.dot(v).abs();
    if defect > T::tol(1e-12) * v.norm().max(T::one()) {
        return Err(SphereError::NotTangent {
            defect: defect.to_f64_lossy(),
        });
    }
    Ok(())
}

fn check_unit_direction<T: Scalar>(
    x: &SpherePoint<T>,
    h: &DVector<T>,
) -> Result<(), SphereError> {
    check_tangent(x, h)?;
    let norm = h.norm();
    if (norm - T::one()).abs() > T::tol(1e-12) {
        return Err(SphereError::NotUnitDirection {
            norm: norm.to_f64_lossy(),
        });
    }
    Ok(())
}

fn great_circle<T: Scalar>(x: &DVector<T>, h_unit: &DVector<T>, arc: T) -> SpherePoint<T> {
    SpherePoint::renormalized(x * arc.cos() + h_unit * arc.sin())
}

fn transport_unit<T: Scalar>(
    x: &DVector<T>,
    h_unit: &DVector<T>,
    arc: T,
    v: &DVector<T>,
) -> DVector<T> {
    let (s, c) = arc.sin_cos();
    let coeff = h_unit.dot(v);
    v - (x * s + h_unit * (T::one() - c)) * coeff
}

/// Great-circle geodesic: the point at time `t` along the geodesic leaving `x`
/// with velocity `h`. The arc length travelled is `‖h‖·t`, so
/// `sphere_exp(x, h, 1)` is `exp_x(h)`.
pub fn sphere_exp<T: Scalar>(
    x: &SpherePoint<T>,
    h: &SphereTangent<T>,
    t: T,
) -> Result<SpherePoint<T>, SphereError> {
    check_tangent(x, h)?;
    if t == T::zero() {
        return Ok(x.clone());
    }
    let norm = h.norm();
    if norm == T::zero() {
        return Err(SphereError::ZeroTangent);
    }
    Ok(great_circle(&x.0, &(h / norm), t * norm))
}

/// Parallel translation of `v` along the great circle through `x` with unit
/// direction `h`, to the point `sphere_exp(x, h, t)`.
pub fn sphere_transport<T: Scalar>(
    x: &SpherePoint<T>,
    h: &SphereTangent<T>,
    t: T,
    v: &SphereTangent<T>,
) -> Result<SphereTangent<T>, SphereError> {
    check_unit_direction(x, h)?;
    check_tangent(x, v)?;
    Ok(transport_unit(&x.0, h, t, v))
}

/// Inverse of the exponential map: the tangent `v` at `x` with
/// `exp_x(v) = y`, together with the geodesic distance `‖v‖`.
pub fn sphere_log<T: Scalar>(
    x: &SpherePoint<T>,
    y: &SpherePoint<T>,
) -> Result<(SphereTangent<T>, T), SphereError> {
    if x.dim() != y.dim() {
        return Err(SphereError::DimensionMismatch {
            expected: x.dim(),
            found: y.dim(),
        });
    }
    let cos = x.0.dot(&y.0);
    let w = &y.0 - &x.0 * cos;
    let sin = w.norm();
    if sin <= T::tol(1e-14) {
        if cos < T::zero() {
            return Err(SphereError::AntipodalPoints);
        }
        return Ok((DVector::zeros(x.dim()), T::zero()));
    }
    let dist = sin.atan2(cos);
    Ok((w * (dist / sin), dist))
}

/// Angle between the lines spanned by `x` and `y`, in `[0, π/2]`.
///
/// Insensitive to the sign of either vector, so it measures the distance to an
/// eigenvector regardless of the representative chosen.
pub fn line_angle<T: Scalar>(x: &DVector<T>, y: &DVector<T>) -> T {
    let cos = x.dot(y);
    let perp = (y - x * cos).norm();
    perp.atan2(cos.abs())
}

/// `S^{n-1}` embedded in `Rⁿ`.
///
/// The [`Manifold`] implementation is the unchecked path used by solvers: the
/// velocity need not be unit length and a zero velocity is the constant
/// geodesic.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Sphere<T> {
    ambient: usize,
    _scalar: PhantomData<T>,
}

impl<T> Sphere<T> {
    pub fn new(ambient: usize) -> Self {
        assert!(ambient >= 2, "sphere needs ambient dimension >= 2");
        Self {
            ambient,
            _scalar: PhantomData,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }
}

impl<T: Scalar> Manifold for Sphere<T> {
    type Scalar = T;
    type Point = SpherePoint<T>;
    type Tangent = DVector<T>;

    fn dimension(&self) -> usize {
        self.ambient - 1
    }

    fn inner(&self, _p: &SpherePoint<T>, u: &DVector<T>, v: &DVector<T>) -> T {
        u.dot(v)
    }

    fn exp(&self, p: &SpherePoint<T>, v: &DVector<T>, t: T) -> SpherePoint<T> {
        let norm = v.norm();
        if norm == T::zero() || t == T::zero() {
            return p.clone();
        }
        great_circle(&p.0, &(v / norm), t * norm)
    }

    fn transport(&self, p: &SpherePoint<T>, v: &DVector<T>, t: T, w: &DVector<T>) -> DVector<T> {
        let norm = v.norm();
        if norm == T::zero() || t == T::zero() {
            return w.clone();
        }
        transport_unit(&p.0, &(v / norm), t * norm, w)
    }

    fn zero_tangent(&self, _p: &SpherePoint<T>) -> DVector<T> {
        DVector::zeros(self.ambient)
    }

    fn scale(&self, a: T, v: &DVector<T>) -> DVector<T> {
        v * a
    }

    fn axpy(&self, a: T, x: &DVector<T>, y: &DVector<T>) -> DVector<T> {
        x * a + y
    }
}
