//! Scalar abstraction shared by every manifold and solver.
//!
//! All numerical code is written against [`Scalar`], which is implemented for
//! `f32` and `f64`. Tolerances are expressed as `f64` literals and converted
//! with [`Scalar::lit`]; [`Scalar::tol`] clamps a requested tolerance to a
//! small multiple of the type's machine epsilon so that the defaults chosen for
//! double precision stay meaningful in single precision.

use std::fmt::{Debug, Display, LowerExp};

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

pub trait Scalar:
    RealField + Copy + FromPrimitive + ToPrimitive + Debug + Display + LowerExp + Send + Sync + 'static
{
    /// Machine epsilon of the type.
    fn eps() -> Self;

    /// Converts an `f64` literal, rounding to the nearest representable value.
    #[inline]
    fn lit(v: f64) -> Self {
        nalgebra::convert(v)
    }

    /// `max(v, 64·eps)`: a tolerance that is never below what the type can resolve.
    #[inline]
    fn tol(v: f64) -> Self {
        let requested = Self::lit(v);
        let floor = Self::eps() * Self::lit(64.0);
        if requested > floor {
            requested
        } else {
            floor
        }
    }

    #[inline]
    fn from_usize_lossy(v: usize) -> Self {
        Self::lit(v as f64)
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {
    #[inline]
    fn eps() -> Self {
        f32::EPSILON
    }
}

impl Scalar for f64 {
    #[inline]
    fn eps() -> Self {
        f64::EPSILON
    }
}
