//! Seeded instance generation. The generator is ChaCha8 seeded from a `u64`,
//! which gives the same stream on every platform.

use geodesic_opt::rotation::{Rotation, SkewMatrix};
use geodesic_opt::sphere::SpherePoint;
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub type Rng = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal_vector(r: &mut Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| StandardNormal.sample(r))
}

pub fn normal_matrix(r: &mut Rng, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(r))
}

pub fn symmetric(r: &mut Rng, n: usize) -> DMatrix<f64> {
    let a = normal_matrix(r, n);
    (&a + a.transpose()) * 0.5
}

/// Uniform on the sphere: a normalized standard normal vector.
pub fn sphere_point(r: &mut Rng, n: usize) -> SpherePoint<f64> {
    loop {
        if let Ok(x) = SpherePoint::normalize(normal_vector(r, n)) {
            return x;
        }
    }
}

/// Unit tangent at `x`, uniform over directions.
pub fn unit_tangent(r: &mut Rng, x: &SpherePoint<f64>) -> DVector<f64> {
    loop {
        let v = x.project(&normal_vector(r, x.dim()));
        let norm = v.norm();
        if norm > 1e-8 {
            return v / norm;
        }
    }
}

/// Orthogonal factor of a Gaussian matrix, one column flipped if needed so
/// that `det = +1`.
pub fn rotation(r: &mut Rng, n: usize) -> Rotation<f64> {
    let mut q = normal_matrix(r, n).qr().q();
    if q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    Rotation::new(q).expect("QR factor is orthogonal")
}

/// Skew matrix of unit Frobenius norm in a uniformly random direction.
pub fn unit_skew(r: &mut Rng, n: usize) -> SkewMatrix<f64> {
    loop {
        let a = normal_matrix(r, n);
        let x = SkewMatrix::skew_part(&(&a - a.transpose()));
        let norm = x.norm();
        if norm > 1e-8 {
            return &x * (1.0 / norm);
        }
    }
}
