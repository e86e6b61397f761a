//! Seeded random instances for unit tests.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::sphere::SpherePoint;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal_vector(r: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| StandardNormal.sample(r))
}

pub fn normal_matrix(r: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(r))
}

pub fn random_symmetric(r: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let a = normal_matrix(r, n);
    (&a + a.transpose()) * 0.5
}

pub fn random_skew(r: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let a = normal_matrix(r, n);
    (&a - a.transpose()) * 0.5
}

pub fn random_point(r: &mut ChaCha8Rng, n: usize) -> SpherePoint<f64> {
    SpherePoint::normalize(normal_vector(r, n)).unwrap()
}

pub fn random_tangent(r: &mut ChaCha8Rng, x: &SpherePoint<f64>) -> DVector<f64> {
    x.project(&normal_vector(r, x.dim()))
}

/// Orthogonal factor of a Gaussian matrix, with a column flipped if needed for `det = +1`.
pub fn random_rotation(r: &mut ChaCha8Rng, n: usize) -> crate::rotation::Rotation<f64> {
    let qr = normal_matrix(r, n).qr();
    let mut q = qr.q();
    if q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    crate::rotation::Rotation::new(q).unwrap()
}

pub fn random_unit_skew(r: &mut ChaCha8Rng, n: usize) -> crate::rotation::SkewMatrix<f64> {
    let x = random_skew(r, n);
    let norm = x.norm();
    crate::rotation::SkewMatrix::skew_part(&(x / norm))
}
