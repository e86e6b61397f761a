//! Geodesic optimization on Riemannian manifolds with closed-form geometry.

pub mod brockett;
pub mod convergence;
pub mod eigen;
pub mod jacobi;
pub mod linalg;
pub mod manifold;
pub mod rayleigh;
pub mod rotation;
pub mod scalar;
pub mod solvers;
pub mod sphere;

#[cfg(test)]
pub(crate) mod test_support;

pub use scalar::Scalar;

pub type Sphere64 = sphere::Sphere<f64>;
pub type SpherePoint64 = sphere::SpherePoint<f64>;
pub type SpecialOrthogonal64 = rotation::SpecialOrthogonal<f64>;
pub type Rotation64 = rotation::Rotation<f64>;
pub type SkewMatrix64 = rotation::SkewMatrix<f64>;
pub type RayleighProblem64 = rayleigh::RayleighProblem<f64>;
pub type BrockettProblem64 = brockett::BrockettProblem<f64>;
pub type JacobiProblem64 = jacobi::JacobiProblem<f64>;
pub type IterationTrace64 = convergence::IterationTrace<f64>;
