//! Moments, value distributions and eigenvalue statistics for characteristic
//! polynomials of special orthogonal matrices conditioned to carry `n`
//! eigenvalues at 1.
//!
//! With `N = n + 2M`, the remaining `M` eigenangle pairs follow the weight
//! `prod (1 - cos theta_j)^n prod_{j<k} (cos theta_j - cos theta_k)^2` on
//! `[0, pi]^M`, and the first non-vanishing derivative at 1 is
//! `n! 2^M prod (1 - cos theta_j)`.
//!
//! The analytic modules are generic over [`Real`] (`f32` or `f64`); the
//! aliases at the crate root fix `f64`.

// Preconditions are written `!(x > bound)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ensemble;
pub mod error;
pub mod level_density;
pub mod moments;
pub mod quadrature;
pub mod scalar;
pub mod special_fn;
pub mod stats;
pub mod value_dist;
pub mod verify;

pub use error::{Error, Result};
pub use moments::EnsembleSpec;
pub use scalar::Real;
pub use special_fn::LogComplex;

pub type LogComplex64 = special_fn::LogComplex<f64>;
pub type LogComplex32 = special_fn::LogComplex<f32>;
pub type JacobiParams64 = special_fn::JacobiParams<f64>;
pub type SelbergParams64 = moments::SelbergParams<f64>;
pub type MellinContour64 = value_dist::MellinContour<f64>;
pub type DensityGrid64 = value_dist::DensityGrid<f64>;
