//! Special-function substrate: complex log-gamma, Barnes G, half-integer
//! Bessel functions and Jacobi polynomials.

mod barnes;
mod bessel;
mod gamma;
mod jacobi;
mod log_complex;

pub use barnes::{barnes_g, barnes_g_ratio};
pub use bessel::bessel_j_half;
pub use gamma::{digamma, ln_gamma, log_gamma, trigamma};
pub use jacobi::{jacobi_norm, jacobi_poly, jacobi_poly_all, jacobi_poly_derivative, JacobiParams};
pub use log_complex::LogComplex;

pub(crate) use gamma::ln_gamma_complex;
pub(crate) use jacobi::ln_jacobi_norm;
