//! Jacobi polynomials `P_j^{(alpha, beta)}` in the standard normalization
//! `P_j(1) = binom(j + alpha, j)`, and their squared norms.

use num_complex::Complex;

use super::gamma::ln_gamma_complex;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Parameters `(alpha, beta)` and degree of a Jacobi polynomial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiParams<T> {
    pub alpha: T,
    pub beta: T,
    pub degree: usize,
}

impl<T: Real> JacobiParams<T> {
    pub fn new(alpha: T, beta: T, degree: usize) -> Result<Self> {
        if !(alpha > -T::one()) || !(beta > -T::one()) {
            return Err(Error::InvalidParameter(format!(
                "Jacobi weight not integrable for alpha = {alpha}, beta = {beta}"
            )));
        }
        Ok(Self {
            alpha,
            beta,
            degree,
        })
    }

    pub fn with_degree(self, degree: usize) -> Self {
        Self { degree, ..self }
    }
}

/// Evaluates `P_0 .. P_{max_degree}` at `x` by the three-term recurrence.
pub fn jacobi_poly_all<T: Real>(alpha: T, beta: T, max_degree: usize, x: T) -> Vec<T> {
    let mut out = Vec::with_capacity(max_degree + 1);
    out.push(T::one());
    if max_degree == 0 {
        return out;
    }
    let one = T::one();
    let two = T::lit(2.0);
    let ab = alpha + beta;
    out.push((ab + two) * x / two + (alpha - beta) / two);
    for j in 1..max_degree {
        let jf = T::from_usize_lossy(j);
        let c = two * jf + ab;
        let a1 = two * (jf + one) * (jf + ab + one) * c;
        let a2 = (c + one) * (alpha * alpha - beta * beta);
        let a3 = c * (c + one) * (c + two);
        let a4 = two * (jf + alpha) * (jf + beta) * (c + two);
        let next = ((a2 + a3 * x) * out[j] - a4 * out[j - 1]) / a1;
        out.push(next);
    }
    out
}

/// `P_j^{(alpha, beta)}(x)` for `|x| <= 1`.
pub fn jacobi_poly<T: Real>(params: JacobiParams<T>, x: T) -> T {
    jacobi_poly_all(params.alpha, params.beta, params.degree, x)[params.degree]
}

/// `d/dx P_j^{(alpha, beta)}(x) = (j + alpha + beta + 1)/2 * P_{j-1}^{(alpha+1, beta+1)}(x)`.
pub fn jacobi_poly_derivative<T: Real>(params: JacobiParams<T>, x: T) -> T {
    if params.degree == 0 {
        return T::zero();
    }
    let j = T::from_usize_lossy(params.degree);
    let lowered = jacobi_poly_all(
        params.alpha + T::one(),
        params.beta + T::one(),
        params.degree - 1,
        x,
    );
    (j + params.alpha + params.beta + T::one()) / T::lit(2.0) * lowered[params.degree - 1]
}

fn lgamma<T: Real>(x: T) -> T {
    ln_gamma_complex(Complex::new(x, T::zero())).re
}

/// Logarithm of the squared norm `h_j`.
pub(crate) fn ln_jacobi_norm<T: Real>(params: JacobiParams<T>) -> T {
    let JacobiParams {
        alpha,
        beta,
        degree,
    } = params;
    let one = T::one();
    let ab1 = alpha + beta + one;
    let ln2 = T::LN_2();
    if degree == 0 {
        // (alpha+beta+1) Gamma(alpha+beta+1) = Gamma(alpha+beta+2); this form
        // stays finite when alpha + beta = -1
        return ab1 * ln2 + lgamma(alpha + one) + lgamma(beta + one) - lgamma(ab1 + one);
    }
    let j = T::from_usize_lossy(degree);
    ab1 * ln2 - (j + j + ab1).ln() + lgamma(j + alpha + one) + lgamma(j + beta + one)
        - lgamma(j + one)
        - lgamma(j + ab1)
}

/// Squared norm `h_j = int_{-1}^{1} P_j^2 (1-x)^alpha (1+x)^beta dx`.
pub fn jacobi_norm<T: Real>(params: JacobiParams<T>) -> T {
    ln_jacobi_norm(params).exp()
}
