//! Complex numbers stored as `(log |z|, arg z)`.
//!
//! Products of many gamma and Barnes G values overflow long before the final
//! ratio does, so every such product is accumulated here.

use std::ops::{Div, Mul};

use num_complex::Complex;

use crate::scalar::Real;

/// A complex number held in log-modulus / phase form.
///
/// The phase is always reduced to `(-pi, pi]`. Zero is represented by a
/// log-modulus of negative infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogComplex<T> {
    log_modulus: T,
    phase: T,
}

/// Reduces an angle to `(-pi, pi]`.
pub(crate) fn principal_angle<T: Real>(theta: T) -> T {
    if !theta.is_finite() {
        return theta;
    }
    let pi = T::PI();
    let two_pi = pi + pi;
    if theta > -pi && theta <= pi {
        return theta;
    }
    let mut r = theta - two_pi * (theta / two_pi).round();
    if r <= -pi {
        r = r + two_pi;
    } else if r > pi {
        r = r - two_pi;
    }
    r
}

impl<T: Real> LogComplex<T> {
    pub fn new(log_modulus: T, phase: T) -> Self {
        Self {
            log_modulus,
            phase: principal_angle(phase),
        }
    }

    pub fn one() -> Self {
        Self::new(T::zero(), T::zero())
    }

    pub fn zero() -> Self {
        Self {
            log_modulus: T::neg_infinity(),
            phase: T::zero(),
        }
    }

    /// Builds the value whose complex logarithm is `w` (any branch).
    pub fn from_ln(w: Complex<T>) -> Self {
        Self::new(w.re, w.im)
    }

    /// Builds `x` for a real `x`; negative values get phase `pi`.
    pub fn from_real(x: T) -> Self {
        if x == T::zero() {
            Self::zero()
        } else if x > T::zero() {
            Self::new(x.ln(), T::zero())
        } else {
            Self::new((-x).ln(), T::PI())
        }
    }

    pub fn from_complex(z: Complex<T>) -> Self {
        if z.re == T::zero() && z.im == T::zero() {
            Self::zero()
        } else {
            Self::new(z.norm().ln(), z.arg())
        }
    }

    pub fn log_modulus(&self) -> T {
        self.log_modulus
    }

    pub fn phase(&self) -> T {
        self.phase
    }

    pub fn is_zero(&self) -> bool {
        self.log_modulus == T::neg_infinity()
    }

    /// Principal complex logarithm `log|z| + i arg z`.
    pub fn ln(&self) -> Complex<T> {
        Complex::new(self.log_modulus, self.phase)
    }

    pub fn modulus(&self) -> T {
        self.log_modulus.exp()
    }

    pub fn to_complex(&self) -> Complex<T> {
        if self.is_zero() {
            return Complex::new(T::zero(), T::zero());
        }
        let r = self.log_modulus.exp();
        Complex::new(r * self.phase.cos(), r * self.phase.sin())
    }

    /// Real value, assuming the phase is 0 or pi up to rounding.
    pub fn to_real(&self) -> T {
        if self.is_zero() {
            return T::zero();
        }
        let r = self.log_modulus.exp();
        if self.phase.abs() <= T::FRAC_PI_2() {
            r
        } else {
            -r
        }
    }

    pub fn recip(&self) -> Self {
        Self::new(-self.log_modulus, -self.phase)
    }

    /// `self^p` on the principal branch.
    pub fn powc(&self, p: Complex<T>) -> Self {
        Self::from_ln(self.ln() * p)
    }

    pub fn powf(&self, p: T) -> Self {
        Self::new(self.log_modulus * p, self.phase * p)
    }
}

impl<T: Real> Mul for LogComplex<T> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        Self::new(self.log_modulus + rhs.log_modulus, self.phase + rhs.phase)
    }
}

impl<T: Real> Div for LogComplex<T> {
    type Output = Self;

    fn div(self, rhs: Self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        Self::new(self.log_modulus - rhs.log_modulus, self.phase - rhs.phase)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phase_is_principal() {
        let z = LogComplex::<f64>::new(0.0, 7.0 * std::f64::consts::PI);
        assert!((z.phase() - std::f64::consts::PI).abs() < 1e-12);
        let w = LogComplex::<f64>::new(0.0, -std::f64::consts::PI);
        assert_eq!(w.phase(), std::f64::consts::PI);
    }

    #[test]
    fn product_and_quotient() {
        let a = LogComplex::from_complex(Complex::new(1.0f64, 2.0));
        let b = LogComplex::from_complex(Complex::new(-3.0f64, 0.5));
        let p = (a * b).to_complex();
        let expect = Complex::new(1.0f64, 2.0) * Complex::new(-3.0, 0.5);
        assert!((p - expect).norm() < 1e-12);
        let q = (a / b).to_complex();
        let expect = Complex::new(1.0f64, 2.0) / Complex::new(-3.0, 0.5);
        assert!((q - expect).norm() < 1e-12);
    }

    #[test]
    fn zero_absorbs() {
        let z = LogComplex::<f64>::zero();
        assert!((z * LogComplex::from_real(3.0)).is_zero());
        assert_eq!(z.to_real(), 0.0);
        assert_eq!(LogComplex::from_real(-2.0f64).to_real(), -2.0);
    }
}
