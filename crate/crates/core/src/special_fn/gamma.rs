//! Complex log-gamma and the real polygamma functions it needs.

use num_complex::Complex;

use super::log_complex::LogComplex;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// `B_{2k} / (2k (2k - 1))` for k = 1..=10, the Stirling series coefficients.
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
];

/// Even Bernoulli numbers B_2 .. B_20.
pub(crate) const BERNOULLI_EVEN: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// Below this modulus the argument is shifted up before applying Stirling.
const STIRLING_THRESHOLD: f64 = 15.0;

fn is_pole<T: Real>(z: Complex<T>) -> bool {
    let tol = T::lit(T::POLE_TOLERANCE);
    z.re <= tol && z.im.abs() <= tol && (z.re - z.re.round()).abs() <= tol
}

/// `log Gamma(z)` for `z` away from the nonpositive integers.
///
/// Uses the Stirling series after shifting `|z|` past 15; the reflection
/// formula covers `Re z < 1/2`.
pub fn log_gamma<T: Real>(z: Complex<T>) -> Result<LogComplex<T>> {
    if is_pole(z) {
        return Err(Error::GammaPole {
            re: z.re.to_f64_lossy(),
            im: z.im.to_f64_lossy(),
        });
    }
    Ok(LogComplex::from_ln(ln_gamma_complex(z)))
}

/// Branch-agnostic `log Gamma(z)`; callers must exclude poles.
pub(crate) fn ln_gamma_complex<T: Real>(z: Complex<T>) -> Complex<T> {
    let half = T::lit(0.5);
    if z.re < half {
        let one = Complex::new(T::one(), T::zero());
        let ln_pi = Complex::new(T::PI().ln(), T::zero());
        return ln_pi - ln_sin_pi(z) - ln_gamma_complex(one - z);
    }
    let threshold = T::lit(STIRLING_THRESHOLD);
    let mut w = z;
    let mut shift = Complex::new(T::zero(), T::zero());
    while w.norm() < threshold {
        shift = shift + w.ln();
        w = w + T::one();
    }
    stirling(w) - shift
}

fn stirling<T: Real>(z: Complex<T>) -> Complex<T> {
    let half = T::lit(0.5);
    let ln_sqrt_2pi = T::lit(0.918_938_533_204_672_8);
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut series = Complex::new(T::zero(), T::zero());
    let mut p = inv;
    for &c in STIRLING.iter() {
        series = series + p * T::lit(c);
        p = p * inv2;
    }
    (z - half) * z.ln() - z + ln_sqrt_2pi + series
}

/// `log sin(pi z)` without overflow for large `|Im z|`.
pub(crate) fn ln_sin_pi<T: Real>(z: Complex<T>) -> Complex<T> {
    // sin(pi z) has period 2 in Re z
    let two = T::lit(2.0);
    let re = z.re - two * (z.re / two).round();
    let w = Complex::new(re, z.im) * T::PI();
    let i = Complex::new(T::zero(), T::one());
    if w.im.abs() < T::one() {
        return w.sin().ln();
    }
    let ln2 = T::LN_2();
    if w.im > T::zero() {
        // sin w = (i/2) e^{-iw} (1 - e^{2iw})
        let tail = (i * w * two).exp();
        let one = Complex::new(T::one(), T::zero());
        -(i * w) + (one - tail).ln() + Complex::new(-ln2, T::FRAC_PI_2())
    } else {
        // sin w = (-i/2) e^{iw} (1 - e^{-2iw})
        let tail = (-(i * w) * two).exp();
        let one = Complex::new(T::one(), T::zero());
        i * w + (one - tail).ln() + Complex::new(-ln2, -T::FRAC_PI_2())
    }
}

/// `log |Gamma(x)|` for real `x` off the poles.
pub fn ln_gamma<T: Real>(x: T) -> Result<T> {
    log_gamma(Complex::new(x, T::zero())).map(|g| g.log_modulus())
}

/// Digamma function for `x > 0`.
pub fn digamma<T: Real>(x: T) -> Result<T> {
    if !(x > T::zero()) {
        return Err(Error::Domain {
            function: "digamma",
            value: x.to_f64_lossy(),
        });
    }
    let mut x = x;
    let mut acc = T::zero();
    let threshold = T::lit(12.0);
    while x < threshold {
        acc = acc - x.recip();
        x = x + T::one();
    }
    let inv2 = (x * x).recip();
    let mut p = inv2;
    let mut series = T::zero();
    for (k, &b) in BERNOULLI_EVEN.iter().enumerate().take(8) {
        let two_k = T::lit(2.0 * (k as f64 + 1.0));
        series = series + T::lit(b) / two_k * p;
        p = p * inv2;
    }
    Ok(acc + x.ln() - T::lit(0.5) / x - series)
}

/// Trigamma function for `x > 0`.
pub fn trigamma<T: Real>(x: T) -> Result<T> {
    if !(x > T::zero()) {
        return Err(Error::Domain {
            function: "trigamma",
            value: x.to_f64_lossy(),
        });
    }
    let mut x = x;
    let mut acc = T::zero();
    let threshold = T::lit(12.0);
    while x < threshold {
        acc = acc + (x * x).recip();
        x = x + T::one();
    }
    let inv = x.recip();
    let inv2 = inv * inv;
    let mut p = inv2 * inv;
    let mut series = T::zero();
    for &b in BERNOULLI_EVEN.iter().take(8) {
        series = series + T::lit(b) * p;
        p = p * inv2;
    }
    Ok(acc + inv + T::lit(0.5) * inv2 + series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn lg(re: f64, im: f64) -> Complex<f64> {
        log_gamma(Complex::new(re, im)).unwrap().ln()
    }

    #[test]
    fn integer_and_half_integer_values() {
        assert!(lg(1.0, 0.0).norm() < 1e-15);
        assert!((lg(0.5, 0.0).re - 0.5 * PI.ln()).abs() < 1e-14);
        assert!((lg(5.0, 0.0).re - 24f64.ln()).abs() < 1e-14);
        assert!((lg(171.0, 0.0).re - 706.573_062_245_787_4).abs() < 1e-10);
    }

    #[test]
    fn negative_arguments_use_reflection() {
        // Gamma(-1/2) = -2 sqrt(pi)
        let g = log_gamma(Complex::new(-0.5f64, 0.0)).unwrap();
        assert!((g.to_real() + 2.0 * PI.sqrt()).abs() < 1e-13);
        // Gamma(-2.5) = -8 sqrt(pi) / 15
        let g = log_gamma(Complex::new(-2.5f64, 0.0)).unwrap();
        assert!((g.to_real() + 8.0 * PI.sqrt() / 15.0).abs() < 1e-13);
    }

    #[test]
    fn poles_are_rejected() {
        for k in 0..5 {
            let z = Complex::new(-(k as f64), 0.0);
            assert!(matches!(log_gamma(z), Err(Error::GammaPole { .. })));
        }
        assert!(log_gamma(Complex::new(-1.0f64, 1e-6)).is_ok());
    }

    #[test]
    fn modulus_on_critical_like_line() {
        // |Gamma(1/2 + it)|^2 = pi / cosh(pi t)
        for &t in &[0.3, 5.0, 40.0, 199.0] {
            let g = lg(0.5, t);
            let ln_cosh = PI * t + (0.5 * (1.0 + (-2.0 * PI * t).exp())).ln();
            let expect = 0.5 * (PI.ln() - ln_cosh);
            assert!(
                (g.re - expect).abs() < 1e-12 * expect.abs().max(1.0),
                "t={t}"
            );
        }
    }

    #[test]
    fn far_left_with_large_imaginary_part() {
        // recurrence from the left edge of the supported rectangle
        let z = Complex::new(-99.3, 150.0);
        let lhs = lg(z.re + 1.0, z.im) - lg(z.re, z.im);
        let d = lhs - z.ln();
        let wrapped = (d.im / (2.0 * PI)).round() * 2.0 * PI;
        assert!(d.re.abs() < 1e-11 && (d.im - wrapped).abs() < 1e-11);
    }

    #[test]
    fn polygamma_values() {
        let euler = 0.577_215_664_901_532_9;
        assert!((digamma(1.0f64).unwrap() + euler).abs() < 1e-14);
        assert!((digamma(0.5f64).unwrap() + euler + 2.0 * 2f64.ln()).abs() < 1e-14);
        assert!((trigamma(1.0f64).unwrap() - PI * PI / 6.0).abs() < 1e-14);
        assert!((trigamma(0.5f64).unwrap() - PI * PI / 2.0).abs() < 1e-13);
    }

    #[test]
    fn single_precision_smoke() {
        let g = log_gamma(Complex::new(5.0f32, 0.0)).unwrap();
        assert!((g.log_modulus() - 24f32.ln()).abs() < 1e-5);
    }
}
