//! Barnes G-function for real positive arguments.

use num_complex::Complex;

use super::gamma::{ln_gamma_complex, BERNOULLI_EVEN};
use super::log_complex::LogComplex;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// zeta'(-1)
const ZETA_PRIME_MINUS_ONE: f64 = -0.165_421_143_700_450_93;

/// Arguments are raised by the recurrence until they reach this size.
const ASYMPTOTIC_THRESHOLD: f64 = 30.0;

fn ln_gamma_real<T: Real>(x: T) -> T {
    ln_gamma_complex(Complex::new(x, T::zero())).re
}

/// `log G(1 + z)` from the large-`z` expansion with its Bernoulli tail.
fn ln_g_one_plus_asymptotic<T: Real>(z: T) -> T {
    let ln_z = z.ln();
    let z2 = z * z;
    let mut value = z2 * (T::lit(0.5) * ln_z - T::lit(0.75))
        + T::lit(0.5) * z * (T::PI() + T::PI()).ln()
        - ln_z / T::lit(12.0)
        + T::lit(ZETA_PRIME_MINUS_ONE);
    // sum_k B_{2k+2} / (4 k (k+1) z^{2k}), stopped once terms stop mattering
    let inv2 = z2.recip();
    let mut p = inv2;
    for (k, &bernoulli) in BERNOULLI_EVEN.iter().enumerate().skip(1) {
        let kf = k as f64;
        let term = T::lit(bernoulli / (4.0 * kf * (kf + 1.0))) * p;
        value = value + term;
        if term.abs() <= T::epsilon() * T::lit(1e-3) * value.abs().max(T::one()) {
            break;
        }
        p = p * inv2;
    }
    value
}

/// `log G(z)` for real `z > 0`.
///
/// The argument is raised past 30 with `G(z+1) = Gamma(z) G(z)` and the
/// asymptotic expansion is applied there.
pub fn barnes_g<T: Real>(z: T) -> Result<LogComplex<T>> {
    if !(z > T::zero()) || !z.is_finite() {
        return Err(Error::Domain {
            function: "barnes_g",
            value: z.to_f64_lossy(),
        });
    }
    let threshold = T::lit(ASYMPTOTIC_THRESHOLD);
    let mut w = z;
    let mut shift = T::zero();
    while w < threshold {
        shift = shift + ln_gamma_real(w);
        w = w + T::one();
    }
    Ok(LogComplex::new(
        ln_g_one_plus_asymptotic(w - T::one()) - shift,
        T::zero(),
    ))
}

/// `log(G(a + k) / G(a)) = sum_{j<k} log Gamma(a + j)`, evaluated exactly.
pub fn barnes_g_ratio<T: Real>(a: T, k: u32) -> Result<LogComplex<T>> {
    if !(a > T::zero()) {
        return Err(Error::Domain {
            function: "barnes_g_ratio",
            value: a.to_f64_lossy(),
        });
    }
    let mut sum = T::zero();
    for j in 0..k {
        sum = sum + ln_gamma_real(a + T::lit(j as f64));
    }
    Ok(LogComplex::new(sum, T::zero()))
}
