//! Bessel functions of the first kind at half-integer order.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// `J_{k - 1/2}(x)` for `k >= -1` and `x > 0`.
///
/// Orders -3/2, -1/2 and 1/2 come from closed forms. Higher orders use upward
/// recurrence while the argument exceeds the order, and the power series
/// otherwise (where the recurrence is unstable).
pub fn bessel_j_half<T: Real>(order_index: i32, x: T) -> Result<T> {
    if !(x > T::zero()) || !x.is_finite() {
        return Err(Error::Domain {
            function: "bessel_j_half",
            value: x.to_f64_lossy(),
        });
    }
    if order_index < -1 {
        return Err(Error::InvalidParameter(format!(
            "bessel order {} - 1/2 is below -3/2",
            order_index
        )));
    }
    let amp = (T::lit(2.0) / (T::PI() * x)).sqrt();
    let j_minus_half = amp * x.cos();
    let j_half = amp * x.sin();
    match order_index {
        -1 => return Ok(-j_minus_half / x - j_half),
        0 => return Ok(j_minus_half),
        1 => return Ok(j_half),
        _ => {}
    }
    let order = T::lit(order_index as f64 - 0.5);
    if x < order {
        return Ok(power_series(order_index, x));
    }
    // J_{nu+1} = (2 nu / x) J_nu - J_{nu-1}
    let mut prev = j_minus_half;
    let mut cur = j_half;
    let mut nu = T::lit(0.5);
    for _ in 1..order_index {
        let next = (nu + nu) / x * cur - prev;
        prev = cur;
        cur = next;
        nu = nu + T::one();
    }
    Ok(cur)
}

/// Ascending series for `J_nu`, `nu = k - 1/2 >= 1/2`.
fn power_series<T: Real>(order_index: i32, x: T) -> T {
    let nu = T::lit(order_index as f64 - 0.5);
    // Gamma(nu + 1) = Gamma(k + 1/2) built up from Gamma(1/2)
    let mut gamma_nu1 = T::PI().sqrt();
    for j in 0..order_index {
        gamma_nu1 = gamma_nu1 * T::lit(j as f64 + 0.5);
    }
    let half_x = x * T::lit(0.5);
    let q = -(half_x * half_x);
    let mut term = half_x.powf(nu) / gamma_nu1;
    let mut sum = term;
    let mut m = T::zero();
    for _ in 0..500 {
        m = m + T::one();
        term = term * q / (m * (m + nu));
        sum = sum + term;
        if term.abs() <= T::epsilon() * sum.abs() {
            break;
        }
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn closed_form_examples() {
        let v = bessel_j_half(1, PI / 2.0).unwrap();
        assert!((v - 2.0 / PI).abs() < 1e-15);
        let v = bessel_j_half(0, PI).unwrap();
        assert!((v + 2f64.sqrt() / PI).abs() < 1e-15);
        let v = bessel_j_half(2, PI).unwrap();
        assert!((v - 2f64.sqrt() / PI).abs() < 1e-15);
    }

    #[test]
    fn series_and_recurrence_agree_near_the_switch() {
        // J_{7/2}(x) = sqrt(2/(pi x)) [(15/x^3 - 6/x) sin x - (15/x^2 - 1) cos x]
        let closed = |x: f64| {
            (2.0 / (PI * x)).sqrt()
                * ((15.0 / x.powi(3) - 6.0 / x) * x.sin() - (15.0 / (x * x) - 1.0) * x.cos())
        };
        for &x in &[0.3, 1.0, 3.4, 3.6, 10.0, 60.0] {
            let v = bessel_j_half(4, x).unwrap();
            assert!((v - closed(x)).abs() < 1e-12, "x={x}: {v} vs {}", closed(x));
        }
    }

    #[test]
    fn negative_three_halves() {
        // J_{-3/2}(x) = -sqrt(2/(pi x)) (cos x / x + sin x)
        for &x in &[0.2, 2.0, 30.0] {
            let expect = -(2.0 / (PI * x)).sqrt() * (x.cos() / x + x.sin());
            assert!((bessel_j_half(-1, x).unwrap() - expect).abs() < 1e-13);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(bessel_j_half(1, 0.0f64).is_err());
        assert!(bessel_j_half(1, -1.0f64).is_err());
        assert!(bessel_j_half(-2, 1.0f64).is_err());
    }
}
