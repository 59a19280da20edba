//! Moments of `|Lambda^{(n)}(1)|` over the conditioned ensemble.
//!
//! The closed form is a product over `j = 1..M` of gamma ratios; everything
//! is accumulated in log space because `M` runs into the thousands.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::special_fn::{barnes_g, digamma, ln_gamma_complex, log_gamma, trigamma, LogComplex};

/// The conditioned ensemble: `n` eigenvalues forced to 1 and `M` free
/// conjugate pairs, inside `SO(n + 2M)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EnsembleSpec {
    n: u32,
    m: u32,
}

impl EnsembleSpec {
    pub fn new(n: u32, m: u32) -> Result<Self> {
        if n + 2 * m < 2 {
            return Err(Error::InvalidParameter(format!(
                "matrix dimension N = n + 2M = {} must be at least 2",
                n + 2 * m
            )));
        }
        Ok(Self { n, m })
    }

    /// Multiplicity of the eigenvalue at 1.
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Number of free eigenangles.
    pub fn m(&self) -> u32 {
        self.m
    }

    /// Matrix dimension `N = n + 2M`.
    pub fn dimension(&self) -> u32 {
        self.n + 2 * self.m
    }

    /// Largest attainable value `n! 4^M` of `|Lambda^{(n)}(1)|`.
    pub fn ln_support_max<T: Real>(&self) -> T {
        ln_factorial::<T>(self.n) + T::lit(2.0 * self.m as f64) * T::LN_2()
    }

    /// Left edge `-(n + 1/2)` of the half-plane where the moments converge.
    pub fn abscissa_of_convergence<T: Real>(&self) -> T {
        -(T::lit(self.n as f64) + T::lit(0.5))
    }
}

pub(crate) fn ln_factorial<T: Real>(n: u32) -> T {
    lgamma_real(T::lit(n as f64 + 1.0))
}

fn lgamma_real<T: Real>(x: T) -> T {
    ln_gamma_complex(Complex::new(x, T::zero())).re
}

fn real<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

/// Parameters of the Selberg integral
/// `int_{[-1,1]^K} prod |x_j - x_l|^{2 gamma} prod (1-x_j)^{alpha-1} (1+x_j)^{beta-1} dx`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelbergParams<T> {
    pub k: u32,
    pub alpha: Complex<T>,
    pub beta: Complex<T>,
    pub gamma: T,
}

impl<T: Real> SelbergParams<T> {
    pub fn new(k: u32, alpha: Complex<T>, beta: Complex<T>, gamma: T) -> Result<Self> {
        let p = Self {
            k,
            alpha,
            beta,
            gamma,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn real(k: u32, alpha: T, beta: T, gamma: T) -> Result<Self> {
        Self::new(k, real(alpha), real(beta), gamma)
    }

    fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidParameter(
                "Selberg integral needs K >= 1".into(),
            ));
        }
        if !(self.alpha.re > T::zero()) || !(self.beta.re > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "Selberg integral needs Re alpha > 0 and Re beta > 0 (alpha = {}, beta = {})",
                self.alpha, self.beta
            )));
        }
        let k = T::lit(self.k as f64);
        let mut bound = k.recip();
        if self.k > 1 {
            let km1 = k - T::one();
            bound = bound.min(self.alpha.re / km1).min(self.beta.re / km1);
        }
        if !(self.gamma > -bound) {
            return Err(Error::InvalidParameter(format!(
                "Selberg integral needs gamma > {}, got {}",
                -bound, self.gamma
            )));
        }
        Ok(())
    }
}

/// Closed-form Selberg integral (log).
pub fn selberg_integral<T: Real>(params: SelbergParams<T>) -> Result<LogComplex<T>> {
    params.validate()?;
    let SelbergParams {
        k,
        alpha,
        beta,
        gamma,
    } = params;
    let one = T::one();
    let kf = T::lit(k as f64);
    let exponent = real(gamma * kf * (kf - one)) + (alpha + beta - one) * kf;
    let mut acc = exponent * T::LN_2();
    let ln_gamma_1g = lgamma_real(one + gamma);
    for j in 0..k {
        let jg = T::lit(j as f64) * gamma;
        acc = acc
            + log_gamma(real(one + gamma + jg))?.ln()
            + log_gamma(alpha + jg)?.ln()
            + log_gamma(beta + jg)?.ln()
            - ln_gamma_1g
            - log_gamma(alpha + beta + real(gamma * (kf + T::lit(j as f64) - one)))?.ln();
    }
    Ok(LogComplex::from_ln(acc))
}

/// Normalization constant `C(M, n)` of the conditioned measure (log).
pub fn normalization_c<T: Real>(spec: EnsembleSpec) -> LogComplex<T> {
    let n = T::lit(spec.n as f64);
    let m = T::lit(spec.m as f64);
    let half = T::lit(0.5);
    let mut acc = (m * (m - T::one()) + m * n) * T::LN_2();
    for j in 1..=spec.m {
        let jf = T::lit(j as f64);
        acc =
            acc + lgamma_real(jf + T::one()) + lgamma_real(n - half + jf) + lgamma_real(jf - half)
                - lgamma_real(n + m + jf - T::one());
    }
    LogComplex::new(-acc, T::zero())
}

fn check_moment_domain<T: Real>(spec: &EnsembleSpec, s: Complex<T>) -> Result<()> {
    if !(s.re > spec.abscissa_of_convergence::<T>()) {
        return Err(Error::Domain {
            function: "moment",
            value: s.re.to_f64_lossy(),
        });
    }
    Ok(())
}

/// `M(n, M, s) = <|Lambda^{(n)}(1)|^s>` from the closed-form gamma product (log).
///
/// Requires `Re s > -(n + 1/2)`. `M = 0` gives `(n!)^s`.
pub fn moment_exact<T: Real>(spec: EnsembleSpec, s: Complex<T>) -> Result<LogComplex<T>> {
    check_moment_domain(&spec, s)?;
    let n = T::lit(spec.n as f64);
    let m = T::lit(spec.m as f64);
    let half = T::lit(0.5);
    let one = T::one();
    let mut acc = s * ln_factorial::<T>(spec.n) + s * (T::lit(2.0) * m * T::LN_2());
    for j in 1..=spec.m {
        let jf = T::lit(j as f64);
        acc = acc + log_gamma(s + (n - half + jf))?.ln() + lgamma_real(n + m + jf - one)
            - lgamma_real(n - half + jf)
            - log_gamma(s + (n + m + jf - one))?.ln();
    }
    Ok(LogComplex::from_ln(acc))
}

/// Log of the moment continued off the half-plane of convergence, as needed
/// on Mellin contours. Precomputes the `s`-independent part.
#[derive(Debug, Clone)]
pub(crate) struct LnMoment<T> {
    m: u32,
    a: T,
    b: T,
    constant: T,
}

impl<T: Real> LnMoment<T> {
    pub(crate) fn new(spec: &EnsembleSpec) -> Self {
        let n = T::lit(spec.n as f64);
        let a = n + T::lit(0.5);
        let b = n + T::lit(spec.m as f64);
        let mut constant = T::zero();
        for j in 0..spec.m {
            let jf = T::lit(j as f64);
            constant = constant + lgamma_real(b + jf) - lgamma_real(a + jf);
        }
        Self {
            m: spec.m,
            a,
            b,
            constant,
        }
    }

    /// `log(M(s) / (n! 4^M)^s)`, the moment of `|Lambda| / (n! 4^M)`.
    pub(crate) fn ln_scaled(&self, s: Complex<T>) -> Complex<T> {
        // sum_j log Gamma(a + j - 1 + s) = M log Gamma(a + s) + sum_i (M-1-i) log(a + s + i)
        let mf = T::lit(self.m as f64);
        let mut acc = (ln_gamma_complex(s + self.a) - ln_gamma_complex(s + self.b)) * mf;
        for i in 0..self.m.saturating_sub(1) {
            let w = T::lit((self.m - 1 - i) as f64);
            let fi = T::lit(i as f64);
            acc = acc + ((s + self.a + fi).ln() - (s + self.b + fi).ln()) * w;
        }
        acc + self.constant
    }

    /// `d/dc log M_scaled(c)` and the second derivative, for real `c`.
    pub(crate) fn derivatives(&self, c: T) -> Result<(T, T)> {
        let mut d1 = T::zero();
        let mut d2 = T::zero();
        for j in 0..self.m {
            let jf = T::lit(j as f64);
            d1 = d1 + digamma(self.a + jf + c)? - digamma(self.b + jf + c)?;
            d2 = d2 + trigamma(self.a + jf + c)? - trigamma(self.b + jf + c)?;
        }
        Ok((d1, d2))
    }
}

/// Moments of `Lambda_U(1)` over Haar measure on `SO(2N)` (log); the `n = 0`
/// case of [`moment_exact`].
pub fn moment_haar_so_even<T: Real>(big_n: u32, s: Complex<T>) -> Result<LogComplex<T>> {
    if big_n == 0 {
        return Err(Error::InvalidParameter("SO(2N) needs N >= 1".into()));
    }
    if !(s.re > T::lit(-0.5)) {
        return Err(Error::Domain {
            function: "moment_haar_so_even",
            value: s.re.to_f64_lossy(),
        });
    }
    let nf = T::lit(big_n as f64);
    let half = T::lit(0.5);
    let one = T::one();
    let mut acc = s * (T::lit(2.0) * nf * T::LN_2());
    for j in 1..=big_n {
        let jf = T::lit(j as f64);
        acc = acc + lgamma_real(nf + jf - one) + log_gamma(s + (jf - half))?.ln()
            - lgamma_real(jf - half)
            - log_gamma(s + (jf + nf - one))?.ln();
    }
    Ok(LogComplex::from_ln(acc))
}

/// The moment written through Barnes G ratios, for real `s` only.
///
/// Independent of the term-by-term product in [`moment_exact`]; kept as a
/// cross-check of both the G evaluation and the product.
pub fn moment_exact_barnes<T: Real>(spec: EnsembleSpec, s: T) -> Result<LogComplex<T>> {
    check_moment_domain(&spec, real(s))?;
    let n = T::lit(spec.n as f64);
    let m = T::lit(spec.m as f64);
    let half = T::lit(0.5);
    let two = T::lit(2.0);
    let g = |z: T| barnes_g(z).map(|v| v.log_modulus());
    let acc = s * ln_factorial::<T>(spec.n) + two * m * s * T::LN_2() + g(n + half + s + m)?
        - g(n + half + s)?
        + g(n + half)?
        - g(n + half + m)?
        + g(n + two * m)?
        - g(n + m)?
        + g(n + s + m)?
        - g(n + s + two * m)?;
    Ok(LogComplex::new(acc, T::zero()))
}

/// Large-`M` asymptotic form of the moment, for real `s > -(n + 1/2)` (log).
pub fn moment_asymptotic<T: Real>(spec: EnsembleSpec, s: T) -> Result<LogComplex<T>> {
    if spec.m == 0 {
        return Err(Error::InvalidParameter(
            "asymptotic moment needs M >= 1".into(),
        ));
    }
    check_moment_domain(&spec, real(s))?;
    let n = T::lit(spec.n as f64);
    let m = T::lit(spec.m as f64);
    let half = T::lit(0.5);
    let g_shift = barnes_g(n + half + s)?;
    if g_shift.is_zero() {
        return Err(Error::BarnesZero((n + half + s).to_f64_lossy()));
    }
    let ln_two_pi = (T::PI() + T::PI()).ln();
    let acc = s * ln_factorial::<T>(spec.n) + s * half * ln_two_pi
        - (s * s * half + s * (n - T::one())) * T::LN_2()
        + barnes_g(n + half)?.log_modulus()
        - g_shift.log_modulus()
        + (s * s * half + s * (n - half)) * m.ln();
    Ok(LogComplex::new(acc, T::zero()))
}
