//! The density `P(n, M, x)` of `|Lambda^{(n)}(1)|` by numerical inverse
//! Mellin transform, together with its small-`x` law.
//!
//! Writing `X = n! 4^M` for the top of the support and `u = ln(X / x)`, the
//! inversion integral becomes
//!
//! ```text
//! x P(x) = (1 / 2 pi i) int e^{s u} R(s) ds,    R(s) = M(n, M, s) / X^s.
//! ```
//!
//! On a vertical line `|R(c + it)|` only decays like `|t|^{-M(M - 1/2)}`,
//! because the gamma factors cancel in pairs, which for small `M` makes a
//! truncated vertical integral useless. The path is therefore bent to the
//! left, `s(t) = c + it - lambda t^2`; `e^{su}` then decays like a Gaussian
//! while the path stays clear of the poles at `s <= -(n + 1/2)`. By Cauchy's
//! theorem the value does not depend on `c` or `lambda`. When no abscissa is
//! given, `c` sits at the real saddle point of `e^{cu} R(c)`, which removes
//! cancellation in the quadrature.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::moments::{ln_factorial, moment_exact, EnsembleSpec, LnMoment};
use crate::quadrature::GaussLegendre;
use crate::scalar::Real;
use crate::special_fn::{barnes_g, ln_gamma};

/// Integration path `s(t) = c + it - bend t^2` for `t` in `[-t_max, t_max]`,
/// sampled at `steps` equally spaced nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MellinContour<T> {
    pub c: T,
    pub t_max: T,
    pub steps: usize,
    pub bend: T,
}

impl<T: Real> MellinContour<T> {
    /// A contour with the bend that keeps a strip of width `c + n + 1/2`
    /// free of poles.
    pub fn new(spec: &EnsembleSpec, c: T, t_max: T, steps: usize) -> Result<Self> {
        let contour = Self {
            c,
            t_max,
            steps,
            bend: default_bend(spec, c),
        };
        contour.validate(spec)?;
        Ok(contour)
    }

    /// A straight vertical line, as in the textbook inversion formula.
    pub fn vertical(spec: &EnsembleSpec, c: T, t_max: T, steps: usize) -> Result<Self> {
        let contour = Self {
            c,
            t_max,
            steps,
            bend: T::zero(),
        };
        contour.validate(spec)?;
        Ok(contour)
    }

    pub fn validate(&self, spec: &EnsembleSpec) -> Result<()> {
        if !(self.c > spec.abscissa_of_convergence::<T>()) || !self.c.is_finite() {
            return Err(Error::Domain {
                function: "MellinContour::c",
                value: self.c.to_f64_lossy(),
            });
        }
        if !(self.t_max > T::zero()) || !self.t_max.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "contour t_max must be positive, got {}",
                self.t_max
            )));
        }
        if self.steps < 64 {
            return Err(Error::InvalidParameter(format!(
                "contour needs at least 64 steps, got {}",
                self.steps
            )));
        }
        if !(self.bend >= T::zero()) || !self.bend.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "contour bend must be >= 0, got {}",
                self.bend
            )));
        }
        Ok(())
    }

    fn point(&self, t: T) -> Complex<T> {
        Complex::new(self.c - self.bend * t * t, t)
    }

    /// `ds/dt / i`.
    fn tangent(&self, t: T) -> Complex<T> {
        Complex::new(T::one(), T::lit(2.0) * self.bend * t)
    }
}

fn default_bend<T: Real>(spec: &EnsembleSpec, c: T) -> T {
    let width = c - spec.abscissa_of_convergence::<T>();
    if width > T::zero() {
        (T::lit(2.0) * width).recip()
    } else {
        T::zero()
    }
}

/// How [`density_at`] picks its contour.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum ContourChoice<T> {
    /// Saddle-point abscissa, adaptive height and step.
    #[default]
    Auto,
    /// Given abscissa, adaptive height and step.
    Abscissa(T),
    /// Fully specified contour, a single fixed-step pass.
    Fixed(MellinContour<T>),
}

/// A density value with the contour actually used and quadrature diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityEval<T> {
    pub x: T,
    pub value: T,
    pub contour: MellinContour<T>,
    /// Integrand modulus at `t_max` relative to its peak.
    pub tail_ratio: T,
    /// `int |integrand| / |int integrand|`; large values mean cancellation.
    pub cancellation: T,
    pub converged: bool,
}

/// A sampled curve: strictly increasing abscissae and finite values.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid<T> {
    abscissae: Vec<T>,
    values: Vec<T>,
}

impl<T: Real> DensityGrid<T> {
    pub fn new(abscissae: Vec<T>, values: Vec<T>) -> Result<Self> {
        if abscissae.len() != values.len() {
            return Err(Error::InvalidParameter(format!(
                "grid has {} abscissae but {} values",
                abscissae.len(),
                values.len()
            )));
        }
        if abscissae.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter(
                "grid abscissae must be strictly increasing".into(),
            ));
        }
        if let Some(bad) = abscissae.iter().chain(&values).find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "grid holds a non-finite entry {bad}"
            )));
        }
        Ok(Self { abscissae, values })
    }

    pub fn abscissae(&self) -> &[T] {
        &self.abscissae
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.abscissae.len()
    }

    pub fn is_empty(&self) -> bool {
        self.abscissae.is_empty()
    }

    pub fn into_parts(self) -> (Vec<T>, Vec<T>) {
        (self.abscissae, self.values)
    }

    /// Trapezoid-rule integral of the sampled curve.
    pub fn trapezoid(&self) -> T {
        let half = T::lit(0.5);
        self.abscissae
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(x, y)| (x[1] - x[0]) * (y[0] + y[1]) * half)
            .sum()
    }
}

/// Hard cap on quadrature nodes per evaluation.
const MAX_NODES: usize = 1 << 20;
/// Closest the automatic abscissa may come to the first pole.
const MIN_POLE_GAP: f64 = 0.25;

struct Integrand<'a, T> {
    ln_moment: &'a LnMoment<T>,
    u: T,
    contour: MellinContour<T>,
    /// Log-modulus at `t = 0`, factored out to avoid overflow.
    ln_ref: T,
}

impl<T: Real> Integrand<'_, T> {
    fn exponent(&self, t: T) -> Complex<T> {
        let s = self.contour.point(t);
        s * self.u + self.ln_moment.ln_scaled(s)
    }

    /// Returns `(Re[...], |...|)` of the scaled integrand at `t`.
    fn eval(&self, t: T) -> (T, T) {
        let e = self.exponent(t);
        let v = Complex::from_polar((e.re - self.ln_ref).exp(), e.im) * self.contour.tangent(t);
        (v.re, v.norm())
    }
}

/// `P(n, M, x)` by inverse Mellin transform.
///
/// Returns zero for `x >= n! 4^M`, where the density vanishes.
pub fn density_at<T: Real>(
    spec: EnsembleSpec,
    x: T,
    choice: ContourChoice<T>,
) -> Result<DensityEval<T>> {
    let ln_moment = LnMoment::new(&spec);
    density_with(&spec, &ln_moment, x, choice)
}

fn check_spec_for_density(spec: &EnsembleSpec) -> Result<()> {
    if spec.m() == 0 {
        return Err(Error::InvalidParameter(
            "with M = 0 the value is the constant n!; it has no density".into(),
        ));
    }
    Ok(())
}

fn density_with<T: Real>(
    spec: &EnsembleSpec,
    ln_moment: &LnMoment<T>,
    x: T,
    choice: ContourChoice<T>,
) -> Result<DensityEval<T>> {
    check_spec_for_density(spec)?;
    if !(x > T::zero()) || !x.is_finite() {
        return Err(Error::Domain {
            function: "density_at",
            value: x.to_f64_lossy(),
        });
    }
    if let ContourChoice::Fixed(c) = &choice {
        c.validate(spec)?;
    }
    if let ContourChoice::Abscissa(c) = choice {
        MellinContour::new(spec, c, T::one(), 64)?;
    }
    let u = spec.ln_support_max::<T>() - x.ln();
    let (scaled, eval) = scaled_density(spec, ln_moment, u, choice)?;
    Ok(DensityEval {
        x,
        value: scaled / x,
        ..eval
    })
}

/// Solves `u + d/dc log R(c) = 0`; the left side increases in `c`.
fn saddle<T: Real>(spec: &EnsembleSpec, ln_moment: &LnMoment<T>, u: T) -> Result<T> {
    let pole = spec.abscissa_of_convergence::<T>();
    let slope = |c: T| ln_moment.derivatives(c).map(|d| u + d.0);
    let mut lo = pole + T::lit(1e-6);
    if slope(lo)? >= T::zero() {
        return Ok(lo);
    }
    let mut hi = T::one().max(pole + T::one());
    let cap = T::lit(1e12);
    while slope(hi)? < T::zero() {
        lo = hi;
        hi = hi + hi;
        if hi > cap {
            return Ok(cap);
        }
    }
    for _ in 0..60 {
        let mid = (lo + hi) * T::lit(0.5);
        if slope(mid)? < T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= T::lit(1e-9) * (T::one() + hi.abs()) {
            break;
        }
    }
    Ok((lo + hi) * T::lit(0.5))
}

/// `x P(x)` at `u = ln(X / x)` plus diagnostics.
fn scaled_density<T: Real>(
    spec: &EnsembleSpec,
    ln_moment: &LnMoment<T>,
    u: T,
    choice: ContourChoice<T>,
) -> Result<(T, DensityEval<T>)> {
    let dummy = MellinContour {
        c: T::one(),
        t_max: T::one(),
        steps: 64,
        bend: T::zero(),
    };
    if u <= T::zero() {
        let eval = DensityEval {
            x: T::zero(),
            value: T::zero(),
            contour: dummy,
            tail_ratio: T::zero(),
            cancellation: T::one(),
            converged: true,
        };
        return Ok((T::zero(), eval));
    }
    if let ContourChoice::Fixed(contour) = choice {
        return Ok(fixed_pass(ln_moment, u, contour));
    }
    let pole = spec.abscissa_of_convergence::<T>();
    let c = match choice {
        ContourChoice::Abscissa(c) => c,
        _ => saddle(spec, ln_moment, u)?.max(pole + T::lit(MIN_POLE_GAP)),
    };
    let width = c - pole;
    let contour = MellinContour {
        c,
        t_max: T::one(),
        steps: 64,
        bend: default_bend(spec, c),
    };
    let (d1, d2) = ln_moment.derivatives(c)?;
    let curvature_scale = if d2 > T::zero() {
        d2.sqrt().recip()
    } else {
        width
    };
    let phase_rate = u.max((u + d1).abs());
    let h0 = (width / T::lit(6.0))
        .min(curvature_scale * T::lit(0.5))
        .min(T::FRAC_PI_4() / phase_rate);
    let ln_ref = (c * u + ln_moment.ln_scaled(Complex::new(c, T::zero())).re).max(T::lit(-1e300));
    let integrand = Integrand {
        ln_moment,
        u,
        contour,
        ln_ref,
    };
    Ok(adaptive_pass(&integrand, h0))
}

fn finish<T: Real>(
    integrand: &Integrand<'_, T>,
    sum: T,
    abs_sum: T,
    h: T,
    nodes: usize,
    tail_ratio: T,
    converged: bool,
) -> (T, DensityEval<T>) {
    let scale = integrand.ln_ref.exp() / T::PI();
    let value = sum * h * scale;
    let cancellation = if sum != T::zero() {
        (abs_sum / sum).abs()
    } else {
        T::infinity()
    };
    let contour = MellinContour {
        t_max: h * T::from_usize_lossy(nodes.saturating_sub(1)),
        steps: 2 * nodes,
        ..integrand.contour
    };
    if !converged {
        log::warn!(
            "inverse Mellin quadrature did not converge at u = {} (tail ratio {tail_ratio})",
            integrand.u
        );
    }
    let eval = DensityEval {
        x: T::zero(),
        value,
        contour,
        tail_ratio,
        cancellation,
        converged,
    };
    (value, eval)
}

fn fixed_pass<T: Real>(
    ln_moment: &LnMoment<T>,
    u: T,
    contour: MellinContour<T>,
) -> (T, DensityEval<T>) {
    let c = contour.c;
    let ln_ref = c * u + ln_moment.ln_scaled(Complex::new(c, T::zero())).re;
    let integrand = Integrand {
        ln_moment,
        u,
        contour,
        ln_ref,
    };
    let nodes = (contour.steps / 2).max(2);
    let h = contour.t_max / T::from_usize_lossy(nodes - 1);
    let mut sum = T::zero();
    let mut abs_sum = T::zero();
    let mut peak = T::zero();
    let mut last = T::zero();
    for k in 0..nodes {
        let (re, mag) = integrand.eval(h * T::from_usize_lossy(k));
        let w = if k == 0 { T::lit(0.5) } else { T::one() };
        sum = sum + w * re;
        abs_sum = abs_sum + w * mag;
        peak = peak.max(mag);
        last = mag;
    }
    let tail_ratio = if peak > T::zero() {
        last / peak
    } else {
        T::zero()
    };
    let converged = tail_ratio <= T::lit(1e-14).max(T::epsilon());
    finish(&integrand, sum, abs_sum, h, nodes, tail_ratio, converged)
}

fn adaptive_pass<T: Real>(integrand: &Integrand<'_, T>, h0: T) -> (T, DensityEval<T>) {
    let cutoff = T::epsilon() * T::lit(0.05);
    let tol = T::epsilon().powf(T::lit(0.7));
    // March outwards until the integrand is negligible against its peak.
    let mut re_vals = Vec::new();
    let mut peak = T::zero();
    let mut last = T::zero();
    let mut truncated = false;
    loop {
        let k = re_vals.len();
        let (re, mag) = integrand.eval(h0 * T::from_usize_lossy(k));
        re_vals.push((re, mag));
        peak = peak.max(mag);
        let prev = last;
        last = mag;
        if k >= 8 && mag <= cutoff * peak && mag <= prev {
            break;
        }
        if k + 1 >= MAX_NODES || !mag.is_finite() {
            truncated = true;
            break;
        }
    }
    let tail_ratio = if peak > T::zero() {
        last / peak
    } else {
        T::zero()
    };
    let t_end = h0 * T::from_usize_lossy(re_vals.len() - 1);
    let mut sum = T::zero();
    let mut abs_sum = T::zero();
    for (k, &(re, mag)) in re_vals.iter().enumerate() {
        let w = if k == 0 { T::lit(0.5) } else { T::one() };
        sum = sum + w * re;
        abs_sum = abs_sum + w * mag;
    }
    let mut h = h0;
    let mut nodes = re_vals.len();
    let mut converged = false;
    // Halve the step until two trapezoid sums agree.
    for _ in 0..12 {
        if truncated {
            break;
        }
        let half = h * T::lit(0.5);
        let count = nodes - 1;
        let (mid_sum, mid_abs) = (0..count)
            .map(|k| integrand.eval(half + h * T::from_usize_lossy(k)))
            .fold((T::zero(), T::zero()), |acc, v| (acc.0 + v.0, acc.1 + v.1));
        let old = sum * h;
        sum = sum + mid_sum;
        abs_sum = abs_sum + mid_abs;
        h = half;
        nodes = 2 * nodes - 1;
        let new = sum * h;
        if (new - old).abs() <= tol * abs_sum * h {
            converged = true;
            break;
        }
        if nodes > MAX_NODES {
            break;
        }
    }
    debug_assert!(t_end >= T::zero());
    finish(
        integrand,
        sum,
        abs_sum,
        h,
        nodes,
        tail_ratio,
        converged && !truncated,
    )
}

/// [`density_at`] over a grid, evaluated in parallel, in input order.
pub fn density_points<T: Real>(
    spec: EnsembleSpec,
    xs: &[T],
    choice: ContourChoice<T>,
) -> Result<Vec<DensityEval<T>>> {
    let ln_moment = LnMoment::new(&spec);
    xs.par_iter()
        .map(|&x| density_with(&spec, &ln_moment, x, choice))
        .collect()
}

/// `P(n, M, x)` sampled on a strictly increasing grid of positive abscissae.
pub fn density_grid<T: Real>(
    spec: EnsembleSpec,
    xs: &[T],
    choice: ContourChoice<T>,
) -> Result<DensityGrid<T>> {
    if let Some(&bad) = xs.iter().find(|x| !(**x > T::zero())) {
        return Err(Error::Domain {
            function: "density_grid",
            value: bad.to_f64_lossy(),
        });
    }
    let evals = density_points(spec, xs, choice)?;
    DensityGrid::new(xs.to_vec(), evals.into_iter().map(|e| e.value).collect())
}

/// `int_{u_lo}^inf f(u) weight(u) du` where `f(u) = x P(x)` at `x = X e^{-u}`.
///
/// Substitutes `u = w^2`, which smooths the `u^{M(M-1/2)-1}` edge behaviour,
/// and doubles the number of Gauss-Legendre panels until the result settles.
fn integrate_in_u<W: Fn(f64) -> f64 + Sync>(
    spec: &EnsembleSpec,
    u_lo: f64,
    weight: W,
) -> Result<f64> {
    check_spec_for_density(spec)?;
    let ln_moment = LnMoment::<f64>::new(spec);
    let a = spec.n() as f64 + 0.5;
    let ln_x = spec.ln_support_max::<f64>();
    // beyond u_hi the density is below e^{-45} of its small-x law
    let u_hi = u_lo.max(0.0) + ln_x.max(0.0) / 1.0 + 45.0 / a;
    let w_lo = u_lo.max(0.0).sqrt();
    let w_hi = u_hi.sqrt();
    let rule = GaussLegendre::new(24);
    let eval = |panels: usize| -> Result<f64> {
        let h = (w_hi - w_lo) / panels as f64;
        let nodes: Vec<(f64, f64)> = (0..panels)
            .flat_map(|p| {
                let lo = w_lo + h * p as f64;
                rule.mapped(lo, lo + h).collect::<Vec<_>>()
            })
            .collect();
        let parts: Result<Vec<f64>> = nodes
            .par_iter()
            .map(|&(w, wt)| {
                let u = w * w;
                let (f, _) = scaled_density(spec, &ln_moment, u, ContourChoice::Auto)?;
                Ok(wt * 2.0 * w * f * weight(u))
            })
            .collect();
        Ok(parts?.iter().sum())
    };
    let mut panels = 8;
    let mut prev = eval(panels)?;
    loop {
        panels *= 2;
        let next = eval(panels)?;
        if (next - prev).abs() <= 1e-11 * next.abs().max(1e-300) || panels >= 512 {
            if panels >= 512 && (next - prev).abs() > 1e-8 * next.abs() {
                log::warn!("density integral did not settle: {prev} vs {next}");
            }
            return Ok(next);
        }
        prev = next;
    }
}

/// `int_0^X P(x) dx`, which should be 1.
pub fn total_mass(spec: EnsembleSpec) -> Result<f64> {
    integrate_in_u(&spec, 0.0, |_| 1.0)
}

/// `int x^k P(x) dx` from the inverted density, to compare with the moments.
pub fn density_moment(spec: EnsembleSpec, k: u32) -> Result<f64> {
    let ln_x = spec.ln_support_max::<f64>();
    integrate_in_u(&spec, 0.0, |u| (k as f64 * (ln_x - u)).exp())
}

/// Distribution function `P(|Lambda| <= x)` from the inverted density.
pub fn cdf_at(spec: EnsembleSpec, x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::Domain {
            function: "cdf_at",
            value: x,
        });
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let u = spec.ln_support_max::<f64>() - x.ln();
    if u <= 0.0 {
        return Ok(1.0);
    }
    integrate_in_u(&spec, u, |_| 1.0)
}

fn lgamma<T: Real>(x: T) -> Result<T> {
    ln_gamma(x)
}

/// Log of the small-`x` coefficient `f(n, M)` in `P(n, M, x) ~ f x^{n-1/2}`.
pub fn ln_small_x_coefficient<T: Real>(spec: EnsembleSpec) -> Result<T> {
    check_spec_for_density(&spec)?;
    let n = T::lit(spec.n() as f64);
    let m = T::lit(spec.m() as f64);
    let half = T::lit(0.5);
    let two_n1 = n + n + T::one();
    let mut acc =
        -two_n1 * half * ln_factorial::<T>(spec.n()) - m * two_n1 * T::LN_2() - lgamma(m)?;
    for j in 1..=spec.m() {
        let jf = T::lit(j as f64);
        acc = acc + lgamma(jf)? + lgamma(m + n + jf - T::one())?
            - lgamma(n - half + jf)?
            - lgamma(m + jf - T::lit(1.5))?;
    }
    Ok(acc)
}

/// `f(n, M)`, the coefficient of the `x^{n-1/2}` law at small `x`.
pub fn small_x_coefficient<T: Real>(spec: EnsembleSpec) -> Result<T> {
    ln_small_x_coefficient(spec).map(T::exp)
}

/// Large-`M` form of [`small_x_coefficient`].
pub fn small_x_coefficient_asymptotic<T: Real>(spec: EnsembleSpec) -> Result<T> {
    check_spec_for_density(&spec)?;
    let n = T::lit(spec.n() as f64);
    let m = T::lit(spec.m() as f64);
    let half = T::lit(0.5);
    let acc = -(n + half) * ln_factorial::<T>(spec.n())
        + barnes_g(n + half)?.log_modulus()
        + (-n * n * half + n * half + T::lit(0.375)) * m.ln()
        + (n * n * half - T::lit(1.5) * n - T::lit(0.875)) * T::LN_2()
        - (n * half + T::lit(0.25)) * T::PI().ln();
    Ok(acc.exp())
}

/// Leading-order `P(|Lambda| <= X)` for small `X`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailProbability<T> {
    pub probability: T,
    /// `X` beyond which the leading term is not trusted (`0.1` times the mean).
    pub validity_threshold: T,
    pub within_validity: bool,
}

/// `(2 / (2n + 1)) X^{(2n+1)/2} f(n, M)`.
pub fn tail_probability<T: Real>(spec: EnsembleSpec, big_x: T) -> Result<TailProbability<T>> {
    if !(big_x >= T::zero()) || !big_x.is_finite() {
        return Err(Error::Domain {
            function: "tail_probability",
            value: big_x.to_f64_lossy(),
        });
    }
    let a = T::lit(spec.n() as f64) + T::lit(0.5);
    let ln_f = ln_small_x_coefficient::<T>(spec)?;
    let probability = if big_x == T::zero() {
        T::zero()
    } else {
        (ln_f + a * big_x.ln()).exp() / a
    };
    let mean = moment_exact(spec, Complex::new(T::one(), T::zero()))?.to_real();
    let validity_threshold = T::lit(0.1) * mean;
    let within_validity = big_x <= validity_threshold;
    if !within_validity {
        log::warn!("tail probability at X = {big_x} is outside the small-X regime (X <= {validity_threshold})");
    }
    Ok(TailProbability {
        probability,
        validity_threshold,
        within_validity,
    })
}
