//! Eigenangle correlations of the conditioned ensemble.
//!
//! With `x = cos theta` the free eigenangles form a determinantal point
//! process for the Jacobi weight `(1-x)^{n-1/2} (1+x)^{-1/2}`, which in angle
//! space reads `(1 - cos theta)^n d theta`. The kernel is the
//! Christoffel-Darboux sum over the first `M` orthogonal polynomials, so
//! that the one-level density integrates to the number of angles `M`.

use crate::error::{Error, Result};
use crate::moments::EnsembleSpec;
use crate::scalar::Real;
use crate::special_fn::{bessel_j_half, jacobi_poly_all, ln_jacobi_norm, JacobiParams};

/// Fixes the Jacobi parameters `alpha = n - 1/2`, `beta = -1/2` and the
/// number of angles `M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KernelContext {
    spec: EnsembleSpec,
}

impl KernelContext {
    pub fn new(spec: EnsembleSpec) -> Self {
        Self { spec }
    }

    pub fn spec(&self) -> EnsembleSpec {
        self.spec
    }

    pub fn alpha<T: Real>(&self) -> T {
        T::lit(self.spec.n() as f64 - 0.5)
    }

    pub fn beta<T: Real>(&self) -> T {
        T::lit(-0.5)
    }

    /// Number of polynomials in the kernel, equal to `M`.
    pub fn points(&self) -> usize {
        self.spec.m() as usize
    }

    fn params<T: Real>(&self, degree: usize) -> JacobiParams<T> {
        JacobiParams {
            alpha: self.alpha(),
            beta: self.beta(),
            degree,
        }
    }

    /// `k_{K-1} / (k_K h_{K-1})` for `K = M`, with `k_j` the leading
    /// coefficient of `P_j`.
    fn christoffel_darboux_factor<T: Real>(&self) -> T {
        let k = self.points();
        let kf = T::from_usize_lossy(k);
        let ab = self.alpha::<T>() + self.beta::<T>();
        let two = T::lit(2.0);
        // k_K / k_{K-1}; the K = 1 case is written with the common factor
        // cancelled so that alpha + beta = -1 is harmless
        let lead_ratio = if k == 1 {
            (two + ab) / two
        } else {
            (two * kf + ab) * (two * kf + ab - T::one()) / (two * kf * (kf + ab))
        };
        (-ln_jacobi_norm(self.params::<T>(k - 1))).exp() / lead_ratio
    }
}

fn check_angle<T: Real>(function: &'static str, theta: T) -> Result<()> {
    if !(theta >= T::zero() && theta <= T::PI()) {
        return Err(Error::Domain {
            function,
            value: theta.to_f64_lossy(),
        });
    }
    Ok(())
}

/// Below this separation in `cos theta` the diagonal limit is used.
const DIAGONAL_GAP: f64 = 1e-9;

/// `K_M(theta, phi) = sum_{j<M} P_j(cos theta) P_j(cos phi) / h_j` in
/// Christoffel-Darboux form.
pub fn kernel<T: Real>(ctx: &KernelContext, theta: T, phi: T) -> Result<T> {
    check_angle("kernel", theta)?;
    check_angle("kernel", phi)?;
    let k = ctx.points();
    if k == 0 {
        return Ok(T::zero());
    }
    let (x, y) = (theta.cos(), phi.cos());
    let factor = ctx.christoffel_darboux_factor::<T>();
    let (a, b) = (ctx.alpha::<T>(), ctx.beta::<T>());
    if (x - y).abs() < T::lit(DIAGONAL_GAP) {
        return Ok(factor * diagonal_bracket(a, b, k, x));
    }
    let px = jacobi_poly_all(a, b, k, x);
    let py = jacobi_poly_all(a, b, k, y);
    Ok(factor * (px[k] * py[k - 1] - px[k - 1] * py[k]) / (x - y))
}

/// `P_K'(x) P_{K-1}(x) - P_{K-1}'(x) P_K(x)`.
fn diagonal_bracket<T: Real>(a: T, b: T, k: usize, x: T) -> T {
    let p = jacobi_poly_all(a, b, k, x);
    let dp = jacobi_poly_all(a + T::one(), b + T::one(), k - 1, x);
    let two = T::lit(2.0);
    let deriv = |j: usize| {
        if j == 0 {
            T::zero()
        } else {
            (T::from_usize_lossy(j) + a + b + T::one()) / two * dp[j - 1]
        }
    };
    deriv(k) * p[k - 1] - deriv(k - 1) * p[k]
}

/// The same kernel as a direct spectral sum; slower, used as a cross-check.
pub fn kernel_spectral<T: Real>(ctx: &KernelContext, theta: T, phi: T) -> Result<T> {
    check_angle("kernel_spectral", theta)?;
    check_angle("kernel_spectral", phi)?;
    let k = ctx.points();
    if k == 0 {
        return Ok(T::zero());
    }
    let (a, b) = (ctx.alpha::<T>(), ctx.beta::<T>());
    let px = jacobi_poly_all(a, b, k - 1, theta.cos());
    let py = jacobi_poly_all(a, b, k - 1, phi.cos());
    Ok((0..k)
        .map(|j| px[j] * py[j] * (-ln_jacobi_norm(ctx.params::<T>(j))).exp())
        .sum())
}

/// `(1 - cos theta)^{n/2}`, i.e. `2^{n/2} sin^n(theta/2)`.
fn half_weight<T: Real>(ctx: &KernelContext, theta: T) -> T {
    let s = (theta * T::lit(0.5)).sin();
    (T::lit(2.0) * s * s).powi(ctx.spec.n() as i32).sqrt()
}

/// Expected density of eigenangles, `(1 - cos theta)^n K_M(theta, theta)`.
pub fn one_level_density<T: Real>(ctx: &KernelContext, theta: T) -> Result<T> {
    let w = half_weight(ctx, theta);
    Ok(w * w * kernel(ctx, theta, theta)?)
}

/// `m`-point correlation function: the determinant of the weighted kernel
/// matrix at the given angles.
pub fn m_level_density<T: Real>(ctx: &KernelContext, thetas: &[T]) -> Result<T> {
    let m = thetas.len();
    if m == 0 || m > ctx.points() {
        return Err(Error::InvalidParameter(format!(
            "m-level density needs 1 <= m <= M = {}, got m = {m}",
            ctx.points()
        )));
    }
    let weights: Vec<T> = thetas.iter().map(|&t| half_weight(ctx, t)).collect();
    let mut matrix = vec![T::zero(); m * m];
    for j in 0..m {
        for k in j..m {
            let v = weights[j] * weights[k] * kernel(ctx, thetas[j], thetas[k])?;
            matrix[j * m + k] = v;
            matrix[k * m + j] = v;
        }
    }
    Ok(determinant(&mut matrix, m))
}

/// Determinant by Gaussian elimination with partial pivoting; consumes the
/// row-major matrix.
fn determinant<T: Real>(a: &mut [T], m: usize) -> T {
    let mut det = T::one();
    for col in 0..m {
        let pivot = (col..m)
            .max_by(|&i, &j| {
                a[i * m + col]
                    .abs()
                    .partial_cmp(&a[j * m + col].abs())
                    .unwrap()
            })
            .unwrap_or(col);
        if a[pivot * m + col] == T::zero() {
            return T::zero();
        }
        if pivot != col {
            for k in 0..m {
                a.swap(pivot * m + k, col * m + k);
            }
            det = -det;
        }
        let p = a[col * m + col];
        det = det * p;
        for row in col + 1..m {
            let factor = a[row * m + col] / p;
            for k in col..m {
                let v = a[col * m + k];
                a[row * m + k] = a[row * m + k] - factor * v;
            }
        }
    }
    det
}

/// The finite-`M` kernel in scaled angles, `(pi/M) w w K_M(pi theta/M, pi phi/M)`,
/// which tends to [`scaled_kernel`] as `M` grows.
pub fn finite_scaled_kernel<T: Real>(ctx: &KernelContext, theta: T, phi: T) -> Result<T> {
    let scale = T::PI() / T::from_usize_lossy(ctx.points().max(1));
    let (t, p) = (theta * scale, phi * scale);
    Ok(scale * half_weight(ctx, t) * half_weight(ctx, p) * kernel(ctx, t, p)?)
}

fn check_scaled<T: Real>(function: &'static str, n: u32, theta: T) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter(format!("{function} needs n >= 1")));
    }
    if !(theta > T::zero()) || !theta.is_finite() {
        return Err(Error::Domain {
            function,
            value: theta.to_f64_lossy(),
        });
    }
    Ok(())
}

/// Large-`M` limit of the scaled kernel, a Bessel kernel of half-integer order.
pub fn scaled_kernel<T: Real>(n: u32, theta: T, phi: T) -> Result<T> {
    check_scaled("scaled_kernel", n, theta)?;
    check_scaled("scaled_kernel", n, phi)?;
    if theta == phi {
        return scaled_one_level(n, theta);
    }
    let pi = T::PI();
    let k = n as i32;
    let (xt, xp) = (theta * pi, phi * pi);
    let lower_t = bessel_j_half(k - 1, xt)?;
    let upper_t = bessel_j_half(k, xt)?;
    let lower_p = bessel_j_half(k - 1, xp)?;
    let upper_p = bessel_j_half(k, xp)?;
    let bracket = theta * lower_t * upper_p - phi * lower_p * upper_t;
    Ok((xt * xp).sqrt() * bracket / (phi * phi - theta * theta))
}

/// Scaled one-level density; vanishes like `theta^{2n}` at the origin and
/// tends to 1 for large `theta`.
pub fn scaled_one_level<T: Real>(n: u32, theta: T) -> Result<T> {
    check_scaled("scaled_one_level", n, theta)?;
    let pi = T::PI();
    let x = theta * pi;
    let k = n as i32;
    let lower = bessel_j_half(k - 1, x)?;
    let upper = bessel_j_half(k, x)?;
    let order = T::lit(2.0 * n as f64 - 1.0);
    Ok(pi * pi * T::lit(0.5) * theta * (lower * lower + upper * upper - order / x * upper * lower))
}
