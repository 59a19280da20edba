//! Cross-validation suite: every closed form is compared against an
//! independent route (quadrature, Monte Carlo, a second formula).
//!
//! The moment function under test is injectable so that the suite's own
//! sensitivity can be checked: a tampered formula must make it fail.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex;

use crate::ensemble::{estimate_moment, SamplerConfig};
use crate::error::Result;
use crate::level_density::{
    finite_scaled_kernel, kernel, kernel_spectral, scaled_kernel, KernelContext,
};
use crate::moments::{
    moment_exact, moment_exact_barnes, moment_haar_so_even, normalization_c, selberg_integral,
    EnsembleSpec, SelbergParams,
};
use crate::quadrature::GaussLegendre;
use crate::special_fn::{barnes_g, ln_gamma};
use crate::value_dist::{density_moment, total_mass};

/// Outcome of one check: the worst error over its cases against the tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub tolerance: f64,
    pub error: f64,
    pub passed: bool,
    pub seconds: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    /// Run the sub-minute subset.
    pub quick: bool,
    pub seed: u64,
    /// Monte Carlo samples per moment estimate.
    pub samples: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            quick: false,
            seed: 0x5eed,
            samples: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// The moment `M(n, M, s)` for real `s`, as a plain number.
pub type MomentFn = dyn Fn(EnsembleSpec, f64) -> Result<f64> + Sync;

/// The production moment formula.
pub fn exact_moment(spec: EnsembleSpec, s: f64) -> Result<f64> {
    moment_exact(spec, Complex::new(s, 0.0)).map(|v| v.to_real())
}

/// Runs the suite against the production formulas.
pub fn run(options: &VerifyOptions) -> Report {
    run_with_moment(options, &exact_moment)
}

/// Runs the suite with `moment` standing in for the closed form.
pub fn run_with_moment(options: &VerifyOptions, moment: &MomentFn) -> Report {
    let quick = options.quick;
    let mut checks = vec![
        timed("moments vs 1-D/2-D angle quadrature", 1e-10, || {
            moments_vs_quadrature(moment)
        }),
        timed("Haar SO(2N) specialization", 1e-12, || {
            haar_specialization(moment, if quick { 10 } else { 50 })
        }),
        timed("moments vs Barnes G route", 1e-9, || barnes_route(moment)),
        timed("Selberg vs K-dim quadrature", 1e-6, || {
            selberg_vs_quadrature(if quick { 2 } else { 3 })
        }),
        timed(
            "normalization C(M,n) x Selberg = 1",
            1e-12,
            normalization_identity,
        ),
        timed(
            "Barnes G recurrence on half-integers",
            1e-10,
            barnes_recurrence,
        ),
        timed(
            "kernel Christoffel-Darboux vs spectral sum",
            1e-8,
            kernel_cd_vs_spectral,
        ),
        timed("scaled kernel at M = 2000", 1e-3, scaled_kernel_convergence),
    ];
    let mellin_grid: Vec<(u32, u32)> = if quick {
        vec![(1, 3), (2, 6)]
    } else {
        [0u32, 1, 2, 3]
            .iter()
            .flat_map(|&n| [1u32, 3, 6, 10].map(|m| (n, m)))
            .collect()
    };
    checks.push(timed("inverse Mellin total mass", 1e-6, || {
        mellin_mass(&mellin_grid)
    }));
    checks.push(timed("inverse Mellin first moment", 1e-5, || {
        mellin_moment(&mellin_grid, moment)
    }));
    let mc_grid: Vec<(u32, u32, f64)> = if quick {
        vec![(1, 1, 1.0), (0, 5, 2.0)]
    } else {
        [0u32, 1, 2]
            .iter()
            .flat_map(|&n| {
                [1u32, 5, 10]
                    .iter()
                    .flat_map(move |&m| [1.0, 2.0].map(|s| (n, m, s)))
            })
            .collect()
    };
    let samples = if quick {
        options.samples.min(20_000)
    } else {
        options.samples
    };
    checks.push(timed("Monte Carlo moments (max |z|)", 3.0, || {
        monte_carlo_moments(&mc_grid, moment, options.seed, samples)
    }));
    Report { checks }
}

fn timed<F: FnOnce() -> Result<(f64, String)>>(name: &str, tolerance: f64, f: F) -> Check {
    let start = Instant::now();
    let (error, detail) = match f() {
        Ok(v) => v,
        Err(e) => (f64::INFINITY, format!("error: {e}")),
    };
    Check {
        name: name.to_string(),
        tolerance,
        error,
        passed: error <= tolerance,
        seconds: start.elapsed().as_secs_f64(),
        detail,
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs()
    }
}

/// Tracks the worst case of a check.
struct Worst {
    error: f64,
    case: String,
}

impl Worst {
    fn new() -> Self {
        Self {
            error: 0.0,
            case: String::new(),
        }
    }

    fn record(&mut self, error: f64, case: impl FnOnce() -> String) {
        let error = if error.is_nan() { f64::INFINITY } else { error };
        if error >= self.error {
            self.error = error;
            self.case = case();
        }
    }

    fn finish(self) -> Result<(f64, String)> {
        Ok((self.error, format!("worst case {}", self.case)))
    }
}

/// `<|Lambda|^s>` by tensor Gauss-Legendre in the angles, normalized by the
/// same quadrature at `s = 0`; uses no gamma functions.
pub fn moment_by_angle_quadrature(spec: EnsembleSpec, s: f64, nodes: usize) -> f64 {
    let rule = GaussLegendre::new(nodes);
    let pts: Vec<(f64, f64)> = rule.mapped(0.0, PI).collect();
    let m = spec.m() as usize;
    let n = spec.n() as i32;
    let factorial: f64 = (1..=spec.n()).map(f64::from).product();
    let mut num = 0.0;
    let mut den = 0.0;
    let mut idx = vec![0usize; m];
    loop {
        let mut weight = 1.0;
        let mut prod = 1.0;
        for (j, &i) in idx.iter().enumerate() {
            let (t, w) = pts[i];
            let one_minus = 1.0 - t.cos();
            weight *= w * one_minus.powi(n);
            prod *= one_minus;
            for &k in &idx[..j] {
                weight *= (t.cos() - pts[k].0.cos()).powi(2);
            }
        }
        let value = factorial * 2f64.powi(m as i32) * prod;
        num += weight * value.powf(s);
        den += weight;
        // advance the multi-index
        let mut j = 0;
        while j < m {
            idx[j] += 1;
            if idx[j] < nodes {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
        if j == m {
            break;
        }
    }
    num / den
}

fn moments_vs_quadrature(moment: &MomentFn) -> Result<(f64, String)> {
    let cases = [
        (1, 1, 1.0),
        (1, 1, 2.0),
        (0, 1, 1.0),
        (2, 1, 1.5),
        (1, 2, 1.0),
        (0, 2, 2.0),
        (2, 2, 0.5),
    ];
    let mut worst = Worst::new();
    for (n, m, s) in cases {
        let spec = EnsembleSpec::new(n, m)?;
        let oracle = moment_by_angle_quadrature(spec, s, 80);
        let got = moment(spec, s)?;
        worst.record(rel(got, oracle), || {
            format!("n={n} M={m} s={s}: {got} vs {oracle}")
        });
    }
    worst.finish()
}

fn haar_specialization(moment: &MomentFn, max_m: u32) -> Result<(f64, String)> {
    let mut worst = Worst::new();
    for m in 1..=max_m {
        for s in [0.5, 1.0, 2.0, 3.0] {
            let got = moment(EnsembleSpec::new(0, m)?, s)?;
            let want = moment_haar_so_even(m, Complex::new(s, 0.0))?.to_real();
            worst.record(rel(got, want), || format!("N={m} s={s}"));
        }
    }
    worst.finish()
}

fn barnes_route(moment: &MomentFn) -> Result<(f64, String)> {
    let mut worst = Worst::new();
    for (n, m) in [(0u32, 3u32), (1, 10), (2, 25), (3, 40)] {
        for s in [0.5, 1.0, 2.0] {
            let spec = EnsembleSpec::new(n, m)?;
            let got = moment(spec, s)?;
            let want = moment_exact_barnes(spec, s)?.to_real();
            worst.record(rel(got, want), || format!("n={n} M={m} s={s}"));
        }
    }
    worst.finish()
}

/// Selberg integral with `gamma = 1` by tensor Gauss-Legendre after
/// `x = cos theta`, which turns the weight into
/// `(1 - cos theta)^{alpha - 1/2} (1 + cos theta)^{beta - 1/2} d theta`.
pub fn selberg_by_quadrature(k: usize, alpha: f64, beta: f64, nodes: usize) -> f64 {
    let rule = GaussLegendre::new(nodes);
    let pts: Vec<(f64, f64)> = rule
        .mapped(0.0, PI)
        .map(|(t, w)| {
            let (c, s2) = (t.cos(), (0.5 * t).sin().powi(2));
            let one_minus = 2.0 * s2;
            let one_plus = 2.0 - one_minus;
            (
                c,
                w * one_minus.powf(alpha - 0.5) * one_plus.powf(beta - 0.5),
            )
        })
        .collect();
    let mut total = 0.0;
    let mut idx = vec![0usize; k];
    loop {
        let mut v = 1.0;
        for (j, &i) in idx.iter().enumerate() {
            v *= pts[i].1;
            for &l in &idx[..j] {
                v *= (pts[i].0 - pts[l].0).powi(2);
            }
        }
        total += v;
        let mut j = 0;
        while j < k {
            idx[j] += 1;
            if idx[j] < nodes {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
        if j == k {
            break;
        }
    }
    total
}

fn selberg_vs_quadrature(max_k: u32) -> Result<(f64, String)> {
    let mut worst = Worst::new();
    for k in 1..=max_k {
        for alpha in [0.5, 1.0, 1.5, 2.5] {
            let beta = 0.5;
            let closed = selberg_integral(SelbergParams::real(k, alpha, beta, 1.0)?)?.to_real();
            // refine until two node counts agree
            let mut nodes = 24;
            let mut prev = selberg_by_quadrature(k as usize, alpha, beta, nodes);
            loop {
                nodes *= 2;
                let next = selberg_by_quadrature(k as usize, alpha, beta, nodes);
                if rel(next, prev) < 1e-9 || nodes >= 384 / k as usize {
                    prev = next;
                    break;
                }
                prev = next;
            }
            worst.record(rel(closed, prev), || {
                format!("K={k} alpha={alpha}: {closed} vs {prev}")
            });
        }
    }
    worst.finish()
}

fn normalization_identity() -> Result<(f64, String)> {
    let mut worst = Worst::new();
    for n in 0..=5u32 {
        for m in 1..=20u32 {
            let spec = EnsembleSpec::new(n, m)?;
            // int over angles = 2^{-M(M-1)-Mn} ... in x: Selberg with alpha = n + 1/2, beta = 1/2
            let sel = selberg_integral(SelbergParams::real(m, n as f64 + 0.5, 0.5, 1.0)?)?;
            let c = normalization_c::<f64>(spec);
            let product = (c.log_modulus() + sel.log_modulus()).exp();
            worst.record((product - 1.0).abs(), || format!("n={n} M={m}"));
        }
    }
    worst.finish()
}

fn barnes_recurrence() -> Result<(f64, String)> {
    let mut worst = Worst::new();
    for k in 1..=80 {
        let z = 0.5 * k as f64;
        let lhs = barnes_g(z + 1.0)?.log_modulus();
        let rhs = ln_gamma(z)? + barnes_g(z)?.log_modulus();
        worst.record((lhs - rhs).abs() / lhs.abs().max(1.0), || format!("z={z}"));
    }
    worst.finish()
}

fn kernel_cd_vs_spectral() -> Result<(f64, String)> {
    let mut worst = Worst::new();
    let angles = [0.03, 0.4, 1.1, 1.7, 2.6, 3.1];
    for n in 0..=3u32 {
        for m in [1u32, 2, 5, 12, 30] {
            let ctx = KernelContext::new(EnsembleSpec::new(n, m)?);
            for &t in &angles {
                for &p in &angles {
                    let a: f64 = kernel(&ctx, t, p)?;
                    let b: f64 = kernel_spectral(&ctx, t, p)?;
                    // relative to the diagonal scale, since off-diagonal values cross zero
                    let scale = kernel_spectral::<f64>(&ctx, t, t)?
                        .abs()
                        .max(kernel_spectral::<f64>(&ctx, p, p)?.abs());
                    worst.record((a - b).abs() / scale, || format!("n={n} M={m} ({t}, {p})"));
                }
            }
        }
    }
    worst.finish()
}

fn scaled_kernel_convergence() -> Result<(f64, String)> {
    let mut worst = Worst::new();
    for n in [1u32, 2] {
        let ctx = KernelContext::new(EnsembleSpec::new(n, 2000)?);
        for &(t, p) in &[(0.7, 1.3), (0.4, 0.4), (2.2, 0.9)] {
            let finite: f64 = finite_scaled_kernel(&ctx, t, p)?;
            let limit: f64 = scaled_kernel(n, t, p)?;
            worst.record((finite - limit).abs(), || format!("n={n} ({t}, {p})"));
        }
    }
    worst.finish()
}

fn mellin_mass(grid: &[(u32, u32)]) -> Result<(f64, String)> {
    let mut worst = Worst::new();
    for &(n, m) in grid {
        let mass = total_mass(EnsembleSpec::new(n, m)?)?;
        worst.record((mass - 1.0).abs(), || format!("n={n} M={m}: {mass}"));
    }
    worst.finish()
}

fn mellin_moment(grid: &[(u32, u32)], moment: &MomentFn) -> Result<(f64, String)> {
    let mut worst = Worst::new();
    for &(n, m) in grid {
        let spec = EnsembleSpec::new(n, m)?;
        let got = density_moment(spec, 1)?;
        let want = moment(spec, 1.0)?;
        worst.record(rel(got, want), || format!("n={n} M={m}: {got} vs {want}"));
    }
    worst.finish()
}

fn monte_carlo_moments(
    grid: &[(u32, u32, f64)],
    moment: &MomentFn,
    seed: u64,
    samples: usize,
) -> Result<(f64, String)> {
    let mut worst = Worst::new();
    for &(n, m, s) in grid {
        let spec = EnsembleSpec::new(n, m)?;
        let chains = 4;
        let sampler = SamplerConfig {
            seed,
            chains,
            ..SamplerConfig::for_spec(&spec)
        };
        let est = estimate_moment(&spec, &sampler, s, samples.div_ceil(chains))?;
        let want = moment(spec, s)?;
        let z = (est.mean - want).abs() / est.stderr;
        worst.record(z, || {
            format!(
                "n={n} M={m} s={s}: {} +- {} vs {want}",
                est.mean, est.stderr
            )
        });
    }
    worst.finish()
}
