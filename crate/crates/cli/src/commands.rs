//! The six commands. Each turns resolved settings into a [`Table`].

use anyhow::{anyhow, bail, Result};
use num_complex::Complex;
use rayon::prelude::*;

use socdist::ensemble::{sample, Model, SamplerConfig};
use socdist::level_density::scaled_one_level;
use socdist::moments::{moment_asymptotic, moment_exact};
use socdist::value_dist::{
    cdf_at, density_points, small_x_coefficient, tail_probability, ContourChoice,
};
use socdist::verify::{self, VerifyOptions};
use socdist::EnsembleSpec;

use crate::config::{ModelArg, Settings};
use crate::output::{Cell, Table};

/// `(n, M)` pairs of the default distribution figure; illustrative choices.
pub const DEFAULT_PANELS: [(u32, u32); 4] = [(1, 6), (2, 6), (3, 6), (4, 6)];
/// Panels that also get a log-spaced zoom onto the origin.
pub const ZOOM_PANELS: [(u32, u32); 2] = [(1, 6), (2, 6)];
/// Upper bound on the probability mass cut off above the default `x_max`.
const DEFAULT_TAIL_MASS: f64 = 1e-9;

pub enum Outcome {
    Table(Table),
    /// The verify suite ran; `false` if any check failed.
    Verified(Table, bool),
}

fn spec_from(settings: &Settings) -> Result<EnsembleSpec> {
    match (settings.n, settings.m) {
        (Some(n), Some(m)) => Ok(EnsembleSpec::new(n, m)?),
        _ => bail!("this command needs both --n and --M"),
    }
}

fn moment_real(spec: EnsembleSpec, s: f64) -> Result<f64> {
    Ok(moment_exact(spec, Complex::new(s, 0.0))?.to_real())
}

pub fn cmd_moment(settings: &Settings) -> Result<Outcome> {
    let spec = spec_from(settings)?;
    let s_values = settings.s.clone().unwrap_or_else(|| vec![1.0]);
    if s_values.is_empty() {
        bail!("--s needs at least one value");
    }
    let mut table = Table::new(&["n", "M", "s", "exact", "asymptotic", "ratio"]);
    for &s in &s_values {
        let exact = moment_real(spec, s)?;
        let asymptotic = moment_asymptotic(spec, s).ok().map(|v| v.to_real());
        table.push(vec![
            spec.n().into(),
            spec.m().into(),
            s.into(),
            exact.into(),
            asymptotic.into(),
            asymptotic.map(|a| exact / a).into(),
        ]);
    }
    Ok(Outcome::Table(table))
}

/// Abscissa above which at most `DEFAULT_TAIL_MASS` of the distribution lies,
/// from the best Markov bound `P(|Lambda| > t) <= M(k) / t^k`, capped at the
/// top of the support.
pub fn default_x_max(spec: EnsembleSpec) -> Result<f64> {
    let top = spec.ln_support_max::<f64>().exp();
    let mut best = top;
    for k in 1..=12 {
        let k = k as f64;
        let ln_mk = moment_exact(spec, Complex::new(k, 0.0))?.log_modulus();
        best = best.min(((ln_mk - DEFAULT_TAIL_MASS.ln()) / k).exp());
    }
    Ok(best)
}

fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    let mut g: Vec<f64> = (0..points)
        .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp())
        .collect();
    // pin the ends exactly; exp(ln x) need not round-trip
    g[0] = lo;
    g[points - 1] = hi;
    g
}

fn linear_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![lo];
    }
    (0..points)
        .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
        .collect()
}

/// The x grid of one panel. Without an explicit `x_log` a log-spaced grid
/// (which shows the small-x power law) is merged with a linear one.
pub fn x_grid(settings: &Settings, spec: EnsembleSpec) -> Result<Vec<f64>> {
    let x_max = match settings.x_max {
        Some(v) => v,
        None => default_x_max(spec)?,
    };
    let points = settings.x_points.unwrap_or(400);
    if points < 2 {
        bail!("--x-points must be at least 2");
    }
    let grid = match settings.x_log {
        Some(true) => log_grid(settings.x_min.unwrap_or(x_max * 1e-6), x_max, points),
        Some(false) => linear_grid(
            settings.x_min.unwrap_or(x_max / points as f64),
            x_max,
            points,
        ),
        None => {
            // the distribution is strongly skewed to the right: a dense log
            // grid resolves the bulk, the linear grid the far tail
            let mut g = log_grid(settings.x_min.unwrap_or(x_max * 1e-6), x_max, 8 * points);
            g.extend(linear_grid(x_max / points as f64, x_max, points));
            g.sort_by(f64::total_cmp);
            g.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
            g
        }
    };
    check_grid(&grid, "x")?;
    Ok(grid)
}

fn check_grid(grid: &[f64], name: &str) -> Result<()> {
    if grid.is_empty() {
        bail!("the {name} grid is empty");
    }
    if grid.iter().any(|x| !(*x > 0.0) || !x.is_finite()) {
        bail!("the {name} grid must hold finite positive values");
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        bail!("the {name} grid must be strictly increasing (check the min/max settings)");
    }
    Ok(())
}

fn contour_choice(settings: &Settings) -> ContourChoice<f64> {
    settings
        .contour_c
        .map_or(ContourChoice::Auto, ContourChoice::Abscissa)
}

pub fn cmd_dist(settings: &Settings) -> Result<Outcome> {
    let mut panels: Vec<(String, EnsembleSpec, Vec<f64>)> = Vec::new();
    if settings.n.is_some() || settings.m.is_some() {
        let spec = spec_from(settings)?;
        panels.push((
            format!("n{}M{}", spec.n(), spec.m()),
            spec,
            x_grid(settings, spec)?,
        ));
    } else {
        for (n, m) in DEFAULT_PANELS {
            let spec = EnsembleSpec::new(n, m)?;
            panels.push((format!("n{n}M{m}"), spec, x_grid(settings, spec)?));
        }
        for (n, m) in ZOOM_PANELS {
            let spec = EnsembleSpec::new(n, m)?;
            let x_max = default_x_max(spec)?;
            panels.push((
                format!("n{n}M{m}-zoom"),
                spec,
                log_grid(x_max * 1e-8, x_max * 0.02, 200),
            ));
        }
    }
    let choice = contour_choice(settings);
    let mut table = Table::new(&[
        "panel",
        "n",
        "M",
        "x",
        "density",
        "contour_c",
        "contour_t_max",
        "contour_steps",
        "tail_ratio",
        "converged",
    ]);
    for (name, spec, grid) in panels {
        let evals = density_points(spec, &grid, choice)?;
        for e in evals {
            table.push(vec![
                name.as_str().into(),
                spec.n().into(),
                spec.m().into(),
                e.x.into(),
                e.value.into(),
                e.contour.c.into(),
                e.contour.t_max.into(),
                e.contour.steps.into(),
                e.tail_ratio.into(),
                e.converged.into(),
            ]);
        }
    }
    Ok(Outcome::Table(table))
}

pub fn cmd_tail(settings: &Settings) -> Result<Outcome> {
    let spec = spec_from(settings)?;
    let mean = moment_real(spec, 1.0)?;
    let points = settings.x_points.unwrap_or(20);
    let lo = settings.x_min.unwrap_or(mean * 1e-6);
    let hi = settings.x_max.unwrap_or(mean * 0.1);
    let grid = match settings.x_log {
        Some(false) => linear_grid(lo, hi, points),
        _ => log_grid(lo, hi, points),
    };
    check_grid(&grid, "X")?;
    let f = small_x_coefficient::<f64>(spec)?;
    let rows: Vec<Vec<Cell>> = grid
        .par_iter()
        .map(|&x| -> Result<Vec<Cell>> {
            let tail = tail_probability(spec, x)?;
            let numeric = cdf_at(spec, x)?;
            Ok(vec![
                spec.n().into(),
                spec.m().into(),
                x.into(),
                tail.probability.into(),
                numeric.into(),
                tail.within_validity.into(),
                f.into(),
            ])
        })
        .collect::<Result<_>>()?;
    let mut table = Table::new(&[
        "n",
        "M",
        "X",
        "tail_probability",
        "cdf_numeric",
        "within_validity",
        "f",
    ]);
    rows.into_iter().for_each(|r| table.push(r));
    Ok(Outcome::Table(table))
}

pub fn cmd_density(settings: &Settings) -> Result<Outcome> {
    let theta_max = settings.theta_max.unwrap_or(3.0);
    let points = settings.theta_points.unwrap_or(300);
    if !(theta_max > 0.0) || points == 0 {
        bail!("--theta-max must be positive and --theta-points at least 1");
    }
    let orders: Vec<u32> = match settings.n {
        Some(0) => bail!("scaled one-level densities need n >= 1"),
        Some(n) => vec![n],
        None => (1..=5).collect(),
    };
    let mut columns = vec!["theta".to_string()];
    columns.extend(orders.iter().map(|n| format!("n{n}")));
    let mut table = Table::new(&columns);
    // the grid starts one step away from the origin, where the density is 0
    for k in 1..=points {
        let theta = theta_max * k as f64 / points as f64;
        let mut row: Vec<Cell> = vec![theta.into()];
        for &n in &orders {
            row.push(scaled_one_level(n, theta)?.into());
        }
        table.push(row);
    }
    Ok(Outcome::Table(table))
}

pub fn sampler_from(settings: &Settings, spec: &EnsembleSpec) -> Result<SamplerConfig> {
    let base = SamplerConfig::for_spec(spec);
    let sampler = SamplerConfig {
        seed: settings.seed.unwrap_or(base.seed),
        burn_in: settings.burn_in.unwrap_or(base.burn_in),
        thinning: settings.thinning.unwrap_or(base.thinning),
        step_scale: settings.step_scale.unwrap_or(base.step_scale),
        chains: settings.chains.unwrap_or(base.chains),
        model: match settings.model {
            Some(ModelArg::Independent) => Model::Independent,
            _ => Model::Interaction,
        },
    };
    sampler.validate()?;
    Ok(sampler)
}

pub fn cmd_sample(settings: &Settings) -> Result<Outcome> {
    let spec = spec_from(settings)?;
    if spec.m() == 0 {
        bail!("nothing to sample with M = 0");
    }
    let sampler = sampler_from(settings, &spec)?;
    let total = settings.samples.unwrap_or(1000);
    if total == 0 {
        bail!("--samples must be positive");
    }
    let run = sample(&spec, &sampler, total.div_ceil(sampler.chains))?;
    let columns: Vec<String> = (1..=spec.m()).map(|j| format!("theta_{j}")).collect();
    let mut table = Table::new(&columns);
    for config in run.configs.iter().take(total) {
        table.push(config.angles().iter().map(|&a| a.into()).collect());
    }
    Ok(Outcome::Table(table))
}

pub fn cmd_verify(settings: &Settings) -> Result<Outcome> {
    let defaults = VerifyOptions::default();
    let options = VerifyOptions {
        quick: settings.quick.unwrap_or(false),
        seed: settings.seed.unwrap_or(defaults.seed),
        samples: settings.samples.unwrap_or(defaults.samples),
    };
    if options.samples < 100 {
        return Err(anyhow!(
            "--samples must be at least 100 for the Monte Carlo checks"
        ));
    }
    let report = verify::run(&options);
    let mut table = Table::new(&["check", "tolerance", "error", "passed", "seconds", "detail"]);
    for c in &report.checks {
        log::info!(
            "{} {}: error {:e} (tolerance {:e})",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.error,
            c.tolerance
        );
        table.push(vec![
            c.name.as_str().into(),
            c.tolerance.into(),
            c.error.into(),
            c.passed.into(),
            c.seconds.into(),
            c.detail.as_str().into(),
        ]);
    }
    Ok(Outcome::Verified(table, report.all_passed()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixed_grid_is_increasing() {
        let spec = EnsembleSpec::new(2, 6).unwrap();
        let g = x_grid(&Settings::default(), spec).unwrap();
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        assert!(g.len() > 2000);
    }

    #[test]
    fn default_x_max_is_inside_support() {
        let spec = EnsembleSpec::new(0, 1).unwrap();
        assert!(default_x_max(spec).unwrap() <= 4.0);
    }
}
