//! Metropolis sampling of the eigenangles of the conditioned ensemble.
//!
//! Two target measures on `[0, pi]^M`:
//!
//! * `Interaction`: `prod (1 - cos theta_j)^n prod_{j<k} (cos theta_j - cos theta_k)^2`,
//!   the limit of Haar measure as `n` eigenvalues merge at 1;
//! * `Independent`: the forced eigenvalues form an identity block and the rest
//!   is Haar on `SO(2M)`, i.e. the same weight with `n = 0`.
//!
//! Each chain owns a ChaCha8 generator seeded with `seed` and switched to
//! stream number `chain index`, so every chain is reproducible on its own and
//! chains can run on any number of threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::moments::{ln_factorial, EnsembleSpec};
use crate::stats::batch_means;
use crate::value_dist::DensityGrid;

/// Which eigenangle measure to sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model {
    Interaction,
    Independent,
}

/// `M` free eigenangles in `[0, pi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenConfig {
    angles: Vec<f64>,
}

impl EigenConfig {
    pub fn new(spec: &EnsembleSpec, angles: Vec<f64>) -> Result<Self> {
        if angles.len() != spec.m() as usize {
            return Err(Error::InvalidParameter(format!(
                "expected {} angles, got {}",
                spec.m(),
                angles.len()
            )));
        }
        if let Some(bad) = angles
            .iter()
            .find(|a| !(**a >= 0.0 && **a <= std::f64::consts::PI))
        {
            return Err(Error::Domain {
                function: "EigenConfig",
                value: *bad,
            });
        }
        Ok(Self { angles })
    }

    /// The lattice `theta_j = pi (j - 1/2) / M`, the chains' starting point.
    pub fn lattice(spec: &EnsembleSpec) -> Self {
        let m = spec.m() as usize;
        let angles = (0..m)
            .map(|j| std::f64::consts::PI * (j as f64 + 0.5) / m as f64)
            .collect();
        Self { angles }
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }
}

/// Metropolis sampler settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerConfig {
    pub seed: u64,
    pub burn_in: usize,
    pub thinning: usize,
    pub step_scale: f64,
    pub chains: usize,
    pub model: Model,
}

impl SamplerConfig {
    /// Defaults: step `pi / (2M)`, burn-in `10^4 M`, thinning 10, one chain.
    pub fn for_spec(spec: &EnsembleSpec) -> Self {
        let m = spec.m().max(1) as usize;
        Self {
            seed: 0x5eed,
            burn_in: 10_000 * m,
            thinning: 10,
            step_scale: std::f64::consts::PI / (2.0 * m as f64),
            chains: 1,
            model: Model::Interaction,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.thinning == 0 {
            return Err(Error::InvalidParameter(
                "thinning must be at least 1".into(),
            ));
        }
        if self.chains == 0 {
            return Err(Error::InvalidParameter("need at least one chain".into()));
        }
        if !(self.step_scale > 0.0 && self.step_scale < std::f64::consts::PI) {
            return Err(Error::InvalidParameter(format!(
                "step_scale {} outside (0, pi)",
                self.step_scale
            )));
        }
        Ok(())
    }
}

/// Unnormalized log density of a configuration; `-inf` where it vanishes.
pub fn log_density(spec: &EnsembleSpec, config: &EigenConfig, model: Model) -> f64 {
    log_density_of(spec.n(), config.angles(), model)
}

fn log_density_of(n: u32, angles: &[f64], model: Model) -> f64 {
    let cos: Vec<f64> = angles.iter().map(|a| a.cos()).collect();
    let mut acc = 0.0;
    if model == Model::Interaction && n > 0 {
        for &c in &cos {
            acc += (1.0 - c).ln();
        }
        acc *= n as f64;
    }
    let mut vandermonde = 0.0;
    for j in 0..cos.len() {
        for k in j + 1..cos.len() {
            vandermonde += (cos[j] - cos[k]).abs().ln();
        }
    }
    let v = acc + 2.0 * vandermonde;
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

/// `|Lambda^{(n)}(1)| = n! 2^M prod (1 - cos theta_j)`.
pub fn derivative_value(spec: &EnsembleSpec, config: &EigenConfig) -> f64 {
    let mut ln = ln_factorial::<f64>(spec.n()) + spec.m() as f64 * std::f64::consts::LN_2;
    for &a in config.angles() {
        let d = 1.0 - a.cos();
        if d <= 0.0 {
            return 0.0;
        }
        ln += d.ln();
    }
    ln.exp()
}

fn reflect(theta: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut y = theta.rem_euclid(two_pi);
    if y > std::f64::consts::PI {
        y = two_pi - y;
    }
    y
}

/// One Metropolis chain, yielding a configuration every `thinning` steps
/// after burn-in.
pub struct Chain {
    n: u32,
    model: Model,
    step_scale: f64,
    thinning: usize,
    angles: Vec<f64>,
    proposal: Vec<f64>,
    current: f64,
    rng: ChaCha8Rng,
    proposed: u64,
    accepted: u64,
}

impl Chain {
    pub fn new(spec: &EnsembleSpec, sampler: &SamplerConfig, chain_index: u64) -> Result<Self> {
        sampler.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(sampler.seed);
        rng.set_stream(chain_index);
        let start = EigenConfig::lattice(spec);
        let current = log_density_of(spec.n(), start.angles(), sampler.model);
        let m = start.angles.len();
        let mut chain = Self {
            n: spec.n(),
            model: sampler.model,
            step_scale: sampler.step_scale,
            thinning: sampler.thinning,
            angles: start.angles,
            proposal: vec![0.0; m],
            current,
            rng,
            proposed: 0,
            accepted: 0,
        };
        for _ in 0..sampler.burn_in {
            chain.step();
        }
        chain.proposed = 0;
        chain.accepted = 0;
        Ok(chain)
    }

    fn step(&mut self) {
        if self.angles.is_empty() {
            return;
        }
        for (p, &a) in self.proposal.iter_mut().zip(&self.angles) {
            let xi: f64 = self.rng.sample(StandardNormal);
            *p = reflect(a + self.step_scale * xi);
        }
        let candidate = log_density_of(self.n, &self.proposal, self.model);
        self.proposed += 1;
        let u: f64 = self.rng.random();
        if candidate > f64::NEG_INFINITY && u.ln() < candidate - self.current {
            std::mem::swap(&mut self.angles, &mut self.proposal);
            self.current = candidate;
            self.accepted += 1;
        }
    }

    /// Fraction of accepted proposals since burn-in.
    pub fn acceptance_rate(&self) -> f64 {
        if self.proposed == 0 {
            return f64::NAN;
        }
        self.accepted as f64 / self.proposed as f64
    }
}

impl Iterator for Chain {
    type Item = EigenConfig;

    fn next(&mut self) -> Option<EigenConfig> {
        for _ in 0..self.thinning {
            self.step();
        }
        Some(EigenConfig {
            angles: self.angles.clone(),
        })
    }
}

/// Sampler diagnostics that do not stop the run.
#[derive(Debug, Clone, PartialEq)]
pub enum SamplerWarning {
    /// Acceptance rate outside `[0.1, 0.7]`.
    PoorMixing { chain: usize, acceptance_rate: f64 },
}

/// Output of [`sample`]: configurations merged in chain-index order.
#[derive(Debug, Clone)]
pub struct SampleRun {
    pub configs: Vec<EigenConfig>,
    pub per_chain: usize,
    pub acceptance_rates: Vec<f64>,
    pub warnings: Vec<SamplerWarning>,
}

impl SampleRun {
    /// Configurations drawn by one chain.
    pub fn chain(&self, index: usize) -> &[EigenConfig] {
        &self.configs[index * self.per_chain..(index + 1) * self.per_chain]
    }
}

/// Runs `sampler.chains` independent chains, `count` configurations each.
pub fn sample(spec: &EnsembleSpec, sampler: &SamplerConfig, count: usize) -> Result<SampleRun> {
    sampler.validate()?;
    if count == 0 {
        return Err(Error::InvalidParameter(
            "sample count must be positive".into(),
        ));
    }
    let runs: Vec<(Vec<EigenConfig>, f64)> = (0..sampler.chains)
        .into_par_iter()
        .map(|c| {
            let mut chain = Chain::new(spec, sampler, c as u64)?;
            let configs: Vec<EigenConfig> = chain.by_ref().take(count).collect();
            Ok((configs, chain.acceptance_rate()))
        })
        .collect::<Result<_>>()?;
    let mut configs = Vec::with_capacity(count * sampler.chains);
    let mut acceptance_rates = Vec::with_capacity(sampler.chains);
    let mut warnings = Vec::new();
    for (c, (chunk, rate)) in runs.into_iter().enumerate() {
        if spec.m() > 0 && !(0.1..=0.7).contains(&rate) {
            log::warn!("chain {c}: acceptance rate {rate:.3} outside [0.1, 0.7]");
            warnings.push(SamplerWarning::PoorMixing {
                chain: c,
                acceptance_rate: rate,
            });
        }
        configs.extend(chunk);
        acceptance_rates.push(rate);
    }
    Ok(SampleRun {
        configs,
        per_chain: count,
        acceptance_rates,
        warnings,
    })
}

/// Monte Carlo estimate of a moment, with its batch-means standard error.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub warnings: Vec<SamplerWarning>,
}

const BATCHES_PER_CHAIN: usize = 20;

/// Estimates `<|Lambda^{(n)}(1)|^s>` under the Interaction model.
pub fn estimate_moment(
    spec: &EnsembleSpec,
    sampler: &SamplerConfig,
    s: f64,
    count: usize,
) -> Result<MomentEstimate> {
    if !(s > -(spec.n() as f64 + 0.5)) {
        return Err(Error::Domain {
            function: "estimate_moment",
            value: s,
        });
    }
    if s == 0.0 {
        return Ok(MomentEstimate {
            mean: 1.0,
            stderr: 0.0,
            warnings: Vec::new(),
        });
    }
    let sampler = SamplerConfig {
        model: Model::Interaction,
        ..*sampler
    };
    let run = sample(spec, &sampler, count)?;
    Ok(moment_from_run(spec, &run, s))
}

/// Moment estimate from an existing run; batches never straddle chains.
pub fn moment_from_run(spec: &EnsembleSpec, run: &SampleRun, s: f64) -> MomentEstimate {
    let chains = run.acceptance_rates.len();
    let mut batch_avgs = Vec::new();
    let mut total = 0.0;
    for c in 0..chains {
        let values: Vec<f64> = run
            .chain(c)
            .iter()
            .map(|cfg| derivative_value(spec, cfg).powf(s))
            .collect();
        total += values.iter().sum::<f64>();
        let size = (values.len() / BATCHES_PER_CHAIN).max(1);
        for b in values.chunks_exact(size) {
            batch_avgs.push(b.iter().sum::<f64>() / size as f64);
        }
    }
    let mean = total / (chains * run.per_chain) as f64;
    let (_, stderr) = batch_means(&batch_avgs, batch_avgs.len());
    MomentEstimate {
        mean,
        stderr,
        warnings: run.warnings.clone(),
    }
}

/// Empirical CDF of `|Lambda^{(n)}(1)|` from a sampler run.
pub fn empirical_cdf(
    spec: &EnsembleSpec,
    sampler: &SamplerConfig,
    count: usize,
) -> Result<DensityGrid<f64>> {
    let run = sample(spec, sampler, count)?;
    let mut values: Vec<f64> = run
        .configs
        .iter()
        .map(|c| derivative_value(spec, c))
        .collect();
    values.sort_by(|a, b| a.total_cmp(b));
    let total = values.len() as f64;
    let mut xs: Vec<f64> = Vec::with_capacity(values.len());
    let mut ys: Vec<f64> = Vec::with_capacity(values.len());
    for (i, v) in values.into_iter().enumerate() {
        let f = (i + 1) as f64 / total;
        if xs.last() == Some(&v) {
            *ys.last_mut().expect("nonempty") = f;
        } else {
            xs.push(v);
            ys.push(f);
        }
    }
    DensityGrid::new(xs, ys)
}
