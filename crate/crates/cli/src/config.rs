//! Run settings: command-line flags merged over an optional `key = value`
//! config file, with flags winning on conflict.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, ValueEnum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Exact and asymptotic moments.
    Moment,
    /// Value distribution P(n, M, x) by inverse Mellin transform.
    Dist,
    /// Small-X tail probability.
    Tail,
    /// Scaled one-level densities.
    Density,
    /// Metropolis samples of the eigenangles.
    Sample,
    /// Cross-validation suite.
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Interaction,
    Independent,
}

/// Every tunable; `None` means "not given here".
#[derive(Debug, Clone, Default, PartialEq, Args)]
pub struct Settings {
    /// Number of eigenvalues forced to 1.
    #[arg(long)]
    pub n: Option<u32>,
    /// Number of free eigenangle pairs.
    #[arg(long = "M", id = "M")]
    pub m: Option<u32>,
    /// Moment exponents, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub s: Option<Vec<f64>>,
    /// Smallest abscissa of the x grid.
    #[arg(long)]
    pub x_min: Option<f64>,
    /// Largest abscissa of the x grid.
    #[arg(long)]
    pub x_max: Option<f64>,
    /// Number of points on the x grid.
    #[arg(long)]
    pub x_points: Option<usize>,
    /// Log-spaced (true) or linear (false) x grid; unset mixes both.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub x_log: Option<bool>,
    /// Upper end of the scaled-angle grid.
    #[arg(long)]
    pub theta_max: Option<f64>,
    /// Number of points on the scaled-angle grid.
    #[arg(long)]
    pub theta_points: Option<usize>,
    /// Sampler seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Monte Carlo samples.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Abscissa of the inverse Mellin contour (saddle point if unset).
    #[arg(long, allow_negative_numbers = true)]
    pub contour_c: Option<f64>,
    /// Output format.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file (standard output if unset).
    #[arg(long)]
    pub output: Option<String>,
    /// Run the sub-minute verification subset.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub quick: Option<bool>,
    /// Sampler burn-in steps.
    #[arg(long)]
    pub burn_in: Option<usize>,
    /// Keep every k-th sampler state.
    #[arg(long)]
    pub thinning: Option<usize>,
    /// Width of the Gaussian proposals.
    #[arg(long)]
    pub step_scale: Option<f64>,
    /// Number of independent chains.
    #[arg(long)]
    pub chains: Option<usize>,
    /// Ensemble to sample.
    #[arg(long, value_enum)]
    pub model: Option<ModelArg>,
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| anyhow!("config key `{key}`: cannot parse `{value}`: {e}"))
}

fn parse_enum<T: ValueEnum>(key: &str, value: &str) -> Result<T> {
    T::from_str(value, true).map_err(|e| anyhow!("config key `{key}`: {e}"))
}

fn enum_name<T: ValueEnum>(v: &T) -> String {
    v.to_possible_value()
        .map(|p| p.get_name().to_string())
        .unwrap_or_default()
}

impl Settings {
    /// Fills every unset field from `other`.
    pub fn or(self, other: Settings) -> Settings {
        Settings {
            n: self.n.or(other.n),
            m: self.m.or(other.m),
            s: self.s.or(other.s),
            x_min: self.x_min.or(other.x_min),
            x_max: self.x_max.or(other.x_max),
            x_points: self.x_points.or(other.x_points),
            x_log: self.x_log.or(other.x_log),
            theta_max: self.theta_max.or(other.theta_max),
            theta_points: self.theta_points.or(other.theta_points),
            seed: self.seed.or(other.seed),
            samples: self.samples.or(other.samples),
            contour_c: self.contour_c.or(other.contour_c),
            format: self.format.or(other.format),
            output: self.output.or(other.output),
            quick: self.quick.or(other.quick),
            burn_in: self.burn_in.or(other.burn_in),
            thinning: self.thinning.or(other.thinning),
            step_scale: self.step_scale.or(other.step_scale),
            chains: self.chains.or(other.chains),
            model: self.model.or(other.model),
        }
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "n" => self.n = Some(parse(key, value)?),
            "M" => self.m = Some(parse(key, value)?),
            "s" => {
                self.s = Some(
                    value
                        .split(',')
                        .map(|v| parse(key, v.trim()))
                        .collect::<Result<Vec<f64>>>()?,
                )
            }
            "x_min" => self.x_min = Some(parse(key, value)?),
            "x_max" => self.x_max = Some(parse(key, value)?),
            "x_points" => self.x_points = Some(parse(key, value)?),
            "x_log" => self.x_log = Some(parse(key, value)?),
            "theta_max" => self.theta_max = Some(parse(key, value)?),
            "theta_points" => self.theta_points = Some(parse(key, value)?),
            "seed" => self.seed = Some(parse(key, value)?),
            "samples" => self.samples = Some(parse(key, value)?),
            "contour_c" => self.contour_c = Some(parse(key, value)?),
            "format" => self.format = Some(parse_enum(key, value)?),
            "output" => self.output = Some(value.to_string()),
            "quick" => self.quick = Some(parse(key, value)?),
            "burn_in" => self.burn_in = Some(parse(key, value)?),
            "thinning" => self.thinning = Some(parse(key, value)?),
            "step_scale" => self.step_scale = Some(parse(key, value)?),
            "chains" => self.chains = Some(parse(key, value)?),
            "model" => self.model = Some(parse_enum(key, value)?),
            _ => bail!("unknown config key `{key}`"),
        }
        Ok(())
    }

    /// Serializes the settings that are set, one `key = value` per line,
    /// in a form [`parse_config`] reads back exactly.
    pub fn dump(&self, command: Command) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        line("command", enum_name(&command));
        let f = |x: f64| format!("{x:?}");
        if let Some(v) = self.n {
            line("n", v.to_string());
        }
        if let Some(v) = self.m {
            line("M", v.to_string());
        }
        if let Some(v) = &self.s {
            line("s", v.iter().map(|x| f(*x)).collect::<Vec<_>>().join(","));
        }
        if let Some(v) = self.x_min {
            line("x_min", f(v));
        }
        if let Some(v) = self.x_max {
            line("x_max", f(v));
        }
        if let Some(v) = self.x_points {
            line("x_points", v.to_string());
        }
        if let Some(v) = self.x_log {
            line("x_log", v.to_string());
        }
        if let Some(v) = self.theta_max {
            line("theta_max", f(v));
        }
        if let Some(v) = self.theta_points {
            line("theta_points", v.to_string());
        }
        if let Some(v) = self.seed {
            line("seed", v.to_string());
        }
        if let Some(v) = self.samples {
            line("samples", v.to_string());
        }
        if let Some(v) = self.contour_c {
            line("contour_c", f(v));
        }
        if let Some(v) = &self.format {
            line("format", enum_name(v));
        }
        if let Some(v) = &self.output {
            line("output", v.clone());
        }
        if let Some(v) = self.quick {
            line("quick", v.to_string());
        }
        if let Some(v) = self.burn_in {
            line("burn_in", v.to_string());
        }
        if let Some(v) = self.thinning {
            line("thinning", v.to_string());
        }
        if let Some(v) = self.step_scale {
            line("step_scale", f(v));
        }
        if let Some(v) = self.chains {
            line("chains", v.to_string());
        }
        if let Some(v) = &self.model {
            line("model", enum_name(v));
        }
        out
    }
}

/// Parses a `key = value` config file; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<(Option<Command>, Settings)> {
    let mut settings = Settings::default();
    let mut command = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("config line {}: expected `key = value`, got `{raw}`", i + 1))?;
        let (key, value) = (key.trim(), value.trim());
        if key == "command" {
            command = Some(parse_enum(key, value)?);
        } else {
            settings
                .set(key, value)
                .with_context(|| format!("config line {}", i + 1))?;
        }
    }
    Ok((command, settings))
}

pub fn read_config(path: &Path) -> Result<(Option<Command>, Settings)> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config file {}", path.display()))?;
    parse_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dump_round_trips() {
        let s = Settings {
            n: Some(2),
            m: Some(6),
            s: Some(vec![0.1, 2.0, -0.25]),
            x_log: Some(false),
            contour_c: Some(0.30000000000000004),
            format: Some(Format::Json),
            model: Some(ModelArg::Independent),
            ..Default::default()
        };
        let text = s.dump(Command::Dist);
        let (cmd, back) = parse_config(&text).unwrap();
        assert_eq!(cmd, Some(Command::Dist));
        assert_eq!(back, s);
    }

    #[test]
    fn flags_win_over_file() {
        let flags = Settings {
            n: Some(1),
            ..Default::default()
        };
        let (_, file) = parse_config("n = 3\nM = 4 # comment\n").unwrap();
        let merged = flags.or(file);
        assert_eq!(merged.n, Some(1));
        assert_eq!(merged.m, Some(4));
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(parse_config("bogus = 1").is_err());
        assert!(parse_config("n 3").is_err());
        assert!(parse_config("n = three").is_err());
    }
}
