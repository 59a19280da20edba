//! `socdist`: moments, value distributions, level densities and samples for
//! characteristic polynomials of conditioned orthogonal matrices.
//!
//! Exit codes: 0 success, 1 invalid input or precondition violation,
//! 2 verification failure.

// Preconditions are written `!(x > bound)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Parser;

use commands::Outcome;
use config::{Command, Format, Settings};

#[derive(Debug, Parser)]
#[command(name = "socdist", version, about)]
struct Cli {
    /// What to compute; may instead come from the config file.
    #[arg(value_enum)]
    command: Option<Command>,
    #[command(flatten)]
    settings: Settings,
    /// `key = value` config file; command-line flags win on conflict.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Print the merged configuration in config-file form and exit.
    #[arg(long)]
    dump_config: bool,
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("SOC_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .with_context(|| format!("SOC_THREADS must be a positive integer, got `{raw}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()?;
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    configure_threads()?;
    let (file_command, file_settings) = match &cli.config {
        Some(path) => config::read_config(path)?,
        None => (None, Settings::default()),
    };
    let command = match (cli.command, file_command) {
        (Some(c), _) | (None, Some(c)) => c,
        (None, None) => bail!("no command given (moment, dist, tail, density, sample or verify)"),
    };
    let settings = cli.settings.or(file_settings);
    if cli.dump_config {
        print!("{}", settings.dump(command));
        return Ok(ExitCode::SUCCESS);
    }
    let outcome = match command {
        Command::Moment => commands::cmd_moment(&settings)?,
        Command::Dist => commands::cmd_dist(&settings)?,
        Command::Tail => commands::cmd_tail(&settings)?,
        Command::Density => commands::cmd_density(&settings)?,
        Command::Sample => commands::cmd_sample(&settings)?,
        Command::Verify => commands::cmd_verify(&settings)?,
    };
    let (table, passed) = match outcome {
        Outcome::Table(t) => (t, true),
        Outcome::Verified(t, ok) => (t, ok),
    };
    let format = settings.format.unwrap_or(Format::Csv);
    match &settings.output {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("creating {path}"))?;
            let mut w = BufWriter::new(file);
            table.write(format, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            table.write(format, &mut w)?;
        }
    }
    if !passed {
        eprintln!("socdist: verification failed");
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("socdist: {e:#}");
            ExitCode::from(1)
        }
    }
}
