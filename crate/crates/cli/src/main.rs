//! `urcc` command-line front end.
//!
//! Exit codes: 0 success, 2 configuration or input error, 3 numerical
//! failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use urcc::bench::{self, ExperimentConfig};
use urcc::Error;

#[derive(Debug, Parser)]
#[command(
    name = "urcc",
    version,
    about = "Randomized compilation experiments for time-dependent Hamiltonians"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed; overrides the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads. Results do not depend on this.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    /// Output path; CSV goes to stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Both compilers on the driven spin chain.
    Spin,
    /// Energy estimation along an adiabatic schedule.
    Adiabatic,
    /// Sample one circuit pair and count gates, without simulating.
    Compile,
    /// Unbiased estimate only, no reference oracle.
    Estimate,
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, Error> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::from_json(&std::fs::read_to_string(path)?)?,
        None => ExperimentConfig::default(),
    };
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }
    Ok(cfg)
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => Ok(std::fs::write(path, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn run(cli: &Cli) -> Result<(), Error> {
    let cfg = load_config(cli)?;
    let out = cli.out.as_deref();
    match cli.command {
        Command::Spin => write_or_print(out, &bench::run_spin_experiment(&cfg, cli.workers)?),
        Command::Adiabatic => {
            write_or_print(out, &bench::run_adiabatic_experiment(&cfg, cli.workers)?)
        }
        Command::Estimate => write_or_print(out, &bench::run_estimate(&cfg, cli.workers)?),
        Command::Compile => {
            let out = out.ok_or_else(|| Error::InvalidArgument("compile needs --out".into()))?;
            let art = bench::run_compile_only(&cfg)?;
            std::fs::write(out, &art.pair_dump)?;
            std::fs::write(with_suffix(out, ".circuit"), &art.circuit_dump)?;
            if let Some(q) = &art.qdrift_dump {
                std::fs::write(with_suffix(out, ".qdrift"), q)?;
            }
            std::fs::write(with_suffix(out, ".resources.csv"), &art.resources_csv)?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 3 } else { 2 })
        }
    }
}
