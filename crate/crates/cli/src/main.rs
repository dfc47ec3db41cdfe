//! Experiment runner for the simulation laboratory: one subcommand-style
//! kind per pipeline, a flat config file, and CSV/JSON artifacts per run.

mod config;
mod experiment;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use config::ExperimentConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    /// Circuit stage only.
    Vqe,
    /// Circuit stage plus multiplicative network training.
    Vqnhe,
    /// Circuit stage plus phase network training.
    Uvqnhe,
    /// Repeated pipeline over a list of shot counts.
    ShotSweep,
    /// Sampled multiplicative training tuned to exhibit divergence.
    DivergenceDemo,
    /// Closed-form error forecast against Monte-Carlo reruns.
    VarianceAudit,
    /// Exact diagonalization only.
    TfimExact,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Vqe => "vqe",
            Kind::Vqnhe => "vqnhe",
            Kind::Uvqnhe => "uvqnhe",
            Kind::ShotSweep => "shot-sweep",
            Kind::DivergenceDemo => "divergence-demo",
            Kind::VarianceAudit => "variance-audit",
            Kind::TfimExact => "tfim-exact",
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    /// Bad invocation or configuration; exit code 2.
    Usage(String),
    /// Genuine runtime fault; exit code 3.
    Fault(String),
}

impl From<uvqnhe_core::Error> for CliError {
    fn from(e: uvqnhe_core::Error) -> Self {
        CliError::Fault(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "uvqnhe",
    version,
    about = "Ground-state experiments: VQE, multiplicative and phase network stages, \
             shot sweeps, divergence demos, variance audits"
)]
struct Cli {
    /// Experiment pipeline to run.
    #[arg(value_enum)]
    kind: Kind,
    /// Config file of flat `key = value` lines.
    #[arg(long)]
    config: Option<String>,
    /// Master seed, overriding the config file.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory, overriding the config file (default `runs/<kind>`).
    #[arg(long)]
    out: Option<String>,
    /// Extra `key = value` config overrides, repeatable, applied in order.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
        Err(CliError::Fault(message)) => {
            eprintln!("fault: {message}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let mut overrides = cli.overrides.clone();
    if let Some(seed) = cli.seed {
        overrides.push(format!("seed = {seed}"));
    }
    if let Some(out) = &cli.out {
        overrides.push(format!("out = {out:?}"));
    }
    let config = ExperimentConfig::load(cli.config.as_deref(), &overrides)?;
    let out_root = config
        .out
        .clone()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("runs").join(cli.kind.name()));

    let manifest = experiment::run(cli.kind, &config, &out_root)?;

    println!("kind            {}", manifest.kind);
    println!("output          {}", out_root.display());
    println!("E_exact         {}", manifest.e_exact);
    if let Some(e_vqe) = manifest.e_vqe {
        println!("E_VQE           {e_vqe}");
    }
    if let Some(final_estimate) = manifest.final_estimate {
        println!("final estimate  {final_estimate}");
    }
    if manifest.diverged {
        println!("diverged        yes");
    }
    if manifest.divergence_possible {
        println!("witnesses       present");
    }
    Ok(())
}
