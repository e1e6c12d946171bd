//! Command-line parsing. Flags are turned into config pairs and layered
//! over the optional config file, so both go through one validator.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::{cmd_aoa, cmd_compare, cmd_run, Outcome};
use crate::config::{read_pairs, split_assignment, Pairs, ScenarioConfig, SEED_ENV};
use crate::error::{CliResult, EXIT_CONFIG, EXIT_OK};

#[derive(Debug, Parser)]
#[command(
    name = "ztnd",
    version,
    about = "Simulate zeroing-type neural dynamics on time-varying problems"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one model and write trace.csv, summary.csv and residual.svg.
    Run(CommonArgs),
    /// Run several models from the same start and write compare.csv,
    /// summary.csv and compare.svg.
    Compare(CommonArgs),
    /// Track a moving target from bearing measurements.
    Aoa(CommonArgs),
}

#[derive(Debug, Args, Default)]
pub struct CommonArgs {
    /// Flat `key = value` config file; flags override its entries.
    #[arg(long, short = 'c')]
    pub config: Option<PathBuf>,
    /// Set any config key, e.g. `--set kappa.base=3`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// example1, aoa or constant_problem.
    #[arg(long)]
    pub scenario: Option<String>,
    /// aztnd, oznn, gnn, ptcznn or ncznn.
    #[arg(long)]
    pub model: Option<String>,
    /// Comma-separated models for `compare`.
    #[arg(long)]
    pub models: Option<String>,
    /// none, constant, linear or random.
    #[arg(long)]
    pub noise: Option<String>,
    /// Constant noise level, scalar or comma list.
    #[arg(long)]
    pub level: Option<String>,
    /// Linear noise slope per second, scalar or comma list.
    #[arg(long)]
    pub slope: Option<String>,
    /// Lower bound of random noise.
    #[arg(long)]
    pub lower: Option<String>,
    /// Upper bound of random noise.
    #[arg(long)]
    pub upper: Option<String>,
    /// Seed of the random noise; defaults to `--seed`.
    #[arg(long)]
    pub noise_seed: Option<String>,
    #[arg(long)]
    pub gamma: Option<String>,
    /// euler or rk4.
    #[arg(long)]
    pub method: Option<String>,
    #[arg(long)]
    pub step: Option<String>,
    #[arg(long)]
    pub horizon: Option<String>,
    #[arg(long)]
    pub record_every: Option<String>,
    /// Seed of the initial state (default from ZTND_SEED).
    #[arg(long)]
    pub seed: Option<String>,
    /// Explicit initial state, comma-separated.
    #[arg(long, allow_hyphen_values = true)]
    pub init: Option<String>,
    /// Output directory.
    #[arg(long, short = 'o')]
    pub output: Option<String>,
    #[arg(long)]
    pub threshold: Option<String>,
    #[arg(long)]
    pub tail_fraction: Option<String>,
}

impl CommonArgs {
    /// Config file pairs overridden by `--set`, then by dedicated flags.
    pub fn pairs(&self) -> CliResult<Pairs> {
        let mut pairs = match &self.config {
            Some(path) => read_pairs(path)?,
            None => Pairs::new(),
        };
        for s in &self.set {
            let (k, v) = split_assignment(s)?;
            pairs.insert(k, v);
        }
        let flags = [
            ("scenario", &self.scenario),
            ("model", &self.model),
            ("models", &self.models),
            ("noise.kind", &self.noise),
            ("noise.level", &self.level),
            ("noise.slope", &self.slope),
            ("noise.lower", &self.lower),
            ("noise.upper", &self.upper),
            ("noise.seed", &self.noise_seed),
            ("gamma", &self.gamma),
            ("method", &self.method),
            ("step", &self.step),
            ("horizon", &self.horizon),
            ("record_every", &self.record_every),
            ("seed", &self.seed),
            ("init", &self.init),
            ("output", &self.output),
            ("threshold", &self.threshold),
            ("tail_fraction", &self.tail_fraction),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                pairs.insert(key.to_string(), v.clone());
            }
        }
        Ok(pairs)
    }

    pub fn scenario_config(&self) -> CliResult<ScenarioConfig> {
        let env_seed = std::env::var(SEED_ENV).ok();
        ScenarioConfig::from_pairs(&self.pairs()?, env_seed.as_deref())
    }
}

pub fn execute(command: &Command) -> CliResult<Outcome> {
    match command {
        Command::Run(a) => cmd_run(&a.scenario_config()?),
        Command::Compare(a) => cmd_compare(&a.scenario_config()?),
        Command::Aoa(a) => cmd_aoa(&a.scenario_config()?),
    }
}

/// Parses `args`, runs the command and returns the process exit status.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(&cli.command) {
        Ok(outcome) => {
            print!("{}", outcome.report);
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            outcome.exit_code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
