//! `ednet`: reproducible simulation, training, evaluation, approximation certificates
//! and rate tables from JSON configs.

mod commands;
mod config;
mod provenance;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::{CertifyConfig, EvaluateConfig, RatesConfig, SimulateConfig, TrainCommandConfig};

#[derive(Debug)]
pub enum Failure {
    /// Bad config, bad input files or violated preconditions (exit 2).
    Config(String),
    /// Divergence, non-finite values or violated certificates (exit 3).
    Numeric(String),
    /// Output could not be written (exit 1).
    Io(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Config(_) => 2,
            Failure::Numeric(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "config error: {m}"),
            Failure::Numeric(m) => write!(f, "numeric failure: {m}"),
            Failure::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<ednet::Error> for Failure {
    fn from(e: ednet::Error) -> Self {
        match e {
            e if e.is_numeric() => Failure::Numeric(e.to_string()),
            ednet::Error::Io(e) => Failure::Io(e.to_string()),
            e => Failure::Config(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "ednet", version, about = "Encoder-decoder network forecasting, approximation certificates and rate tables")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON config file.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Overrides the seed in the config.
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
    /// Output directory, created if missing.
    #[arg(long, value_name = "DIR", default_value = ".")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a series and write it as CSV with a JSON sidecar.
    Simulate(Common),
    /// Train one network or an r × m sweep.
    Train {
        #[command(flatten)]
        common: Common,
        /// Overrides the number of epochs.
        #[arg(long)]
        epochs: Option<usize>,
        /// Print where the multi-site temperature data can be obtained and exit.
        #[arg(long)]
        fetch_note: bool,
    },
    /// Score a trained model on a series: risk, naive baseline, k-step errors.
    Evaluate(Common),
    /// Build a certified approximation network for a catalog function.
    Certify(Common),
    /// Tabulate rate functions and the choice of N.
    Rates(Common),
}

fn config_path(common: &Common) -> Result<&PathBuf, Failure> {
    common.config.as_ref().ok_or_else(|| Failure::Config("--config PATH is required".into()))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Simulate(c) => {
            let mut cfg: SimulateConfig = config::load(config_path(&c)?)?;
            cfg.seed = c.seed.or(cfg.seed);
            commands::simulate(&cfg, &commands::Output::new(&c.out)?)
        }
        Command::Train { common: c, epochs, fetch_note } => {
            if fetch_note {
                println!("{}", commands::FETCH_NOTE);
                return Ok(());
            }
            let mut cfg: TrainCommandConfig = config::load(config_path(&c)?)?;
            cfg.seed = c.seed.or(cfg.seed);
            cfg.epochs = epochs.or(cfg.epochs);
            commands::train(&cfg, &commands::Output::new(&c.out)?)
        }
        Command::Evaluate(c) => {
            let mut cfg: EvaluateConfig = config::load(config_path(&c)?)?;
            cfg.seed = c.seed.or(cfg.seed);
            commands::evaluate(&cfg, &commands::Output::new(&c.out)?)
        }
        Command::Certify(c) => {
            let mut cfg: CertifyConfig = config::load(config_path(&c)?)?;
            cfg.seed = c.seed.or(cfg.seed);
            commands::certify_cmd(&cfg, &commands::Output::new(&c.out)?)
        }
        Command::Rates(c) => {
            let mut cfg: RatesConfig = config::load(config_path(&c)?)?;
            cfg.seed = c.seed.or(cfg.seed);
            commands::rates(&cfg, &commands::Output::new(&c.out)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("ednet: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
