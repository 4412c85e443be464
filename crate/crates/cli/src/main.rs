//! Command-line experiment runner.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use teichlab_core::experiments::{list_experiments, run, validate_config, Experiment, ExperimentConfig};

#[derive(Parser)]
#[command(name = "teichlab", version, about = "Lipschitz vs Teichmüller metric experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its CSV table.
    Run {
        /// Experiment name (see `teichlab list`).
        experiment: String,
        /// Line-oriented key=value configuration file.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override a configuration key; may be repeated.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        sets: Vec<String>,
        /// Output CSV path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Random seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// List the available experiments with their defaults.
    List,
}

const EXIT_CONFIG: u8 = 1;
const EXIT_THRESHOLD: u8 = 2;
const EXIT_IO: u8 = 3;

fn load_config(path: Option<&PathBuf>, sets: &[String], seed: Option<u64>) -> Result<ExperimentConfig, String> {
    let text = match path {
        Some(p) => fs::read_to_string(p).map_err(|e| format!("cannot read {}: {e}", p.display()))?,
        None => String::new(),
    };
    let mut cfg = validate_config(&text).map_err(|e| format!("config error: {e}"))?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    cfg.with_overrides(sets).map_err(|e| format!("config error: {e}"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            for e in list_experiments() {
                println!("{:<20} {}\n{:<20} defaults: {}", e.name, e.description, "", e.defaults);
            }
            ExitCode::SUCCESS
        }
        Command::Run {
            experiment,
            config,
            sets,
            out,
            seed,
        } => {
            let experiment: Experiment = match experiment.parse() {
                Ok(e) => e,
                Err(e) => {
                    eprintln!("config error: {e}");
                    return ExitCode::from(EXIT_CONFIG);
                }
            };
            let cfg = match load_config(config.as_ref(), &sets, seed) {
                Ok(c) => c,
                Err(msg) => {
                    eprintln!("{msg}");
                    return ExitCode::from(EXIT_CONFIG);
                }
            };
            if let Some(named) = cfg.experiment {
                if named != experiment {
                    eprintln!("config error: configuration is for {named}, not {experiment}");
                    return ExitCode::from(EXIT_CONFIG);
                }
            }
            let output = match run(&cfg, experiment) {
                Ok(o) => o,
                Err(e) => {
                    eprintln!("{experiment}: {e}");
                    return ExitCode::from(EXIT_CONFIG);
                }
            };
            let target = out.or(cfg.out.clone());
            match target {
                Some(path) => {
                    if let Err(e) = fs::write(&path, &output.csv) {
                        eprintln!("cannot write {}: {e}", path.display());
                        return ExitCode::from(EXIT_IO);
                    }
                }
                None => print!("{}", output.csv),
            }
            eprintln!("{}", output.summary);
            if output.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_THRESHOLD)
            }
        }
    }
}
