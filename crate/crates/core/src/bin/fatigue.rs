//! Command-line front end for the fatigue life prediction pipeline.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fatigue_pipeline::commands::{cmd_audit, cmd_evaluate, cmd_generate, cmd_train};
use fatigue_pipeline::io::RunConfig;
use fatigue_pipeline::Error;

/// Fatigue life prediction pipeline over synthetic mission data.
#[derive(Parser)]
#[command(name = "fatigue", version, about)]
struct Cli {
    /// TOML run configuration; every key is optional.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed override; re-derives all component seeds. Also read
    /// from FATIGUE_SEED when the flag is absent.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the synthetic dataset (segments, stresses, labels, world).
    Generate {
        /// Output directory for the dataset files.
        #[arg(long)]
        out: PathBuf,
    },
    /// Train the pipeline; writes model.json and curves.csv.
    Train {
        /// Dataset directory produced by `generate`.
        #[arg(long)]
        dataset: PathBuf,
        /// Output directory for the model files.
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate the trained pipeline on the test split.
    Evaluate {
        #[arg(long)]
        dataset: PathBuf,
        /// Path to model.json.
        #[arg(long)]
        model: PathBuf,
        /// Output directory for report.json and the plot CSVs.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the split-adequacy audit and interval calibration.
    Audit {
        #[arg(long)]
        dataset: PathBuf,
        /// Path to model.json.
        #[arg(long)]
        model: PathBuf,
        /// Output directory for audit.json.
        #[arg(long)]
        out: PathBuf,
    },
}

fn load_config(cli: &Cli) -> Result<RunConfig, Error> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let seed = match cli.seed {
        Some(s) => Some(s),
        None => match std::env::var("FATIGUE_SEED") {
            Ok(text) => Some(text.parse::<u64>().map_err(|_| {
                Error::Config(format!("FATIGUE_SEED must be an unsigned integer, got '{text}'"))
            })?),
            Err(_) => None,
        },
    };
    if let Some(seed) = seed {
        config = config.with_global_seed(seed);
    }
    Ok(config)
}

fn run(cli: Cli) -> Result<(), Error> {
    let config = load_config(&cli)?;
    match &cli.command {
        Command::Generate { out } => {
            cmd_generate(&config, out)?;
            eprintln!("dataset written to {}", out.display());
        }
        Command::Train { dataset, out } => {
            cmd_train(dataset, &config, out)?;
            eprintln!("model written to {}", out.display());
        }
        Command::Evaluate { dataset, model, out } => {
            let report = cmd_evaluate(dataset, model, &config, out)?;
            eprintln!(
                "evaluated {} test samples; median life error {:.2}% (full domain)",
                report.rows.len(),
                report.life_summary_full.median
            );
        }
        Command::Audit { dataset, model, out } => {
            let audit = cmd_audit(dataset, model, &config, out)?;
            eprintln!(
                "audit complete: epsilon {:.4}, coverage {:.4}",
                audit.interval.epsilon,
                audit.interval.coverage.unwrap_or(f64::NAN)
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
