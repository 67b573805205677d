use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qreduce::experiment::{parse_config, preset, run, ExperimentConfig};
use qreduce::{Error, Result};

#[derive(Parser)]
#[command(
    name = "qreduce",
    version,
    about = "Seeded photon measurement experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Measurement strategies on a single photon stream
    Strategy(RunArgs),
    /// Photon-detector joint evolution
    Dynamics(RunArgs),
    /// Polarization-entangled pair correlations
    Epr(RunArgs),
    /// CHSH combination on the singlet
    Chsh(RunArgs),
    /// Entanglement-based key distribution session
    Qkd(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment config
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in configuration name
    #[arg(long)]
    preset: Option<String>,
    /// Override the master seed
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for artifacts
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn load(kind: &str, args: &RunArgs) -> Result<ExperimentConfig> {
    let mut config = match (&args.config, &args.preset) {
        (Some(path), _) => parse_config(&std::fs::read_to_string(path)?)?,
        (None, Some(name)) => preset(name)?,
        (None, None) => {
            return Err(Error::Config(
                "either --config or --preset is required".into(),
            ))
        }
    };
    if config.kind() != kind {
        return Err(Error::Config(format!(
            "config is a `{}` experiment, not `{kind}`",
            config.kind()
        )));
    }
    if let Some(seed) = args.seed {
        config.set_seed(seed);
    }
    Ok(config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match &cli.command {
        Command::Strategy(a) => ("strategy", a),
        Command::Dynamics(a) => ("dynamics", a),
        Command::Epr(a) => ("epr", a),
        Command::Chsh(a) => ("chsh", a),
        Command::Qkd(a) => ("qkd", a),
    };
    let result = load(kind, args).and_then(|config| run(&config, &args.out));
    match result {
        Ok(report) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&report.summary["results"]).unwrap()
            );
            for path in &report.artifacts {
                eprintln!("wrote {}", path.display());
            }
            eprintln!("finished in {:.3} s", report.duration.as_secs_f64());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
