use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use spike_cli::config::{read_config_file, resolve};
use spike_cli::{CliError, Experiment, Overrides, OUT_ENV};

#[derive(Parser)]
#[command(name = "spike-engine", version, about = "Run spiking-network experiments and write plot-ready artifacts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment.
    Run {
        experiment: String,
        /// JSON config; its `experiment` key, if present, must match.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Simulation length (step-based experiments).
        #[arg(long)]
        steps: Option<u64>,
        /// Training episodes or epochs (bdm_task, unsupervised_digits).
        #[arg(long)]
        episodes: Option<u32>,
        /// Worker threads; defaults to one per core.
        #[arg(long)]
        workers: Option<usize>,
        /// Output directory [default: $SPIKE_ENGINE_OUT/<experiment>].
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write each curve series as its own two-column CSV.
        #[arg(long)]
        emit_gnuplot_friendly: bool,
    },
    /// List experiments.
    List,
    /// Check a config file without running it.
    Validate { path: PathBuf },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::List => {
            for e in Experiment::ALL {
                println!("{:<20} {}", e.as_str(), e.description());
            }
            Ok(())
        }
        Command::Validate { path } => {
            let file = read_config_file(&path)?;
            let cfg = resolve(Some(&file), &Overrides::default()).map_err(CliError::Invalid)?;
            println!("ok: {} (seed {})", cfg.experiment, cfg.seed);
            Ok(())
        }
        Command::Run { experiment, config, seed, steps, episodes, workers, out, emit_gnuplot_friendly } => {
            let experiment: Experiment = experiment.parse()?;
            if workers == Some(0) {
                return Err(CliError::Invalid(vec![spike_cli::config::Violation {
                    key: "workers".into(),
                    message: "must be >= 1".into(),
                }]));
            }
            let file = config.as_deref().map(read_config_file).transpose()?;
            let over = Overrides { experiment: Some(experiment), seed, steps, episodes, output_dir: out };
            let cfg = resolve(file.as_ref(), &over).map_err(CliError::Invalid)?;
            let env_out = std::env::var_os(OUT_ENV).map(PathBuf::from);
            let manifest = spike_cli::run_and_write(&cfg, workers, emit_gnuplot_friendly, env_out)?;
            println!("{}", manifest.display());
            Ok(())
        }
    }
}
