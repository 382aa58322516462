use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};

use coactive::experiment::{
    check_bounds, run_experiment, ExperimentConfig, OutputFormat, ResultsTable,
};
use coactive::server::{self, DATA_DIR_ENV};
use coactive::trip::TripData;

#[derive(Parser)]
#[command(
    name = "coactive",
    version,
    about = "Coactive critiquing experiments and sessions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulated experiment and write aggregated results.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Worker threads; defaults to the available cores.
        #[arg(long)]
        workers: Option<usize>,
        /// Overrides the config's master seed.
        #[arg(long)]
        master_seed: Option<u64>,
    },
    /// Generate a synthetic trip dataset as CSV files.
    GenTrip {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = coactive::trip::data::DEFAULT_HORIZON)]
        horizon: usize,
    },
    /// Recheck the regret bound of every run in a JSON results file.
    CheckBounds {
        #[arg(long)]
        results: PathBuf,
    },
    /// Serve the session HTTP API.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
        #[arg(long, env = DATA_DIR_ENV, default_value = "sessions")]
        data_dir: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Simulate {
            config,
            out,
            format,
            workers,
            master_seed,
        } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(seed) = master_seed {
                cfg.master_seed = seed;
            }
            let workers = workers
                .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            let started = std::time::Instant::now();
            let table = run_experiment(&cfg, workers)?;
            let format = match format {
                Format::Csv => OutputFormat::Csv,
                Format::Json => OutputFormat::Json,
            };
            table.emit(format, &out)?;
            let invalid = table.runs.iter().filter(|r| !r.is_valid()).count();
            let broken = table.runs.iter().filter(|r| !r.bound_holds()).count();
            log::info!(
                "{} runs in {:.1?}; {} invalid, {} bound violations; wrote {}",
                table.runs.len(),
                started.elapsed(),
                invalid,
                broken,
                out.display()
            );
            Ok(if invalid == 0 && broken == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::GenTrip { seed, out, horizon } => {
            let data = TripData::generate_with_horizon(seed, horizon);
            data.write_csv(&out)
                .with_context(|| format!("writing trip data to {}", out.display()))?;
            log::info!("wrote {} cities to {}", data.cities.len(), out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::CheckBounds { results } => {
            let table = ResultsTable::load_json(&results)?;
            let failures = check_bounds(&table);
            for f in &failures {
                println!("FAIL {f}");
            }
            println!(
                "{} runs checked, {} failures",
                table.runs.len(),
                failures.len()
            );
            Ok(if failures.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Serve { addr, data_dir } => {
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(server::serve(addr, data_dir))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}
