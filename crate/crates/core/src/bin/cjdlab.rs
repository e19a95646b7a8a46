use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use cjdlab::pipeline::{self, RunConfig};

#[cfg(debug_assertions)]
const BUILD_INFO: &str = concat!(env!("CARGO_PKG_VERSION"), " (debug build)");
#[cfg(not(debug_assertions))]
const BUILD_INFO: &str = concat!(env!("CARGO_PKG_VERSION"), " (release build)");

#[derive(Parser)]
#[command(name = "cjdlab", version = BUILD_INFO, about = "Yearly case-count forecasting with ENR, LSTM and RF")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration; missing fields take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Per-variable correlation statistics and the correlation matrix.
    Stats(Common),
    /// Fit and evaluate all three models.
    Run(Common),
    /// Validation RMSE over the penalty grid.
    Sweep(Common),
    /// Forecast a dataset with a saved model.
    Predict {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        model: PathBuf,
    },
}

impl Common {
    fn resolve(&self) -> cjdlab::Result<RunConfig> {
        let mut config = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(d) = &self.dataset {
            config.dataset = d.clone();
        }
        if let Some(o) = &self.out {
            config.output_dir = o.clone();
        }
        config.validate()?;
        Ok(config)
    }
}

fn execute(command: Command) -> cjdlab::Result<()> {
    match command {
        Command::Stats(c) => {
            let config = c.resolve()?;
            let out = pipeline::cmd_stats(&config)?;
            println!("{} variables -> {}", out.variables.len(), config.output_dir.display());
        }
        Command::Run(c) => {
            let config = c.resolve()?;
            let a = pipeline::cmd_run(&config)?;
            for m in &a.report.models {
                println!(
                    "{:<4} rmse {:.3}  mbe {:.3}  mae {:.3}  (n = {})",
                    m.model.label(),
                    m.rmse,
                    m.mbe,
                    m.mae,
                    m.n
                );
            }
            println!("best lambda {} -> {}", a.report.best_lambda, config.output_dir.display());
        }
        Command::Sweep(c) => {
            let config = c.resolve()?;
            let s = pipeline::cmd_sweep(&config)?;
            println!("{} grid points, best lambda {}", s.curve.len(), s.best_lambda);
        }
        Command::Predict { common, model } => {
            let config = common.resolve()?;
            let out = config.output_dir.join("predictions.csv");
            let preds = pipeline::cmd_predict(&model, &config.dataset, &out)?;
            println!("{} forecasts -> {}", preds.len(), out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
