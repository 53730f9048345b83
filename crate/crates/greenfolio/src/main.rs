use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use greenfolio::error::{exit, WithStage};
use greenfolio::{execute, Overrides, RunConfig, Stage};

#[derive(Debug, Parser)]
#[command(
    name = "greenfolio",
    version,
    about = "Environment-aware portfolio construction and climate scenario projection"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Run configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Seed for portfolio sampling; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Number of sampled portfolios; overrides the config.
    #[arg(long, global = true)]
    samples: Option<usize>,

    /// Risk-free rate; overrides the config.
    #[arg(long, global = true, allow_negative_numbers = true)]
    rf: Option<f64>,

    /// Output directory; overrides the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Every stage, writing all outputs.
    Run,
    /// Load and align the input files.
    Ingest,
    /// Select the universe by score floor and cap-class quotas.
    Screen,
    /// Sample portfolios and build the frontier hull.
    Frontier,
    /// Pick the portfolio with the best green Sharpe ratio.
    Optimize,
    /// Buy-and-hold valuation of the optimal portfolio.
    Backtest,
    /// Climate factor regression of the backtest returns.
    Regress,
    /// Three-year scenario projections.
    Scenario,
    /// Human-readable summary of every stage.
    Report,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Run => "run",
            Command::Ingest => "ingest",
            Command::Screen => "screen",
            Command::Frontier => "frontier",
            Command::Optimize => "optimize",
            Command::Backtest => "backtest",
            Command::Regress => "regress",
            Command::Scenario => "scenario",
            Command::Report => "report",
        }
    }

    fn stages(self) -> Vec<Stage> {
        match self {
            Command::Run => Stage::ALL.to_vec(),
            Command::Ingest => vec![Stage::Ingest],
            Command::Screen => vec![Stage::Screen],
            Command::Frontier => vec![Stage::Frontier],
            Command::Optimize => vec![Stage::Optimize],
            Command::Backtest => vec![Stage::Backtest],
            Command::Regress => vec![Stage::Regress],
            Command::Scenario => vec![Stage::Scenario],
            Command::Report => vec![Stage::Report],
        }
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig, greenfolio::StageError> {
    let path =
        cli.config.as_ref().ok_or_else(|| greenfolio::Error::Config("--config is required".into())).stage("config")?;
    let mut config = RunConfig::load(path).stage("config")?;
    config.apply(&Overrides {
        seed: cli.seed,
        sample_count: cli.samples,
        risk_free_rate: cli.rf,
        out_dir: cli.out.clone(),
    });
    Ok(config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = load_config(&cli).and_then(|config| execute(&config, &cli.command.stages(), cli.command.name()));
    match result {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
            ExitCode::from(exit::SUCCESS as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
