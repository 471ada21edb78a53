use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use radpair_cli::commands::{
    cmd_compare, cmd_decompose, cmd_simulate, cmd_verify, parse_tolerance,
};
use radpair_cli::config::RunArgs;
use radpair_cli::plot::cmd_plot;
use radpair_cli::CliError;

/// Radical-pair recombination: density-matrix simulation and consistency checks.
#[derive(Parser)]
#[command(name = "radpair", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate one model and write the time series
    Simulate {
        /// qm, hk or nqm
        #[arg(long)]
        model: Option<String>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Propagate two models and write observable differences A - B
    Compare {
        #[arg(long, default_value = "qm")]
        model_a: String,
        #[arg(long, default_value = "hk")]
        model_b: String,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Write decomposition weights and the claimed-state distance
    Decompose {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run the built-in consistency checks
    Verify {
        /// Override a check threshold, e.g. eq2_corrected=1e-8 (repeatable)
        #[arg(long = "tolerance", value_parser = parse_tolerance)]
        tolerances: Vec<(String, f64)>,
        /// Also write the report as JSON
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Draw CSV columns as an SVG line chart
    Plot {
        #[arg(long)]
        input: PathBuf,
        /// Comma-separated column names
        #[arg(long, value_delimiter = ',', required = true)]
        columns: Vec<String>,
        #[arg(long, short)]
        output: PathBuf,
        /// Column for the horizontal axis (default: first column)
        #[arg(long)]
        x: Option<String>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate { model, run } => cmd_simulate(&run, model.as_deref()),
        Command::Compare {
            model_a,
            model_b,
            run,
        } => cmd_compare(&run, &model_a, &model_b),
        Command::Decompose { run } => cmd_decompose(&run),
        Command::Verify { tolerances, report } => {
            cmd_verify(&tolerances, report.as_deref()).map(|_| ())
        }
        Command::Plot {
            input,
            columns,
            output,
            x,
        } => cmd_plot(&input, &columns, &output, x.as_deref()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
