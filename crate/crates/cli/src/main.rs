use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use slar_cli::{cmd_gen, cmd_run, cmd_verify, CliError, Options};

#[derive(Parser)]
#[command(name = "slar", version, about = "Adversarial training, optimal adversarial training and equilibria of the SLAR game")]
struct Cli {
    /// Override the config seed (master seed for `verify`).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Suppress progress output.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample train.csv and test.csv.
    Gen { config: PathBuf },
    /// Run the configured methods and write trajectories, weights, summary and figures.
    Run { config: PathBuf },
    /// Run the oracle suite and write verify.json.
    Verify {
        #[arg(default_value = "builtin")]
        target: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = Options {
        seed: cli.seed,
        out: cli.out,
        quiet: cli.quiet,
    };
    let res: Result<(), CliError> = match &cli.command {
        Command::Gen { config } => cmd_gen(config, &opts),
        Command::Run { config } => cmd_run(config, &opts).map(|_| ()),
        Command::Verify { target } => cmd_verify(target, &opts).map(|_| ()),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("slar: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
