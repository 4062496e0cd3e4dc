use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use valueset_cli::{execute, parse_config, seed_check, Outputs, RunError, RunOptions};

#[derive(Parser)]
#[command(name = "valueset", version, about = "Value-set experiments over constrained polynomial families")]
struct Cli {
    /// Run the built-in identity suite and exit.
    #[arg(long)]
    seed_check: bool,

    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        config: PathBuf,
        /// CSV destination; stdout when neither this nor output.csv is set.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Summary destination; stderr when neither this nor output.summary is set.
        #[arg(long)]
        summary: Option<PathBuf>,
        /// Step budget for the brute-force oracle stages.
        #[arg(long)]
        oracle_budget: Option<u128>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.workers == Some(0) {
        eprintln!("error: --workers must be at least 1");
        return ExitCode::from(2);
    }
    if cli.seed_check {
        return match seed_check(cli.workers.unwrap_or(1)) {
            Ok(lines) => {
                for l in lines {
                    println!("{l}");
                }
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        };
    }
    let Some(Command::Run { config, csv, summary, oracle_budget }) = cli.command else {
        eprintln!("error: nothing to do; use `valueset run <config>` or `valueset --seed-check`");
        return ExitCode::from(2);
    };

    let text = match std::fs::read_to_string(&config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", config.display());
            return ExitCode::from(2);
        }
    };
    let cfg = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{}: {e}", config.display());
            return ExitCode::from(2);
        }
    };
    let opts = RunOptions { workers: cli.workers, oracle_budget, ..RunOptions::default() };
    let outputs = Outputs { csv, summary };
    match execute(&cfg, &opts, &outputs) {
        Ok(report) => {
            if outputs.csv.is_none() && cfg.output.csv.is_none() {
                print!("{}", report.csv());
            }
            if outputs.summary.is_none() && cfg.output.summary.is_none() {
                eprint!("{}", report.summary());
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(e),
    }
}

fn fail(e: RunError) -> ExitCode {
    eprintln!("error: {e}");
    match e {
        RunError::Config(_) => ExitCode::from(2),
        _ => ExitCode::FAILURE,
    }
}
