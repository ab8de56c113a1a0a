use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod analyze;
mod cover;
mod io;
mod refute;
mod space;

use io::{CliError, Context};

#[derive(Parser)]
#[command(name = "coarse", version, about = "Exact cover constructions and refutations for lattice spaces")]
struct Cli {
    /// Cap on worker threads; the computations are single-threaded, so any value >= 1 is accepted.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,

    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<std::path::PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate or describe a space window.
    #[command(subcommand)]
    Space(space::SpaceCmd),
    /// Build cover families, optionally validating them.
    #[command(subcommand)]
    Cover(cover::CoverCmd),
    /// Statistics and plots of a cover bundle.
    #[command(subcommand)]
    Analyze(analyze::AnalyzeCmd),
    /// Run a refutation procedure.
    #[command(subcommand)]
    Refute(refute::RefuteCmd),
}

fn run(cli: Cli) -> Result<(), CliError> {
    if cli.threads == 0 {
        return Err(CliError::input("--threads must be at least 1"));
    }
    let ctx = Context::new(cli.out, cli.threads)?;
    match cli.command {
        Command::Space(c) => space::run(c, &ctx),
        Command::Cover(c) => cover::run(c, &ctx),
        Command::Analyze(c) => analyze::run(c, &ctx),
        Command::Refute(c) => refute::run(c, &ctx),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::input(e.to_string().trim_end());
            err.report();
            return ExitCode::from(err.code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            e.report();
            ExitCode::from(e.code)
        }
    }
}
