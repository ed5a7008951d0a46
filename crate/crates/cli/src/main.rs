mod commands;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "dinf", version, about = "Finite bilimits, lifts and domain-equation chains")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// total, partial or internal
    #[arg(long, global = true, value_enum)]
    pub mode: Option<Mode>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = 100)]
    pub count: u64,
    /// Last chain level to build
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    /// Largest number of candidate maps an exhaustive search may visit
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the output here instead of standard output
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Total,
    Partial,
    Internal,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate posets, maps, ep-pairs, diagrams, presheaves and equations
    Check { paths: Vec<PathBuf> },
    /// Build the bilimit of a diagram and run its invariant suite
    Bilimit { diagram: PathBuf },
    /// Check the universal property on seeded random diagrams
    Verify {
        /// Run only this case of the seeded sequence
        #[arg(long)]
        case: Option<u64>,
        /// Cap the generated object size
        #[arg(long)]
        max_object: Option<usize>,
    },
    /// Iterate a domain equation and compare truncated bilimits with the levels
    Solve { equation: PathBuf },
    /// The lift chain from the empty poset and its re-indexing isomorphisms
    Omegabar,
    /// Convert a file, or the poset it determines, to another format
    Export { input: PathBuf },
}

fn main() -> ExitCode {
    // clap exits with 2 on bad arguments; 2 is reserved for failed checks here.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let g = &cli.global;
    let result = match &cli.command {
        Command::Check { paths } => commands::check(g, paths),
        Command::Bilimit { diagram } => commands::bilimit(g, diagram),
        Command::Verify { case, max_object } => commands::verify(g, *case, *max_object),
        Command::Solve { equation } => commands::solve(g, equation),
        Command::Omegabar => commands::omegabar(g),
        Command::Export { input } => commands::export(g, input),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.message);
            ExitCode::from(f.code)
        }
    }
}
