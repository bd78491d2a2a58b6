//! `privstate <noun> <verb> [flags]`

mod bounds;
mod error;
mod measure;
mod output;
mod protocol;
mod state;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use error::CliError;
use output::{Emitter, Format};

#[derive(Parser, Debug)]
#[command(name = "privstate", version, about = "Private states, key rates and entanglement bounds")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    noun: Noun,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Numerical tolerance (PPT test, Frank-Wolfe gap).
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Largest matrix dimension any dense step may build.
    #[arg(long, global = true, default_value_t = privstate_core::states::DEFAULT_DIM_BUDGET)]
    budget_dim: usize,
}

#[derive(Subcommand, Debug)]
enum Noun {
    /// Build a state and write it as JSON.
    State {
        #[command(subcommand)]
        verb: state::StateVerb,
    },
    /// Evaluate a measure on a state file.
    Measure(measure::MeasureArgs),
    /// Finite-m key rate of the shield-sorting protocol.
    Protocol {
        #[command(subcommand)]
        verb: protocol::ProtocolVerb,
    },
    /// Closed-form bounds.
    Bounds {
        #[command(subcommand)]
        verb: bounds::BoundsVerb,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let g = cli.global;
    match cli.noun {
        Noun::State { verb } => state::run(verb, &g),
        Noun::Measure(args) => measure::run(args, &g, &Emitter::new(&g, Format::Json)),
        Noun::Protocol { verb } => protocol::run(verb, &g),
        Noun::Bounds { verb } => bounds::run(verb, &g),
    }
}

fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("PRIVSTATE_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("PRIVSTATE_THREADS = '{raw}' is not a thread count")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(error::EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match init_threads().and_then(|_| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
