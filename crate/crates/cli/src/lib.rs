//! Scenario-driven front end for `kdq-core`.

pub mod commands;
pub mod error;
pub mod scenario;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{Format, RunOutput};
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "kdq",
    version,
    about = "Kirkwood-Dirac quasiprobability tables and measurement transitions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Scenario JSON file (for `validate`, a KD table JSON is also accepted).
    #[arg(long)]
    pub scenario: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// KD table with marginals.
    Table {
        #[command(flatten)]
        common: Common,
        /// Also reconstruct the state from the table.
        #[arg(long)]
        reconstruct: bool,
    },
    /// Wigner term plus real and imaginary corrections per entry.
    Decompose {
        #[command(flatten)]
        common: Common,
    },
    /// Expectation, ABL and weak values for the postselected outcome.
    Values {
        #[command(flatten)]
        common: Common,
    },
    /// Weak-to-strong sweep over an F grid or a t grid.
    Transition {
        #[command(flatten)]
        common: Common,
    },
    /// Non-classicality decay along a t grid.
    Decay {
        #[command(flatten)]
        common: Common,
    },
    /// Check a scenario or a KD table JSON.
    Validate {
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Table { common, .. }
            | Command::Decompose { common }
            | Command::Values { common }
            | Command::Transition { common }
            | Command::Decay { common }
            | Command::Validate { common } => common,
        }
    }
}

/// Run a parsed command, write its payload, and return the exit code.
pub fn run(cli: &Cli) -> i32 {
    let common = cli.command.common();
    let result = match &cli.command {
        Command::Validate { .. } => commands::cmd_validate(&common.scenario, common.format),
        other => commands::load(&common.scenario).and_then(|setup| match other {
            Command::Table { reconstruct, .. } => commands::cmd_table(&setup, common.format, *reconstruct),
            Command::Decompose { .. } => commands::cmd_decompose(&setup, common.format),
            Command::Values { .. } => commands::cmd_values(&setup, common.format),
            Command::Transition { .. } => commands::cmd_transition(&setup, common.format),
            Command::Decay { .. } => commands::cmd_decay(&setup, common.format),
            Command::Validate { .. } => unreachable!(),
        }),
    };
    let output = match result {
        Ok(o) => o,
        Err(e) => {
            eprintln!("kdq: error: {e}");
            return e.exit_code();
        }
    };
    if let Err(e) = write_output(common.out.as_ref(), &output.text) {
        eprintln!("kdq: error: {e}");
        return e.exit_code();
    }
    match output.failure {
        Some(e) => {
            eprintln!("kdq: error: {e}");
            e.exit_code()
        }
        None => 0,
    }
}

fn write_output(path: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes())?;
            lock.flush()?;
        }
    }
    Ok(())
}
