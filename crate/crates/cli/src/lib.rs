//! Command-line front end for `mubgme`.

pub mod args;
pub mod commands;
pub mod error;
pub mod output;

use std::io::Write;

use args::{Cli, Command};
use error::CliResult;

pub use error::CliError;

/// Runs a parsed command, writing reports to `stdout`.
pub fn run<W: Write + ?Sized>(cli: &Cli, stdout: &mut W) -> CliResult<()> {
    match &cli.command {
        Command::Certify(a) => output::write_json(stdout, &commands::certify(a)?),
        Command::Sweep(a) => commands::sweep(a, stdout),
        Command::Locc(a) => commands::locc(a, stdout).map(|_| ()),
        Command::CheckBounds(a) => output::write_json(stdout, &commands::check_bounds(a)?),
        Command::Figures(a) => output::write_json(stdout, &commands::figures(a)?),
    }
}
