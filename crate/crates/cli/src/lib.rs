//! Command-line front end for `noma-ee`: single-instance reports and the
//! Monte Carlo figure sweeps, written as CSV with a JSON metadata sidecar.

pub mod args;
pub mod commands;
pub mod error;
pub mod output;
pub mod report;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub use args::Cli;
pub use error::{CliError, CliResult, EXIT_INFEASIBLE, EXIT_IO, EXIT_OK, EXIT_USAGE};

pub const DEFAULT_SEED: u64 = 2016;

/// Parses `argv`, runs the command and returns the process exit code.
/// Reports go to `stdout`, diagnostics to `stderr`.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match commands::execute(cli.command, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
