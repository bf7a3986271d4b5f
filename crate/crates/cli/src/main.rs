mod args;
mod commands;
mod input;
mod report;

use std::io::{IsTerminal, Write};
use std::process::ExitCode;

use clap::Parser;

use crate::args::Cli;

/// Exit status for bad command-line usage (BSD `EX_USAGE`).
const EXIT_USAGE: u8 = 64;
const EXIT_INPUT: u8 = 1;
const EXIT_DEGENERATE: u8 = 2;

/// Why a run stopped early.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags or environment.
    Usage(String),
    /// Unreadable or invalid input data.
    Input(String),
}

impl From<fverify::VerifyError> for Failure {
    fn from(e: fverify::VerifyError) -> Self {
        Failure::Input(e.to_string())
    }
}

/// What a successful run hands back to `main`.
pub struct Outcome {
    pub stdout: String,
    pub degenerate: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let result = configure_threads().and_then(|()| commands::run(cli.command));
    match result {
        Ok(outcome) => {
            let mut stdout = std::io::stdout().lock();
            if let Err(e) = stdout.write_all(outcome.stdout.as_bytes()).and_then(|()| stdout.flush()) {
                if e.kind() != std::io::ErrorKind::BrokenPipe {
                    diagnostic(&format!("writing output: {e}"));
                    return ExitCode::from(EXIT_INPUT);
                }
            }
            if outcome.degenerate {
                ExitCode::from(EXIT_DEGENERATE)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(Failure::Usage(msg)) => {
            diagnostic(&msg);
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Input(msg)) => {
            diagnostic(&msg);
            ExitCode::from(EXIT_INPUT)
        }
    }
}

/// Caps the rayon pool at `FVERIFY_THREADS` when set.
fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("FVERIFY_THREADS") else {
        return Ok(());
    };
    let threads: usize = match value.trim().parse() {
        Ok(n) if n > 0 => n,
        _ => return Err(Failure::Usage(format!("FVERIFY_THREADS must be a positive integer, got `{value}`"))),
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Usage(format!("cannot size thread pool: {e}")))
}

/// Writes `error: msg` to stderr, in red when stderr is a terminal and
/// `NO_COLOR` is unset.
pub fn diagnostic(msg: &str) {
    emit("error", "31", msg);
}

pub fn warning(msg: &str) {
    emit("warning", "33", msg);
}

fn emit(label: &str, color: &str, msg: &str) {
    let stderr = std::io::stderr();
    let colored = stderr.is_terminal() && std::env::var_os("NO_COLOR").is_none_or(|v| v.is_empty());
    let mut err = stderr.lock();
    let _ =
        if colored { writeln!(err, "\x1b[1;{color}m{label}\x1b[0m: {msg}") } else { writeln!(err, "{label}: {msg}") };
}
