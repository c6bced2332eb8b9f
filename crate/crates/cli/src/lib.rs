//! The `decoh` command-line tool.
//!
//! Exit codes: 0 success, 1 failed verification or numerical failure,
//! 2 usage or domain error.

pub mod args;
pub mod commands;
pub mod config;
pub mod report;
pub mod table;

use std::ffi::OsString;
use std::fs;
use std::io::Write;

use clap::Parser;

use args::{Cli, Command, Format, OutputArgs};
use report::Report;

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

/// Environment variable capping sweep parallelism.
pub const THREADS_ENV: &str = "DECOH_NUM_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] decoh_core::Error),
    #[error("{0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Output(_) => EXIT_USAGE,
            CliError::Core(decoh_core::Error::Domain(_) | decoh_core::Error::Config(_)) => EXIT_USAGE,
            CliError::Core(_) => EXIT_FAILED,
        }
    }
}

fn emit(report: &Report, output: &OutputArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let text = match output.format {
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json_string(),
    };
    match &output.out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Output(format!("cannot write {}: {e}", path.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Output(format!("cannot write to stdout: {e}"))),
    }
}

fn dispatch(command: Command) -> Result<(Report, OutputArgs), CliError> {
    Ok(match command {
        Command::Error(a) => (commands::error::run(&a)?, a.output),
        Command::Entangle(a) => (commands::entangle::run(&a)?, a.output),
        Command::Sweep(a) => (commands::sweep::run(&a)?, a.output),
        Command::Verify(a) => (commands::verify::run(&a)?, a.output),
        Command::Thermal(a) => (commands::thermal::run(&a)?, a.output),
    })
}

/// Runs one invocation and returns its exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let result = config::expand(argv).and_then(|argv| match Cli::try_parse_from(argv) {
        Ok(cli) => Ok(Some(cli)),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(stderr, "{}", e.render())
            } else {
                write!(stdout, "{}", e.render())
            };
            if code == EXIT_OK {
                Ok(None)
            } else {
                Err(CliError::Usage(String::new()))
            }
        }
    });
    let cli = match result {
        Ok(Some(cli)) => cli,
        Ok(None) => return EXIT_OK,
        Err(CliError::Usage(msg)) if msg.is_empty() => return EXIT_USAGE,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return e.exit_code();
        }
    };
    match dispatch(cli.command).and_then(|(report, output)| {
        emit(&report, &output, stdout)?;
        Ok(report)
    }) {
        Ok(report) => {
            for note in &report.notes {
                let _ = writeln!(stderr, "warning: {note}");
            }
            if report.all_passed() {
                EXIT_OK
            } else {
                let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed()).map(|c| c.name.as_str()).collect();
                let _ = writeln!(stderr, "verification failed: {}", failed.join(", "));
                EXIT_FAILED
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
