//! Command-line front end: argument and config handling, command dispatch
//! and report emission.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use config::{Cli, Command, FileConfig, Settings};
use error::{usage, CliError};

pub const THREADS_ENV: &str = "TOWERLAB_THREADS";

fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| usage(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| usage(e.to_string()))
}

/// Parse, run and render; returns the rendered report.
pub fn execute(cli: &Cli) -> Result<(String, Settings), CliError> {
    let file = match &cli.global.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let settings = Settings::resolve(&cli.global, &file)?;
    let report = thread_pool()?.install(|| match &cli.command {
        Command::Count(args) => commands::count(args, &file, &settings),
        Command::Bounds(args) => commands::bounds(args, &file, &settings),
        Command::Chain { tower, depth } => commands::chain(tower, *depth, &file, &settings),
        Command::Dynamics(cmd) => commands::dynamics(cmd, &file, &settings),
        Command::Spectra(cmd) => commands::spectra(cmd, &settings),
    })?;
    let text = report.render(settings.format).map_err(|e| usage(format!("csv: {e}")))?;
    Ok((text, settings))
}

pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = execute(&cli).and_then(|(text, settings)| match &settings.out {
        Some(path) => std::fs::write(path, text).map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| usage(e.to_string())),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("towerlab: {e}");
            e.exit_code()
        }
    }
}
